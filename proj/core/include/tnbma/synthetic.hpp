#pragma once

#include <cstdint>
#include <filesystem>

#include "tnbma/archive.hpp"
#include "tnbma/bma_model.hpp"

namespace tnbma {

// Synthetic archive generator.  Per (station, day): a latent wind signal is
// drawn, ensemble members scatter around it with the member-noise scale, and
// the observation is drawn from the truth mixture conditional on the
// members, so the generating process lies exactly in the fitted model
// family.
struct SynthConfig {
  int station_count = 10;
  int day_count = 176;
  Date start_date{std::chrono::year(2010), std::chrono::month(10), std::chrono::day(1)};
  BmaModel truth;                 // group spec comes from here
  double member_noise = 1.0;      // 0 means members equal the signal exactly
  double signal_location = 5.0;   // latent signal ~ N0(location, scale^2)
  double signal_scale = 2.0;
  std::uint64_t seed = 1;

  static SynthConfig defaults();
  static SynthConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

Archive generate_synthetic(const SynthConfig& config);

}  // namespace tnbma
