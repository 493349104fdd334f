#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnbma/dates.hpp"
#include "tnbma/group_spec.hpp"

namespace tnbma {

struct MemberValue {
  double value = 0.0;
  bool present = false;
};

// One (station, date) record: the ensemble member forecasts laid out in a
// GroupSpec's flat member order, plus the validating observation when known.
struct ForecastCase {
  std::string station;
  Date date{};
  std::vector<MemberValue> members;
  std::optional<double> observation;

  int present_count() const {
    int n = 0;
    for (const MemberValue& m : members) n += m.present ? 1 : 0;
    return n;
  }

  bool ensemble_complete() const {
    return present_count() == static_cast<int>(members.size());
  }

  bool complete() const { return ensemble_complete() && observation.has_value(); }

  std::vector<double> present_values() const {
    std::vector<double> out;
    out.reserve(members.size());
    for (const MemberValue& m : members) {
      if (m.present) out.push_back(m.value);
    }
    return out;
  }
};

}  // namespace tnbma
