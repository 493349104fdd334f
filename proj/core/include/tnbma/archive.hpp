#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tnbma/forecast_case.hpp"
#include "tnbma/group_spec.hpp"

namespace tnbma {

// Forecast/observation archive.  CSV schema:
//   station,date,<group>.1,...,<group>.Mk,...,obs
// Empty member or observation fields mean missing.  Rows are kept sorted by
// (date, station), and (station, date) keys are unique.
class Archive {
 public:
  Archive() = default;
  Archive(GroupSpec spec, std::vector<ForecastCase> rows);  // sorts, validates keys

  const GroupSpec& spec() const { return spec_; }
  const std::vector<ForecastCase>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  std::vector<Date> distinct_dates() const;
  std::vector<const ForecastCase*> rows_on(const Date& date) const;
  std::vector<const ForecastCase*> rows_between(const Date& first, const Date& last) const;

  static Archive parse(std::istream& in, std::string_view source = "<stream>");
  static Archive parse_file(const std::filesystem::path& path);
  void write(std::ostream& out) const;
  void write_file(const std::filesystem::path& path) const;

 private:
  GroupSpec spec_;
  std::vector<ForecastCase> rows_;
};

// Sliding calendar windows: for every candidate verification date, the
// training cases are the complete cases from the preceding training-length
// calendar days.  Days without usable data shrink the sample, never the
// window.
struct WindowPlan {
  int training_days = 28;

  struct Entry {
    Date date;
    std::vector<ForecastCase> training;  // complete cases in the window
  };
  std::vector<Entry> entries;

  struct Omitted {
    Date date;
    std::string reason;
  };
  std::vector<Omitted> omitted;
};

WindowPlan plan_windows(const Archive& archive, int training_days,
                        int min_training_cases);

struct CompletenessTally {
  long complete = 0;
  long incomplete_ensemble = 0;
  long missing_observation = 0;
};

// Splits cases into training-usable (all members and observation present)
// and a tally of the rest by reason.
std::pair<std::vector<ForecastCase>, CompletenessTally> filter_complete(
    std::span<const ForecastCase> cases);

}  // namespace tnbma
