#include "tnbma/archive.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tnbma/errors.hpp"
#include "tnbma/key_value.hpp"

namespace tnbma {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

bool row_order(const ForecastCase& a, const ForecastCase& b) {
  if (a.date != b.date) return a.date < b.date;
  return a.station < b.station;
}

GroupSpec spec_from_header(const std::vector<std::string>& fields,
                           std::string_view source) {
  if (fields.size() < 4 || fields[0] != "station" || fields[1] != "date" ||
      fields.back() != "obs") {
    throw ParseError(std::string(source) +
                     ":1: header must be station,date,<group>.<idx>...,obs");
  }
  std::vector<GroupSpec::Group> groups;
  for (size_t i = 2; i + 1 < fields.size(); ++i) {
    const std::string& col = fields[i];
    const size_t dot = col.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == col.size()) {
      throw ParseError(std::string(source) + ":1: bad member column '" + col + "'");
    }
    const std::string id = col.substr(0, dot);
    int idx = 0;
    try {
      size_t used = 0;
      idx = std::stoi(col.substr(dot + 1), &used);
      if (used != col.size() - dot - 1) throw std::invalid_argument(col);
    } catch (const std::exception&) {
      throw ParseError(std::string(source) + ":1: bad member index in '" + col + "'");
    }
    if (!groups.empty() && groups.back().id == id) {
      if (idx != groups.back().member_count + 1) {
        throw ParseError(std::string(source) + ":1: member columns of group '" + id +
                         "' must be numbered 1..Mk in order");
      }
      ++groups.back().member_count;
    } else {
      for (const auto& g : groups) {
        if (g.id == id) {
          throw ParseError(std::string(source) + ":1: group '" + id +
                           "' columns must be contiguous");
        }
      }
      if (idx != 1) {
        throw ParseError(std::string(source) + ":1: group '" + id +
                         "' must start at index 1");
      }
      groups.push_back({id, 1});
    }
  }
  try {
    return GroupSpec(std::move(groups));
  } catch (const ParseError& e) {
    throw ParseError(std::string(source) + ":1: " + e.what());
  }
}

double parse_value(const std::string& field, std::string_view source, size_t line_no,
                   const char* what) {
  try {
    size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
    if (v < 0.0) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": negative " +
                       what + " '" + field + "'");
    }
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": bad " + what +
                     " '" + field + "'");
  }
}

}  // namespace

Archive::Archive(GroupSpec spec, std::vector<ForecastCase> rows)
    : spec_(std::move(spec)), rows_(std::move(rows)) {
  for (const ForecastCase& r : rows_) {
    if (static_cast<int>(r.members.size()) != spec_.total_members()) {
      throw ParseError("archive row layout mismatch at " + r.station + " " +
                       format_date(r.date));
    }
  }
  std::sort(rows_.begin(), rows_.end(), row_order);
  for (size_t i = 1; i < rows_.size(); ++i) {
    if (rows_[i - 1].date == rows_[i].date && rows_[i - 1].station == rows_[i].station) {
      throw ParseError("duplicate (station, date) key: " + rows_[i].station + " " +
                       format_date(rows_[i].date));
    }
  }
}

std::vector<Date> Archive::distinct_dates() const {
  std::vector<Date> dates;
  for (const ForecastCase& r : rows_) {
    if (dates.empty() || dates.back() != r.date) dates.push_back(r.date);
  }
  return dates;
}

std::vector<const ForecastCase*> Archive::rows_on(const Date& date) const {
  return rows_between(date, date);
}

std::vector<const ForecastCase*> Archive::rows_between(const Date& first,
                                                       const Date& last) const {
  std::vector<const ForecastCase*> out;
  for (const ForecastCase& r : rows_) {
    if (first <= r.date && r.date <= last) out.push_back(&r);
  }
  return out;
}

Archive Archive::parse(std::istream& in, std::string_view source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(std::string(source) + ": empty file (missing header)");
  }
  const GroupSpec spec = spec_from_header(split_csv_line(line), source);
  const size_t n_members = static_cast<size_t>(spec.total_members());
  std::vector<ForecastCase> rows;
  std::set<std::pair<std::string, std::string>> keys;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != n_members + 3) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(n_members + 3) + " fields, got " +
                       std::to_string(fields.size()));
    }
    ForecastCase fc;
    fc.station = fields[0];
    if (fc.station.empty()) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) +
                       ": empty station");
    }
    try {
      fc.date = parse_date(fields[1]);
    } catch (const ParseError& e) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!keys.insert({fc.station, fields[1]}).second) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) +
                       ": duplicate (station, date) key: " + fc.station + " " + fields[1]);
    }
    fc.members.resize(n_members);
    for (size_t j = 0; j < n_members; ++j) {
      const std::string& field = fields[2 + j];
      if (field.empty()) continue;
      fc.members[j] = {parse_value(field, source, line_no, "member value"), true};
    }
    if (!fields.back().empty()) {
      fc.observation = parse_value(fields.back(), source, line_no, "observation");
    }
    rows.push_back(std::move(fc));
  }
  return Archive(spec, std::move(rows));
}

Archive Archive::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open: " + path.string());
  return parse(in, path.string());
}

void Archive::write(std::ostream& out) const {
  out << "station,date";
  for (const auto& g : spec_.groups()) {
    for (int l = 1; l <= g.member_count; ++l) {
      out << ',' << g.id << '.' << l;
    }
  }
  out << ",obs\n";
  for (const ForecastCase& r : rows_) {
    out << r.station << ',' << format_date(r.date);
    for (const MemberValue& m : r.members) {
      out << ',';
      if (m.present) out << format_real(m.value);
    }
    out << ',';
    if (r.observation.has_value()) out << format_real(*r.observation);
    out << '\n';
  }
}

void Archive::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open for writing: " + path.string());
  write(out);
  if (!out) throw ParseError("write failed: " + path.string());
}

std::pair<std::vector<ForecastCase>, CompletenessTally> filter_complete(
    std::span<const ForecastCase> cases) {
  std::vector<ForecastCase> usable;
  CompletenessTally tally;
  for (const ForecastCase& fc : cases) {
    if (!fc.ensemble_complete()) {
      ++tally.incomplete_ensemble;
    } else if (!fc.observation.has_value()) {
      ++tally.missing_observation;
    } else {
      ++tally.complete;
      usable.push_back(fc);
    }
  }
  return {std::move(usable), tally};
}

WindowPlan plan_windows(const Archive& archive, int training_days,
                        int min_training_cases) {
  if (archive.empty()) throw ParseError("plan_windows: empty archive");
  if (training_days < 1) {
    throw std::invalid_argument("plan_windows: training length must be positive");
  }
  WindowPlan plan;
  plan.training_days = training_days;
  const std::vector<Date> dates = archive.distinct_dates();
  const Date first = dates.front();
  for (const Date& d : dates) {
    if (days_between(first, d) < training_days) continue;
    const auto window = archive.rows_between(add_days(d, -training_days), add_days(d, -1));
    std::vector<ForecastCase> copy;
    copy.reserve(window.size());
    for (const ForecastCase* p : window) copy.push_back(*p);
    auto [usable, tally] = filter_complete(copy);
    if (static_cast<int>(usable.size()) < min_training_cases) {
      plan.omitted.push_back({d, "insufficient training data (" +
                                     std::to_string(usable.size()) + " usable cases, need " +
                                     std::to_string(min_training_cases) + ")"});
      continue;
    }
    plan.entries.push_back({d, std::move(usable)});
  }
  return plan;
}

}  // namespace tnbma
