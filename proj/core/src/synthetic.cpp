#include "tnbma/synthetic.hpp"

#include <cstdio>

#include "tnbma/errors.hpp"
#include "tnbma/key_value.hpp"
#include "tnbma/rng.hpp"
#include "tnbma/truncated_normal.hpp"

namespace tnbma {

namespace {

std::string station_name(int index, int count) {
  int width = 1;
  for (int c = count; c >= 10 && width < 9; c /= 10) ++width;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "S%0*d", width, (index + 1) % 1000000000);
  return buf;
}

BmaModel model_from_doc(const KeyValueDoc& doc) {
  const GroupSpec spec = GroupSpec::parse(doc.get("groups"));
  std::vector<BmaModel::GroupParams> params;
  for (const auto& g : spec.groups()) {
    BmaModel::GroupParams p;
    p.weight = doc.get_real("group." + g.id + ".weight");
    p.alpha = doc.get_real("group." + g.id + ".alpha");
    p.beta = doc.get_real("group." + g.id + ".beta");
    params.push_back(p);
  }
  try {
    return BmaModel(spec, std::move(params), doc.get_real("sigma"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("synthetic config: ") + e.what());
  }
}

}  // namespace

SynthConfig SynthConfig::defaults() {
  SynthConfig c;
  const GroupSpec spec = GroupSpec::two_group();
  std::vector<BmaModel::GroupParams> params;
  params.push_back({0.3, 0.3, 1.05});   // control
  params.push_back({0.07, 0.5, 0.95});  // perturbed, per member
  c.truth = BmaModel(spec, std::move(params), 1.1);
  return c;
}

SynthConfig SynthConfig::load(const std::filesystem::path& path) {
  const KeyValueDoc doc = KeyValueDoc::load(path);
  SynthConfig c = defaults();
  c.station_count = static_cast<int>(doc.get_int_or("stations", c.station_count));
  c.day_count = static_cast<int>(doc.get_int_or("days", c.day_count));
  if (doc.has("start-date")) c.start_date = parse_date(doc.get("start-date"));
  c.seed = static_cast<std::uint64_t>(doc.get_int_or("seed", static_cast<long long>(c.seed)));
  c.member_noise = doc.get_real_or("member-noise", c.member_noise);
  c.signal_location = doc.get_real_or("signal-location", c.signal_location);
  c.signal_scale = doc.get_real_or("signal-scale", c.signal_scale);
  if (doc.has("groups")) c.truth = model_from_doc(doc);
  if (c.station_count < 1 || c.day_count < 1) {
    throw ParseError("synthetic config: station and day counts must be positive");
  }
  if (c.member_noise < 0.0 || !(c.signal_scale > 0.0)) {
    throw ParseError("synthetic config: member-noise must be >= 0 and signal-scale > 0");
  }
  return c;
}

void SynthConfig::save(const std::filesystem::path& path) const {
  KeyValueDoc doc;
  doc.set_int("stations", station_count);
  doc.set_int("days", day_count);
  doc.set("start-date", format_date(start_date));
  doc.set_int("seed", static_cast<long long>(seed));
  doc.set_real("member-noise", member_noise);
  doc.set_real("signal-location", signal_location);
  doc.set_real("signal-scale", signal_scale);
  doc.set("groups", truth.spec().to_string());
  for (int k = 0; k < truth.spec().group_count(); ++k) {
    const std::string& id = truth.spec().groups()[k].id;
    doc.set_real("group." + id + ".weight", truth.group(k).weight);
    doc.set_real("group." + id + ".alpha", truth.group(k).alpha);
    doc.set_real("group." + id + ".beta", truth.group(k).beta);
  }
  doc.set_real("sigma", truth.sigma());
  doc.save(path);
}

Archive generate_synthetic(const SynthConfig& config) {
  const GroupSpec& spec = config.truth.spec();
  const int n_members = spec.total_members();
  std::vector<int> group_of(n_members);
  std::vector<double> member_weight(n_members);
  for (int k = 0; k < spec.group_count(); ++k) {
    for (int l = 0; l < spec.groups()[k].member_count; ++l) {
      group_of[spec.flat_index(k, l)] = k;
      member_weight[spec.flat_index(k, l)] = config.truth.group(k).weight;
    }
  }
  Rng rng(config.seed);
  const TruncatedNormal signal_dist(config.signal_location, config.signal_scale);
  std::vector<ForecastCase> rows;
  rows.reserve(static_cast<size_t>(config.station_count) * config.day_count);
  for (int day = 0; day < config.day_count; ++day) {
    for (int st = 0; st < config.station_count; ++st) {
      ForecastCase fc;
      fc.station = station_name(st, config.station_count);
      fc.date = add_days(config.start_date, day);
      fc.members.resize(n_members);
      const double signal = signal_dist.sample(rng);
      for (int j = 0; j < n_members; ++j) {
        const double f = config.member_noise > 0.0
                             ? TruncatedNormal(signal, config.member_noise).sample(rng)
                             : signal;
        fc.members[j] = {f, true};
      }
      // Observation from the truth mixture conditional on the members.
      double u = rng.uniform();
      int pick = n_members - 1;
      for (int j = 0; j < n_members; ++j) {
        u -= member_weight[j];
        if (u <= 0.0) {
          pick = j;
          break;
        }
      }
      const int k = group_of[pick];
      const double mu = config.truth.location(k, fc.members[pick].value);
      fc.observation = TruncatedNormal(mu, config.truth.sigma()).sample(rng);
      rows.push_back(std::move(fc));
    }
  }
  return Archive(spec, std::move(rows));
}

}  // namespace tnbma
