#include "tnbma/bma_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tnbma/errors.hpp"
#include "tnbma/key_value.hpp"
#include "tnbma/truncated_normal.hpp"

namespace tnbma {

BmaModel::BmaModel(GroupSpec spec, std::vector<GroupParams> groups, double sigma)
    : spec_(std::move(spec)), groups_(std::move(groups)), sigma_(sigma) {
  if (groups_.size() != static_cast<size_t>(spec_.group_count())) {
    throw std::invalid_argument("BmaModel: one parameter set per group required");
  }
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw std::invalid_argument("BmaModel: sigma must be positive and finite");
  }
  double total = 0.0;
  for (int k = 0; k < spec_.group_count(); ++k) {
    const GroupParams& g = groups_[k];
    if (!(g.weight >= 0.0) || !std::isfinite(g.alpha) || !std::isfinite(g.beta)) {
      throw std::invalid_argument("BmaModel: invalid parameters for group '" +
                                  spec_.groups()[k].id + "'");
    }
    total += g.weight * spec_.groups()[k].member_count;
  }
  if (std::fabs(total - 1.0) > 1e-10) {
    throw std::invalid_argument("BmaModel: member weights must sum to 1 (got " +
                                format_real(total) + ")");
  }
}

std::string BmaModel::serialize() const {
  KeyValueDoc doc;
  for (int k = 0; k < spec_.group_count(); ++k) {
    const std::string& id = spec_.groups()[k].id;
    doc.set_int("group." + id + ".members", spec_.groups()[k].member_count);
    doc.set_real("group." + id + ".weight", groups_[k].weight);
    doc.set_real("group." + id + ".alpha", groups_[k].alpha);
    doc.set_real("group." + id + ".beta", groups_[k].beta);
  }
  doc.set_real("sigma", sigma_);
  return doc.to_text();
}

BmaModel BmaModel::deserialize(std::string_view text, std::string_view source) {
  const KeyValueDoc doc = KeyValueDoc::from_text(text, source);
  std::vector<GroupSpec::Group> spec_groups;
  std::vector<GroupParams> params;
  // Groups appear in file order, one 'members' line each.
  for (const auto& [key, value] : doc.entries()) {
    if (key.rfind("group.", 0) != 0) continue;
    const size_t dot = key.rfind('.');
    if (key.substr(dot + 1) != "members") continue;
    const std::string id = key.substr(6, dot - 6);
    GroupSpec::Group g;
    g.id = id;
    g.member_count = static_cast<int>(doc.get_int(key));
    spec_groups.push_back(g);
    GroupParams p;
    p.weight = doc.get_real("group." + id + ".weight");
    p.alpha = doc.get_real("group." + id + ".alpha");
    p.beta = doc.get_real("group." + id + ".beta");
    params.push_back(p);
  }
  if (spec_groups.empty()) {
    throw ParseError(std::string(source) + ": no groups found in model file");
  }
  try {
    return BmaModel(GroupSpec(std::move(spec_groups)), std::move(params),
                    doc.get_real("sigma"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string(source) + ": " + e.what());
  }
}

void BmaModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open for writing: " + path.string());
  out << serialize();
  if (!out) throw ParseError("write failed: " + path.string());
}

BmaModel BmaModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str(), path.string());
}

CaseMixture::CaseMixture(const BmaModel& model, const ForecastCase& fc)
    : sigma_(model.sigma()) {
  const GroupSpec& spec = model.spec();
  if (static_cast<int>(fc.members.size()) != spec.total_members()) {
    throw std::invalid_argument("CaseMixture: case layout does not match group spec");
  }
  components_.reserve(fc.members.size());
  double present_weight = 0.0;
  for (int k = 0; k < spec.group_count(); ++k) {
    const int count = spec.groups()[k].member_count;
    const size_t first = components_.size();
    for (int l = 0; l < count; ++l) {
      const MemberValue& mv = fc.members[spec.flat_index(k, l)];
      if (!mv.present) {
        renormalized_ = true;
        continue;
      }
      components_.push_back({model.group(k).weight, model.location(k, mv.value)});
      present_weight += model.group(k).weight;
    }
    // Canonical within-group order: exchangeable members commute exactly.
    std::sort(components_.begin() + first, components_.end(),
              [](const Component& a, const Component& b) { return a.mu < b.mu; });
  }
  if (components_.empty()) {
    throw std::invalid_argument("CaseMixture: no ensemble members present for " +
                                fc.station + " " + format_date(fc.date));
  }
  if (renormalized_) {
    for (Component& c : components_) c.weight /= present_weight;
  }
}

double CaseMixture::pdf(double x) const {
  if (x < 0.0) return 0.0;
  double sum = 0.0;
  for (const Component& c : components_) {
    sum += c.weight * TruncatedNormal(c.mu, sigma_).pdf(x);
  }
  return sum;
}

double CaseMixture::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  double sum = 0.0;
  for (const Component& c : components_) {
    sum += c.weight * TruncatedNormal(c.mu, sigma_).cdf(x);
  }
  return sum;
}

double CaseMixture::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("CaseMixture::quantile: p must lie in (0, 1)");
  }
  double lo = 0.0;
  double max_mu = components_.front().mu;
  for (const Component& c : components_) max_mu = std::max(max_mu, c.mu);
  double hi = std::max(max_mu + 12.0 * sigma_, 12.0 * sigma_);
  for (int i = 0; i < 64 && cdf(hi) < p; ++i) hi *= 2.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-9; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> CaseMixture::central_interval(double level) const {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("CaseMixture::central_interval: level must lie in (0, 1)");
  }
  const double tail = 0.5 * (1.0 - level);
  return {quantile(tail), quantile(1.0 - tail)};
}

}  // namespace tnbma
