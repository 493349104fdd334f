#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tnbma/forecast_case.hpp"
#include "tnbma/group_spec.hpp"

namespace tnbma {

// Mixture of zero-truncated normals over exchangeable groups.  Every member
// of group k carries weight weight[k] and location alpha[k] + beta[k] * f;
// all components share one scale sigma, and the member weights satisfy
// sum_k M_k * weight[k] = 1.
class BmaModel {
 public:
  struct GroupParams {
    double weight = 0.0;  // per member of the group
    double alpha = 0.0;
    double beta = 1.0;
  };

  BmaModel() = default;
  BmaModel(GroupSpec spec, std::vector<GroupParams> groups, double sigma);  // validates

  const GroupSpec& spec() const { return spec_; }
  const std::vector<GroupParams>& groups() const { return groups_; }
  const GroupParams& group(int k) const { return groups_[k]; }
  double sigma() const { return sigma_; }

  // Location alpha_k + beta_k * f for a member of group k.
  double location(int k, double forecast) const {
    return groups_[k].alpha + groups_[k].beta * forecast;
  }

  std::string serialize() const;
  static BmaModel deserialize(std::string_view text, std::string_view source = "<text>");
  void save(const std::filesystem::path& path) const;
  static BmaModel load(const std::filesystem::path& path);

 private:
  GroupSpec spec_;
  std::vector<GroupParams> groups_;
  double sigma_ = 1.0;
};

// The predictive mixture for one forecast case: weights and component
// locations frozen, ready for density/CDF/quantile evaluation.  Members
// missing from the case are dropped and the remaining weights renormalized;
// the flag records that this happened.  Component order is canonicalized
// within each group so member permutations cannot perturb results.
class CaseMixture {
 public:
  struct Component {
    double weight;
    double mu;
  };

  CaseMixture(const BmaModel& model, const ForecastCase& fc);

  const std::vector<Component>& components() const { return components_; }
  double sigma() const { return sigma_; }
  bool renormalized() const { return renormalized_; }

  double pdf(double x) const;
  double cdf(double x) const;
  // Inverse CDF by bisection on [0, max location + 12 sigma].
  double quantile(double p) const;
  std::pair<double, double> central_interval(double level) const;

 private:
  std::vector<Component> components_;
  double sigma_;
  bool renormalized_ = false;
};

inline double predictive_pdf(const BmaModel& m, const ForecastCase& fc, double x) {
  return CaseMixture(m, fc).pdf(x);
}
inline double predictive_cdf(const BmaModel& m, const ForecastCase& fc, double x) {
  return CaseMixture(m, fc).cdf(x);
}
inline double predictive_quantile(const BmaModel& m, const ForecastCase& fc, double p) {
  return CaseMixture(m, fc).quantile(p);
}
inline std::pair<double, double> central_interval(const BmaModel& m,
                                                  const ForecastCase& fc,
                                                  double level) {
  return CaseMixture(m, fc).central_interval(level);
}

}  // namespace tnbma
