#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rprv {

// Nonconformity scores R^(1..K) with a tag naming the score definition that produced them.
class ScoreSet {
 public:
  ScoreSet() = default;
  explicit ScoreSet(std::vector<double> scores, std::string provenance = {});

  std::size_t size() const noexcept { return scores_.size(); }
  const std::vector<double>& values() const noexcept { return scores_; }
  const std::string& provenance() const noexcept { return provenance_; }

 private:
  std::vector<double> scores_;
  std::string provenance_;
};

enum class DivergenceKind { total_variation, generic };

// f-divergence ball D_f(R, R_0) <= epsilon. Total variation uses closed forms; any other
// convex f with f(1) = 0 goes through bisection.
class FDivergence {
 public:
  static FDivergence total_variation(double epsilon);
  // Throws std::invalid_argument if f(1) != 0 or a midpoint-convexity spot check fails.
  static FDivergence generic(std::function<double(double)> f, double epsilon,
                             std::string label = "generic");
  static FDivergence kullback_leibler(double epsilon);
  static FDivergence chi_squared(double epsilon);

  DivergenceKind kind() const noexcept { return kind_; }
  double epsilon() const noexcept { return epsilon_; }
  const std::string& label() const noexcept { return label_; }
  double f(double z) const { return f_(z); }
  FDivergence with_epsilon(double epsilon) const;

 private:
  FDivergence() = default;

  DivergenceKind kind_ = DivergenceKind::total_variation;
  std::function<double(double)> f_;
  double epsilon_ = 0.0;
  std::string label_;
};

// FDivergence by name: "tv", "kl" or "chi2".
FDivergence divergence_from_name(const std::string& name, double epsilon);

struct PredictionRegion {
  double value = 0.0;           // C or C~; +inf when infeasible
  double adjusted_level = 0.0;  // 1 - delta~
  bool feasible = false;
  double delta = 0.0;
  double epsilon = 0.0;
  std::size_t index = 0;  // 1-based order statistic, 0 when infeasible
  std::size_t calibration_size = 0;
};

// ceil(level * K)-th smallest score (at least the first); +inf when level * K exceeds K.
double empirical_quantile(const ScoreSet& scores, double level);

// g(beta) = inf{z in [0,1] | beta f(z/beta) + (1-beta) f((1-z)/(1-beta)) <= eps}.
double g_function(const FDivergence& divergence, double beta);
// g^{-1}(tau) = sup{beta in [0,1] | g(beta) <= tau}.
double g_inverse(const FDivergence& divergence, double tau);

// Quantile at the shift-adjusted level 1 - delta~. Infeasible regions carry value +inf.
PredictionRegion robust_quantile(const ScoreSet& scores, double delta, const FDivergence& divergence);

// Split conformal quantile at level (1 + 1/K)(1 - delta), no shift.
PredictionRegion conformal_quantile(const ScoreSet& scores, double delta);

// Smallest K admitting a finite region, or nullopt when g^{-1}(1 - delta) = 1.
std::optional<std::size_t> min_calibration_size(double delta, const FDivergence& divergence);

}  // namespace rprv
