#pragma once

#include "rprv/conformal.hpp"
#include "rprv/formula.hpp"
#include "rprv/predictors.hpp"
#include "rprv/semantics.hpp"
#include "rprv/trajectory.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rprv {

enum class Method { direct, variant1, variant2, adaptive_direct };
enum class BallNorm { l2, linf };

Method method_from_name(const std::string& name);
std::string method_name(Method method);
BallNorm norm_from_name(const std::string& name);
std::string norm_name(BallNorm norm);

// H = tau0 + L^phi - t.
int prediction_horizon(const Formula& phi, int tau0, int t);

// alpha_tau and alpha_{pi,tau}, estimated on trajectories disjoint from calibration.
struct NormalizationConstants {
  std::map<int, double> state;
  std::map<std::pair<std::string, int>, double> predicate;
  double floor = 1e-8;
  bool floored = false;  // some raw maximum fell below the floor

  double state_at(int tau) const;
  double predicate_at(const std::string& name, int tau) const;
};

struct VerificationOutcome {
  double rho_star = 0.0;
  PredictionRegion region;
  double confidence = 0.0;  // 1 - delta
  Method method = Method::direct;
  std::optional<PredicateBoundMap> predicate_bounds;  // indirect methods only
  bool satisfied = false;                             // rho_star > 0
  double predicted_robustness = 0.0;                  // rho^phi(X^, tau0)
  double omega = 1.0;                                 // adaptive weight at this observation
};

// omega(X_obs) > 0, an estimate of |R| from the observed prefix.
class AdaptiveWeightModel {
 public:
  static AdaptiveWeightModel constant(double value);
  // Mean reference magnitude over the k nearest prefixes, comparing the last `window` states.
  static AdaptiveWeightModel nearest_neighbors(std::vector<Trajectory> reference_prefixes,
                                               std::vector<double> reference_magnitudes, std::size_t k,
                                               std::size_t window = 10, double floor = 1e-8);

  double weight(const Trajectory& observed) const;
  bool is_constant() const noexcept { return references_.empty(); }
  double floor() const noexcept { return floor_; }

 private:
  AdaptiveWeightModel() = default;

  double constant_ = 1.0;
  std::vector<Trajectory> references_;
  std::vector<double> magnitudes_;
  std::size_t k_ = 1;
  std::size_t window_ = 10;
  double floor_ = 1e-8;
};

// R = rho^phi(X^, tau0) - rho^phi(X, tau0), one per calibration trajectory in input order.
ScoreSet direct_scores(const Formula& phi, const std::vector<Trajectory>& calibration,
                       const PredictorModel& model, int tau0);

NormalizationConstants normalization_constants(const std::vector<Trajectory>& aux,
                                               const PredictorModel& model, const Formula& phi_pnf,
                                               BallNorm norm = BallNorm::l2, double floor = 1e-8);

// R = max_tau ||X_tau - X^_tau|| / alpha_tau over tau = t+1..t+H.
ScoreSet variant1_scores(const std::vector<Trajectory>& calibration, const PredictorModel& model,
                         const NormalizationConstants& alphas, BallNorm norm = BallNorm::l2);

// R = max_{(pi,tau) in P} (rho^pi(X^, tau) - rho^pi(X, tau)) / alpha_{pi,tau}; signed.
ScoreSet variant2_scores(const Formula& phi_pnf, const std::vector<Trajectory>& calibration,
                         const PredictorModel& model, const NormalizationConstants& alphas, int tau0);

// inf of h over the ball of the given radius around `center`.
double predicate_ball_infimum(const Predicate& predicate, std::span<const double> center, double radius,
                              BallNorm norm = BallNorm::l2);

AdaptiveWeightModel fit_adaptive_weights(const Formula& phi, const std::vector<Trajectory>& aux,
                                         const PredictorModel& model, int tau0, std::size_t k,
                                         std::size_t window = 10, double floor = 1e-8);

// R / omega(X_obs) for each prefix.
ScoreSet adaptive_rescale(const ScoreSet& scores, const AdaptiveWeightModel& omega,
                          const std::vector<Trajectory>& prefixes);

struct MonitorSettings {
  Method method = Method::direct;
  int tau0 = 0;
  double delta = 0.2;
  FDivergence divergence = FDivergence::total_variation(0.0);
  BallNorm norm = BallNorm::l2;
  double alpha_floor = 1e-8;
};

// Calibrated once, then verifies any number of observed prefixes.
class RuntimeMonitor {
 public:
  // `aux` supplies the normalization constants (indirect) or the adaptive weights when
  // `omega` is not given; it must be independent of `calibration`.
  RuntimeMonitor(Formula phi, const std::vector<Trajectory>& calibration, const std::vector<Trajectory>& aux,
                 PredictorModel model, MonitorSettings settings,
                 std::optional<AdaptiveWeightModel> omega = std::nullopt, std::size_t adaptive_k = 10);

  // `observed` holds exactly t + 1 states.
  VerificationOutcome verify(const Trajectory& observed) const;

  // Same scores, region recomputed for another divergence ball.
  RuntimeMonitor with_divergence(const FDivergence& divergence) const;

  const Formula& formula() const noexcept { return phi_; }
  const Formula& positive_formula() const noexcept { return phi_pnf_; }
  const ScoreSet& scores() const noexcept { return scores_; }
  const PredictionRegion& region() const noexcept { return region_; }
  const MonitorSettings& settings() const noexcept { return settings_; }
  const PredictorModel& model() const noexcept { return model_; }
  const std::optional<NormalizationConstants>& normalization() const noexcept { return alphas_; }
  const std::vector<PredicateTime>& future_pairs() const noexcept { return pairs_; }

 private:
  Formula phi_;
  Formula phi_pnf_;
  PredictorModel model_;
  MonitorSettings settings_;
  std::optional<NormalizationConstants> alphas_;
  std::optional<AdaptiveWeightModel> omega_;
  std::vector<PredicateTime> pairs_;
  ScoreSet scores_;
  PredictionRegion region_;
};

VerificationOutcome direct_verify(const Formula& phi, const std::vector<Trajectory>& calibration,
                                  const PredictorModel& model, const Trajectory& observed, double delta,
                                  const FDivergence& divergence, int tau0);

VerificationOutcome variant1_verify(const Formula& phi, const std::vector<Trajectory>& calibration,
                                    const std::vector<Trajectory>& aux, const PredictorModel& model,
                                    const Trajectory& observed, double delta, const FDivergence& divergence,
                                    int tau0, BallNorm norm = BallNorm::l2);

VerificationOutcome variant2_verify(const Formula& phi, const std::vector<Trajectory>& calibration,
                                    const std::vector<Trajectory>& aux, const PredictorModel& model,
                                    const Trajectory& observed, double delta, const FDivergence& divergence,
                                    int tau0);

}  // namespace rprv
