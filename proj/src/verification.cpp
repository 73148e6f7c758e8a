#include "rprv/verification.hpp"

#include "rprv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rprv {

namespace {

double state_distance(std::span<const double> a, std::span<const double> b, BallNorm norm) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = std::abs(a[j] - b[j]);
    acc = norm == BallNorm::l2 ? acc + d * d : std::max(acc, d);
  }
  return norm == BallNorm::l2 ? std::sqrt(acc) : acc;
}

double robustness_gap(double predicted, double actual) {
  if (predicted == actual) return 0.0;
  const double gap = predicted - actual;
  if (!std::isfinite(gap)) throw InputError("nonconformity score is not finite");
  return gap;
}

void check_horizon_matches(const Formula& phi, const PredictorModel& model, int tau0) {
  const int h = prediction_horizon(phi, tau0, model.observed_until());
  if (h != model.horizon())
    throw InputError("predictor horizon " + std::to_string(model.horizon()) + " differs from tau0 + L - t = " +
                     std::to_string(h));
}

std::vector<Trajectory> prefixes_of(const std::vector<Trajectory>& xs, int t) {
  std::vector<Trajectory> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.prefix(static_cast<std::size_t>(t + 1)));
  return out;
}

}  // namespace

Method method_from_name(const std::string& name) {
  if (name == "direct") return Method::direct;
  if (name == "variant1") return Method::variant1;
  if (name == "variant2") return Method::variant2;
  if (name == "adaptive-direct") return Method::adaptive_direct;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::direct: return "direct";
    case Method::variant1: return "variant1";
    case Method::variant2: return "variant2";
    case Method::adaptive_direct: return "adaptive-direct";
  }
  return {};
}

BallNorm norm_from_name(const std::string& name) {
  if (name == "l2") return BallNorm::l2;
  if (name == "linf") return BallNorm::linf;
  throw std::invalid_argument("unknown norm '" + name + "' (expected l2 or linf)");
}

std::string norm_name(BallNorm norm) { return norm == BallNorm::l2 ? "l2" : "linf"; }

int prediction_horizon(const Formula& phi, int tau0, int t) {
  const int h = tau0 + formula_length(phi) - t;
  if (h < 0) throw InputError("formula is decided before time t; nothing to predict");
  return h;
}

double NormalizationConstants::state_at(int tau) const {
  auto it = state.find(tau);
  if (it == state.end()) throw InputError("no normalization constant for time " + std::to_string(tau));
  return it->second;
}

double NormalizationConstants::predicate_at(const std::string& name, int tau) const {
  auto it = predicate.find({name, tau});
  if (it == predicate.end())
    throw InputError("no normalization constant for " + name + "@" + std::to_string(tau));
  return it->second;
}

AdaptiveWeightModel AdaptiveWeightModel::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw std::invalid_argument("adaptive weight must be positive");
  AdaptiveWeightModel m;
  m.constant_ = value;
  return m;
}

AdaptiveWeightModel AdaptiveWeightModel::nearest_neighbors(std::vector<Trajectory> reference_prefixes,
                                                           std::vector<double> reference_magnitudes,
                                                           std::size_t k, std::size_t window, double floor) {
  if (reference_prefixes.empty()) throw std::invalid_argument("adaptive weights need reference prefixes");
  if (reference_prefixes.size() != reference_magnitudes.size())
    throw std::invalid_argument("reference prefixes and magnitudes differ in count");
  if (k == 0 || window == 0) throw std::invalid_argument("k and window must be positive");
  if (!(floor > 0.0)) throw std::invalid_argument("adaptive weight floor must be positive");
  AdaptiveWeightModel m;
  m.references_ = std::move(reference_prefixes);
  m.magnitudes_ = std::move(reference_magnitudes);
  m.k_ = std::min(k, m.references_.size());
  m.window_ = window;
  m.floor_ = floor;
  return m;
}

double AdaptiveWeightModel::weight(const Trajectory& observed) const {
  if (references_.empty()) return constant_;
  const std::size_t n = observed.dimension();
  std::vector<std::pair<double, double>> dist;
  dist.reserve(references_.size());
  for (std::size_t r = 0; r < references_.size(); ++r) {
    const Trajectory& ref = references_[r];
    if (ref.dimension() != n) throw InputError("adaptive reference dimension mismatch");
    const std::size_t w = std::min({window_, ref.size(), observed.size()});
    double d = 0.0;
    for (std::size_t i = 1; i <= w; ++i) {
      auto a = observed.state(observed.size() - i);
      auto b = ref.state(ref.size() - i);
      for (std::size_t j = 0; j < n; ++j) d += (a[j] - b[j]) * (a[j] - b[j]);
    }
    dist.emplace_back(d, magnitudes_[r]);
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k_; ++i) sum += dist[i].second;
  return std::max(floor_, sum / static_cast<double>(k_));
}

ScoreSet direct_scores(const Formula& phi, const std::vector<Trajectory>& calibration,
                       const PredictorModel& model, int tau0) {
  check_horizon_matches(phi, model, tau0);
  std::vector<double> scores;
  scores.reserve(calibration.size());
  for (const auto& x : calibration) {
    const PredictedTrajectory xhat = predict_from(model, x);
    scores.push_back(robustness_gap(eval_robustness(phi, xhat.full, tau0), eval_robustness(phi, x, tau0)));
  }
  return ScoreSet(std::move(scores), "direct");
}

NormalizationConstants normalization_constants(const std::vector<Trajectory>& aux, const PredictorModel& model,
                                               const Formula& phi_pnf, BallNorm norm, double floor) {
  if (aux.empty()) throw InputError("normalization needs at least one auxiliary trajectory");
  if (!(floor > 0.0)) throw std::invalid_argument("normalization floor must be positive");
  const int t = model.observed_until();
  const int h = model.horizon();
  const auto predicates = collect_predicates(phi_pnf);
  NormalizationConstants alphas;
  alphas.floor = floor;
  for (int tau = t + 1; tau <= t + h; ++tau) {
    alphas.state[tau] = 0.0;
    for (const auto& p : predicates) alphas.predicate[{p.name(), tau}] = 0.0;
  }
  for (const auto& x : aux) {
    const PredictedTrajectory xhat = predict_from(model, x);
    for (int tau = t + 1; tau <= t + h; ++tau) {
      const auto truth = x.state(static_cast<std::size_t>(tau));
      const auto guess = xhat.predicted(tau);
      double& a = alphas.state[tau];
      a = std::max(a, state_distance(truth, guess, norm));
      for (const auto& p : predicates) {
        double& ap = alphas.predicate[{p.name(), tau}];
        ap = std::max(ap, std::abs(p.evaluate(guess) - p.evaluate(truth)));
      }
    }
  }
  const auto clamp = [&](double& v) {
    if (v < floor) {
      v = floor;
      alphas.floored = true;
    }
  };
  for (auto& [tau, v] : alphas.state) clamp(v);
  for (auto& [key, v] : alphas.predicate) clamp(v);
  return alphas;
}

ScoreSet variant1_scores(const std::vector<Trajectory>& calibration, const PredictorModel& model,
                         const NormalizationConstants& alphas, BallNorm norm) {
  const int t = model.observed_until();
  const int h = model.horizon();
  std::vector<double> scores;
  scores.reserve(calibration.size());
  for (const auto& x : calibration) {
    const PredictedTrajectory xhat = predict_from(model, x);
    double r = h == 0 ? 0.0 : -kInfinity;
    for (int tau = t + 1; tau <= t + h; ++tau)
      r = std::max(r, state_distance(x.state(static_cast<std::size_t>(tau)), xhat.predicted(tau), norm) /
                          alphas.state_at(tau));
    scores.push_back(r);
  }
  return ScoreSet(std::move(scores), "variant1");
}

ScoreSet variant2_scores(const Formula& phi_pnf, const std::vector<Trajectory>& calibration,
                         const PredictorModel& model, const NormalizationConstants& alphas, int tau0) {
  const int t = model.observed_until();
  const auto pairs = predicate_time_pairs(phi_pnf, tau0, t);
  std::vector<double> scores;
  scores.reserve(calibration.size());
  for (const auto& x : calibration) {
    const PredictedTrajectory xhat = predict_from(model, x);
    double r = pairs.empty() ? 0.0 : -kInfinity;
    for (const auto& [pred, tau] : pairs) {
      const double gap =
          pred.evaluate(xhat.predicted(tau)) - pred.evaluate(x.state(static_cast<std::size_t>(tau)));
      r = std::max(r, gap / alphas.predicate_at(pred.name(), tau));
    }
    scores.push_back(r);
  }
  return ScoreSet(std::move(scores), "variant2");
}

double predicate_ball_infimum(const Predicate& predicate, std::span<const double> center, double radius,
                              BallNorm norm) {
  if (!(radius >= 0.0)) throw std::invalid_argument("ball radius must be nonnegative");
  if (radius == 0.0) return predicate.evaluate(center);
  switch (predicate.kind()) {
    case PredicateKind::affine: {
      // Dual norm of the ball norm.
      double dual = 0.0;
      for (double a : predicate.coefficients()) dual += norm == BallNorm::l2 ? a * a : std::abs(a);
      if (norm == BallNorm::l2) dual = std::sqrt(dual);
      return predicate.evaluate(center) - radius * dual;
    }
    case PredicateKind::norm_inside:
    case PredicateKind::norm_outside: {
      const bool inside = predicate.kind() == PredicateKind::norm_inside;
      double dist = 0.0;
      if (norm == BallNorm::l2) {
        // The projection of the ball onto the selected components has the same radius.
        const double d = predicate.distance_to_center(center);
        dist = inside ? d + radius : std::max(d - radius, 0.0);
      } else {
        // Farthest / nearest point of a box from p, per component.
        double acc = 0.0;
        for (std::size_t i = 0; i < predicate.selector().size(); ++i) {
          const double gap = std::abs(center[predicate.selector()[i]] - predicate.center()[i]);
          const double e = inside ? gap + radius : std::max(gap - radius, 0.0);
          acc += e * e;
        }
        dist = std::sqrt(acc);
      }
      return inside ? predicate.threshold() - dist : dist - predicate.threshold();
    }
  }
  return -kInfinity;
}

AdaptiveWeightModel fit_adaptive_weights(const Formula& phi, const std::vector<Trajectory>& aux,
                                         const PredictorModel& model, int tau0, std::size_t k, std::size_t window,
                                         double floor) {
  const ScoreSet r = direct_scores(phi, aux, model, tau0);
  std::vector<double> magnitudes;
  magnitudes.reserve(r.size());
  for (double v : r.values()) magnitudes.push_back(std::abs(v));
  return AdaptiveWeightModel::nearest_neighbors(prefixes_of(aux, model.observed_until()), std::move(magnitudes), k,
                                                window, floor);
}

ScoreSet adaptive_rescale(const ScoreSet& scores, const AdaptiveWeightModel& omega,
                          const std::vector<Trajectory>& prefixes) {
  if (prefixes.size() != scores.size()) throw std::invalid_argument("one prefix per score is required");
  std::vector<double> out;
  out.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double w = omega.weight(prefixes[i]);
    if (!(w > 0.0)) throw std::invalid_argument("adaptive weight must be positive");
    out.push_back(scores.values()[i] / w);
  }
  return ScoreSet(std::move(out), scores.provenance() + "/adaptive");
}

RuntimeMonitor::RuntimeMonitor(Formula phi, const std::vector<Trajectory>& calibration,
                               const std::vector<Trajectory>& aux, PredictorModel model, MonitorSettings settings,
                               std::optional<AdaptiveWeightModel> omega, std::size_t adaptive_k)
    : phi_{std::move(phi)},
      phi_pnf_{to_positive_normal_form(phi_)},
      model_{std::move(model)},
      settings_{std::move(settings)},
      omega_{std::move(omega)} {
  if (calibration.empty()) throw InputError("calibration set is empty");
  check_horizon_matches(phi_, model_, settings_.tau0);
  const int t = model_.observed_until();
  switch (settings_.method) {
    case Method::direct: scores_ = direct_scores(phi_, calibration, model_, settings_.tau0); break;
    case Method::adaptive_direct:
      if (!omega_)
        omega_ = fit_adaptive_weights(phi_, aux, model_, settings_.tau0, adaptive_k, 10, settings_.alpha_floor);
      scores_ = adaptive_rescale(direct_scores(phi_, calibration, model_, settings_.tau0), *omega_,
                                 prefixes_of(calibration, t));
      break;
    case Method::variant1:
      alphas_ = normalization_constants(aux, model_, phi_pnf_, settings_.norm, settings_.alpha_floor);
      scores_ = variant1_scores(calibration, model_, *alphas_, settings_.norm);
      break;
    case Method::variant2:
      alphas_ = normalization_constants(aux, model_, phi_pnf_, settings_.norm, settings_.alpha_floor);
      scores_ = variant2_scores(phi_pnf_, calibration, model_, *alphas_, settings_.tau0);
      break;
  }
  if (settings_.method == Method::variant1 || settings_.method == Method::variant2)
    pairs_ = predicate_time_pairs(phi_pnf_, settings_.tau0, t);
  region_ = robust_quantile(scores_, settings_.delta, settings_.divergence);
}

RuntimeMonitor RuntimeMonitor::with_divergence(const FDivergence& divergence) const {
  RuntimeMonitor copy = *this;
  copy.settings_.divergence = divergence;
  copy.region_ = robust_quantile(scores_, settings_.delta, divergence);
  return copy;
}

VerificationOutcome RuntimeMonitor::verify(const Trajectory& observed) const {
  const PredictedTrajectory xhat = predict(model_, observed);
  const int tau0 = settings_.tau0;
  const double c = region_.value;

  VerificationOutcome out;
  out.region = region_;
  out.confidence = 1.0 - settings_.delta;
  out.method = settings_.method;
  out.predicted_robustness = eval_robustness(phi_, xhat.full, tau0);

  switch (settings_.method) {
    case Method::direct: out.rho_star = out.predicted_robustness - c; break;
    case Method::adaptive_direct:
      out.omega = omega_->weight(observed);
      out.rho_star = out.predicted_robustness - c * out.omega;
      break;
    case Method::variant1:
    case Method::variant2: {
      PredicateBoundMap bounds(model_.observed_until(), model_.horizon());
      for (const auto& [pred, tau] : pairs_) {
        const auto center = xhat.predicted(tau);
        const double bound = settings_.method == Method::variant1
                                 ? predicate_ball_infimum(pred, center, c * alphas_->state_at(tau), settings_.norm)
                                 : pred.evaluate(center) - c * alphas_->predicate_at(pred.name(), tau);
        bounds.set(pred.name(), tau, bound);
      }
      out.rho_star = eval_probabilistic_robustness(phi_pnf_, observed, bounds, tau0);
      out.predicate_bounds = std::move(bounds);
      break;
    }
  }
  if (!region_.feasible || std::isnan(out.rho_star)) out.rho_star = -kInfinity;
  out.satisfied = out.rho_star > 0.0;
  return out;
}

VerificationOutcome direct_verify(const Formula& phi, const std::vector<Trajectory>& calibration,
                                  const PredictorModel& model, const Trajectory& observed, double delta,
                                  const FDivergence& divergence, int tau0) {
  MonitorSettings s{Method::direct, tau0, delta, divergence, BallNorm::l2, 1e-8};
  return RuntimeMonitor(phi, calibration, {}, model, s).verify(observed);
}

VerificationOutcome variant1_verify(const Formula& phi, const std::vector<Trajectory>& calibration,
                                    const std::vector<Trajectory>& aux, const PredictorModel& model,
                                    const Trajectory& observed, double delta, const FDivergence& divergence,
                                    int tau0, BallNorm norm) {
  MonitorSettings s{Method::variant1, tau0, delta, divergence, norm, 1e-8};
  return RuntimeMonitor(phi, calibration, aux, model, s).verify(observed);
}

VerificationOutcome variant2_verify(const Formula& phi, const std::vector<Trajectory>& calibration,
                                    const std::vector<Trajectory>& aux, const PredictorModel& model,
                                    const Trajectory& observed, double delta, const FDivergence& divergence,
                                    int tau0) {
  MonitorSettings s{Method::variant2, tau0, delta, divergence, BallNorm::l2, 1e-8};
  return RuntimeMonitor(phi, calibration, aux, model, s).verify(observed);
}

}  // namespace rprv
