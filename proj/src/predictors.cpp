#include "rprv/predictors.hpp"

#include "rprv/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace rprv {

namespace {

void check_window(int t, int horizon) {
  if (t < 0) throw std::invalid_argument("observation time t must be nonnegative");
  if (horizon < 0) throw std::invalid_argument("prediction horizon must be nonnegative");
}

}  // namespace

PredictorModel PredictorModel::hold_last(int t, int horizon) {
  check_window(t, horizon);
  PredictorModel m;
  m.kind_ = PredictorKind::hold_last;
  m.t_ = t;
  m.horizon_ = horizon;
  return m;
}

PredictorModel PredictorModel::constant_velocity(int t, int horizon) {
  check_window(t, horizon);
  if (t < 1) throw std::invalid_argument("constant-velocity prediction needs t >= 1");
  PredictorModel m = hold_last(t, horizon);
  m.kind_ = PredictorKind::constant_velocity;
  return m;
}

PredictorModel PredictorModel::autoregressive(int t, int horizon, std::vector<ArComponent> components) {
  check_window(t, horizon);
  if (components.empty()) throw std::invalid_argument("autoregressive model has no components");
  const std::size_t p = components.front().lags.size();
  if (p < 1) throw std::invalid_argument("autoregressive order must be at least 1");
  if (static_cast<int>(p) > t) throw std::invalid_argument("autoregressive order exceeds t");
  for (const auto& c : components) {
    if (c.lags.size() != p) throw std::invalid_argument("autoregressive components differ in order");
    for (double v : c.lags)
      if (!std::isfinite(v)) throw std::invalid_argument("autoregressive coefficient is not finite");
    if (!std::isfinite(c.intercept)) throw std::invalid_argument("autoregressive intercept is not finite");
  }
  PredictorModel m = hold_last(t, horizon);
  m.kind_ = PredictorKind::autoregressive;
  m.components_ = std::move(components);
  return m;
}

PredictorModel PredictorModel::external(int t, int horizon,
                                        std::map<std::string, std::vector<StateVector>> predictions) {
  check_window(t, horizon);
  for (const auto& [id, states] : predictions)
    if (static_cast<int>(states.size()) != horizon)
      throw InputError("external predictions for '" + id + "' have " + std::to_string(states.size()) +
                       " states, expected " + std::to_string(horizon));
  PredictorModel m = hold_last(t, horizon);
  m.kind_ = PredictorKind::external_file;
  m.external_ = std::move(predictions);
  return m;
}

int PredictorModel::order() const noexcept {
  return components_.empty() ? 0 : static_cast<int>(components_.front().lags.size());
}

PredictorModel PredictorModel::with_fallback_flag() const {
  PredictorModel m = *this;
  m.fell_back_ = true;
  return m;
}

PredictorModel fit_predictor(const std::vector<Trajectory>& training, int t, int horizon,
                             PredictorKind kind, int order) {
  switch (kind) {
    case PredictorKind::hold_last: return PredictorModel::hold_last(t, horizon);
    case PredictorKind::constant_velocity: return PredictorModel::constant_velocity(t, horizon);
    case PredictorKind::external_file:
      throw std::invalid_argument("external predictions are loaded from a file, not fitted");
    case PredictorKind::autoregressive: break;
  }
  if (order < 1 || order > t) throw std::invalid_argument("autoregressive order must lie in [1, t]");
  if (training.empty()) throw InputError("autoregressive fit needs training trajectories");
  const std::size_t n = training.front().dimension();
  const auto needed = static_cast<std::size_t>(t + 1 + horizon);
  std::size_t rows = 0;
  for (const auto& x : training) {
    if (x.dimension() != n) throw InputError("training trajectories differ in dimension");
    if (x.size() < needed) throw InputError("training trajectory shorter than t + 1 + H states");
    rows += needed - static_cast<std::size_t>(order);
  }
  const auto cols = static_cast<Eigen::Index>(order + 1);
  if (rows < static_cast<std::size_t>(cols))
    throw InputError("insufficient training data for autoregressive order " + std::to_string(order));

  std::vector<ArComponent> components(n);
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), cols);
    Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
    Eigen::Index r = 0;
    for (const auto& x : training) {
      for (std::size_t tau = static_cast<std::size_t>(order); tau < needed; ++tau, ++r) {
        for (int k = 0; k < order; ++k) design(r, k) = x.state(tau - 1 - static_cast<std::size_t>(k))[j];
        design(r, order) = 1.0;
        target(r) = x.state(tau)[j];
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < cols) return PredictorModel::hold_last(t, horizon).with_fallback_flag();
    const Eigen::VectorXd beta = qr.solve(target);
    components[j].lags.assign(beta.data(), beta.data() + order);
    components[j].intercept = beta(order);
  }
  return PredictorModel::autoregressive(t, horizon, std::move(components));
}

PredictedTrajectory predict(const PredictorModel& model, const Trajectory& observed) {
  const int t = model.observed_until();
  const int h = model.horizon();
  if (static_cast<int>(observed.size()) != t + 1)
    throw InputError("observed prefix has " + std::to_string(observed.size()) + " states, expected " +
                     std::to_string(t + 1));
  const std::size_t n = observed.dimension();
  std::vector<double> flat(observed.data().begin(), observed.data().end());
  flat.reserve(flat.size() + static_cast<std::size_t>(h) * n);
  const auto at = [&](int tau, std::size_t j) { return flat[static_cast<std::size_t>(tau) * n + j]; };

  switch (model.kind()) {
    case PredictorKind::hold_last:
      for (int k = 1; k <= h; ++k)
        for (std::size_t j = 0; j < n; ++j) flat.push_back(at(t, j));
      break;
    case PredictorKind::constant_velocity:
      for (int k = 1; k <= h; ++k)
        for (std::size_t j = 0; j < n; ++j) flat.push_back(at(t, j) + k * (at(t, j) - at(t - 1, j)));
      break;
    case PredictorKind::autoregressive: {
      if (model.components().size() != n) throw InputError("predictor dimension does not match the prefix");
      const int p = model.order();
      for (int tau = t + 1; tau <= t + h; ++tau) {
        for (std::size_t j = 0; j < n; ++j) {
          const ArComponent& c = model.components()[j];
          double v = c.intercept;
          for (int k = 0; k < p; ++k) v += c.lags[static_cast<std::size_t>(k)] * at(tau - 1 - k, j);
          flat.push_back(v);
        }
      }
      break;
    }
    case PredictorKind::external_file: {
      auto it = model.external_predictions().find(observed.id());
      if (it == model.external_predictions().end())
        throw InputError("no external predictions for trajectory '" + observed.id() + "'");
      for (const auto& s : it->second) {
        if (s.size() != n) throw InputError("external prediction dimension does not match the prefix");
        flat.insert(flat.end(), s.begin(), s.end());
      }
      break;
    }
  }
  return PredictedTrajectory{Trajectory(n, std::move(flat), observed.id()), t, h};
}

PredictedTrajectory predict_from(const PredictorModel& model, const Trajectory& trajectory) {
  return predict(model, trajectory.prefix(static_cast<std::size_t>(model.observed_until() + 1)));
}

PredictorKind predictor_kind_from_name(const std::string& name) {
  if (name == "hold-last") return PredictorKind::hold_last;
  if (name == "constant-velocity") return PredictorKind::constant_velocity;
  if (name == "ar" || name == "autoregressive") return PredictorKind::autoregressive;
  if (name == "external" || name == "external-file") return PredictorKind::external_file;
  throw std::invalid_argument("unknown predictor '" + name + "'");
}

std::string predictor_kind_name(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::hold_last: return "hold-last";
    case PredictorKind::constant_velocity: return "constant-velocity";
    case PredictorKind::autoregressive: return "ar";
    case PredictorKind::external_file: return "external";
  }
  return {};
}

}  // namespace rprv
