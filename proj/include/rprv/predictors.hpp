#pragma once

#include "rprv/trajectory.hpp"

#include <map>
#include <string>
#include <vector>

namespace rprv {

enum class PredictorKind { hold_last, constant_velocity, autoregressive, external_file };

// x_tau[j] = intercept + sum_k lags[k] * x_{tau-1-k}[j]
struct ArComponent {
  std::vector<double> lags;
  double intercept = 0.0;
};

// Maps an observed prefix X_0..X_t to predictions X^_{t+1|t}..X^_{t+H|t}.
class PredictorModel {
 public:
  static PredictorModel hold_last(int t, int horizon);
  static PredictorModel constant_velocity(int t, int horizon);
  static PredictorModel autoregressive(int t, int horizon, std::vector<ArComponent> components);
  static PredictorModel external(int t, int horizon,
                                 std::map<std::string, std::vector<StateVector>> predictions);

  PredictorKind kind() const noexcept { return kind_; }
  int observed_until() const noexcept { return t_; }
  int horizon() const noexcept { return horizon_; }
  int order() const noexcept;
  const std::vector<ArComponent>& components() const noexcept { return components_; }
  const std::map<std::string, std::vector<StateVector>>& external_predictions() const noexcept {
    return external_;
  }
  // Set when an autoregressive fit was singular and the model fell back to hold-last.
  bool fell_back() const noexcept { return fell_back_; }
  PredictorModel with_fallback_flag() const;

 private:
  PredictorModel() = default;

  PredictorKind kind_ = PredictorKind::hold_last;
  int t_ = 0;
  int horizon_ = 0;
  std::vector<ArComponent> components_;
  std::map<std::string, std::vector<StateVector>> external_;
  bool fell_back_ = false;
};

// X^ = (X_obs, predictions); `full` has t + 1 + H states and shares the prefix bit-for-bit.
struct PredictedTrajectory {
  Trajectory full;
  int t = 0;
  int horizon = 0;

  std::span<const double> predicted(int tau) const { return full.state(static_cast<std::size_t>(tau)); }
};

// Fits per-component least squares on lagged windows for the autoregressive kind; the other
// built-in kinds need no data. The training set must be disjoint from calibration data.
PredictorModel fit_predictor(const std::vector<Trajectory>& training, int t, int horizon,
                             PredictorKind kind, int order = 1);

// `observed` must hold exactly t + 1 states; external models look up observed.id().
PredictedTrajectory predict(const PredictorModel& model, const Trajectory& observed);

// Uses the first t + 1 states of a full trajectory as the observation.
PredictedTrajectory predict_from(const PredictorModel& model, const Trajectory& trajectory);

PredictorKind predictor_kind_from_name(const std::string& name);
std::string predictor_kind_name(PredictorKind kind);

}  // namespace rprv
