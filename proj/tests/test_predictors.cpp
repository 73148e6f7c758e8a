#include "rprv/error.hpp"
#include "rprv/predictors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rprv;

namespace {

Trajectory scalar(std::vector<double> v, std::string id = {}) { return Trajectory(1, std::move(v), std::move(id)); }

}  // namespace

TEST_CASE("baseline predictors") {
  const auto cv = predict(PredictorModel::constant_velocity(2, 2), scalar({0, 1, 2}));
  CHECK(cv.predicted(3)[0] == 3.0);
  CHECK(cv.predicted(4)[0] == 4.0);

  const Trajectory obs(2, {1, 2, 3, 4}, "a");
  const auto hl = predict(PredictorModel::hold_last(1, 3), obs);
  CHECK(hl.full.size() == 5);
  for (int tau = 2; tau <= 4; ++tau) {
    CHECK(hl.predicted(tau)[0] == 3.0);
    CHECK(hl.predicted(tau)[1] == 4.0);
  }
  CHECK(hl.full.id() == "a");
  CHECK_THROWS_AS(predict(PredictorModel::hold_last(2, 1), obs), InputError);
  CHECK_THROWS(PredictorModel::constant_velocity(0, 1));
}

TEST_CASE("autoregressive prediction is applied recursively") {
  const auto model = PredictorModel::autoregressive(1, 2, {ArComponent{{0.9}, 0.0}});
  const auto p = predict(model, scalar({4, 10}));
  CHECK(p.predicted(2)[0] == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(p.predicted(3)[0] == doctest::Approx(8.1).epsilon(1e-15));
  CHECK_THROWS(PredictorModel::autoregressive(1, 2, {ArComponent{{0.9, 0.1}, 0.0}}));  // order > t
}

TEST_CASE("AR(1) fit recovers an exact recurrence") {
  std::vector<Trajectory> training;
  for (double x0 : {1.0, -3.0, 7.5, 0.2}) {
    std::vector<double> v{x0};
    for (int k = 0; k < 9; ++k) v.push_back(0.9 * v.back());
    training.push_back(scalar(v));
  }
  const auto model = fit_predictor(training, 5, 4, PredictorKind::autoregressive, 1);
  REQUIRE(model.kind() == PredictorKind::autoregressive);
  CHECK(std::abs(model.components()[0].lags[0] - 0.9) <= 1e-8);
  CHECK(std::abs(model.components()[0].intercept) <= 1e-8);
}

TEST_CASE("AR(1) fit equals the closed-form least-squares solution") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n;
  std::vector<Trajectory> training;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> v{n(rng)};
    for (int k = 0; k < 7; ++k) v.push_back(0.5 + 0.7 * v.back() + 0.3 * n(rng));
    training.push_back(scalar(v));
  }
  // Simple regression of x_tau on x_{tau-1} over the fitting window tau = 1..t+H.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (const auto& x : training)
    for (std::size_t tau = 1; tau < 8; ++tau) {
      const double a = x.state(tau - 1)[0], b = x.state(tau)[0];
      sx += a, sy += b, sxx += a * a, sxy += a * b, m += 1;
    }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / m;
  const auto model = fit_predictor(training, 4, 3, PredictorKind::autoregressive, 1);
  CHECK(model.components()[0].lags[0] == doctest::Approx(slope).epsilon(1e-10));
  CHECK(model.components()[0].intercept == doctest::Approx(intercept).epsilon(1e-10));
}

TEST_CASE("singular autoregressive fit falls back to hold-last") {
  const std::vector<Trajectory> flat{scalar({2, 2, 2, 2, 2}), scalar({2, 2, 2, 2, 2})};
  const auto model = fit_predictor(flat, 2, 2, PredictorKind::autoregressive, 1);
  CHECK(model.kind() == PredictorKind::hold_last);
  CHECK(model.fell_back());
  CHECK_THROWS(fit_predictor(flat, 2, 2, PredictorKind::autoregressive, 3));
  CHECK_THROWS_AS(fit_predictor({scalar({1, 2})}, 2, 2, PredictorKind::autoregressive, 1), InputError);
}

TEST_CASE("external predictions round-trip bit-exactly") {
  const std::vector<StateVector> stored{{0.1 + 0.2}, {1.0 / 3.0}};
  const auto model = PredictorModel::external(1, 2, {{"a", stored}});
  const auto p = predict(model, scalar({5, 6}, "a"));
  CHECK(p.predicted(2)[0] == stored[0][0]);
  CHECK(p.predicted(3)[0] == stored[1][0]);
  CHECK_THROWS_AS(predict(model, scalar({5, 6}, "b")), InputError);
  CHECK_THROWS(PredictorModel::external(1, 3, {{"a", stored}}));
}

TEST_CASE("property: predictions keep the observed prefix and are deterministic") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n;
  std::vector<Trajectory> training;
  for (int i = 0; i < 10; ++i) {
    std::vector<double> v(16);
    for (auto& x : v) x = n(rng);
    training.emplace_back(2, v);
  }
  for (auto kind : {PredictorKind::hold_last, PredictorKind::constant_velocity, PredictorKind::autoregressive}) {
    const auto model = fit_predictor(training, 4, 3, kind, 2);
    const auto obs = training[3].prefix(5);
    const auto a = predict(model, obs);
    const auto b = predict_from(model, training[3]);
    CHECK(a.full == b.full);
    for (std::size_t tau = 0; tau < 5; ++tau)
      for (std::size_t j = 0; j < 2; ++j) CHECK(a.full.state(tau)[j] == obs.state(tau)[j]);
  }
  CHECK(predictor_kind_from_name(predictor_kind_name(PredictorKind::constant_velocity)) ==
        PredictorKind::constant_velocity);
}
