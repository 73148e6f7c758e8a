#include "rprv/error.hpp"
#include "rprv/parser.hpp"
#include "rprv/shift.hpp"
#include "rprv/verification.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace rprv;

namespace {

std::vector<double> normal_draws(std::uint64_t seed, std::size_t m, double mean, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(mean, sd);
  std::vector<double> v(m);
  for (auto& x : v) x = n(rng);
  return v;
}

double normal_pdf(double x, double mean) { return std::exp(-0.5 * (x - mean) * (x - mean)) / std::sqrt(2 * std::numbers::pi); }

// 0.5 * integral |p - q| for two unit-variance normals, by Simpson's rule on [-12, 13].
double analytic_tv(double mean_a, double mean_b) {
  const int n = 200000;
  const double lo = -12.0, hi = 13.0, h = (hi - lo) / n;
  double acc = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    acc += w * std::abs(normal_pdf(x, mean_a) - normal_pdf(x, mean_b));
  }
  return 0.5 * acc * h / 3.0;
}

}  // namespace

TEST_CASE("analytic oracle matches 2 Phi(1/2) - 1") {
  CHECK(analytic_tv(0, 1) == doctest::Approx(std::erf(0.5 / std::sqrt(2.0))).epsilon(1e-9));
}

TEST_CASE("kernel density estimate") {
  const KernelDensity kde(normal_draws(1, 10000, 0.0));
  CHECK(std::abs(kde.density(0.0) - 0.3989) <= 0.02);
  CHECK(kde.bandwidth() == doctest::Approx(silverman_bandwidth(kde.samples())));

  // integrates to one
  const auto grid = kde.on_grid(-10, 0.002, 10001);
  double mass = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) mass += (i == 0 || i + 1 == grid.size() ? 0.5 : 1.0) * grid[i];
  CHECK(std::abs(mass * 0.002 - 1.0) <= 1e-3);

  // grid evaluation agrees with pointwise evaluation
  const auto coarse = kde.on_grid(-2, 0.5, 9);
  for (std::size_t i = 0; i < coarse.size(); ++i)
    CHECK(coarse[i] == doctest::Approx(kde.density(-2 + 0.5 * static_cast<double>(i))).epsilon(1e-7));

  // the binned fine grid stays close to exact evaluation
  for (std::size_t i = 0; i < grid.size(); i += 1000)
    CHECK(std::abs(grid[i] - kde.density(-10 + 0.002 * static_cast<double>(i))) <= 1e-4);

  // symmetric samples give a symmetric density
  std::vector<double> sym;
  for (double x : normal_draws(2, 500, 1.0)) {
    sym.push_back(3.0 + x);
    sym.push_back(3.0 - x);
  }
  const KernelDensity s(sym);
  for (double d = 0.0; d < 4.0; d += 0.25) CHECK(std::abs(s.density(3.0 + d) - s.density(3.0 - d)) <= 1e-6);

  CHECK(KernelDensity({2.0, 2.0, 2.0}).bandwidth() == 1e-6);
  CHECK_THROWS_AS(KernelDensity({1.0}), InputError);
  CHECK_THROWS(KernelDensity({1.0, 2.0}, -1.0));
}

TEST_CASE("total-variation estimates") {
  const auto a = normal_draws(3, 10000, 0.0);
  const auto b = normal_draws(4, 10000, 1.0);
  CHECK(tv_estimate(a, a) <= 0.01);
  CHECK(std::abs(tv_estimate(a, b) - analytic_tv(0, 1)) <= 0.03);
  CHECK(std::abs(tv_estimate(a, b) - tv_estimate(b, a)) <= 1e-3);
  CHECK(tv_estimate(normal_draws(5, 1000, 0.0, 0.1), normal_draws(6, 1000, 100.0, 0.1)) >= 0.99);
}

TEST_CASE("estimate_epsilon combines by max") {
  const ScoreSet a(normal_draws(7, 2000, 0.0)), b(normal_draws(8, 2000, 0.3)), c(normal_draws(9, 2000, 0.8));
  const auto single = estimate_epsilon({{a, b}});
  CHECK(single.combined == tv_estimate(a.values(), b.values()));
  const auto three = estimate_epsilon({{a, b}, {a, c}, {b, c}});
  REQUIRE(three.components.size() == 3);
  double mx = 0;
  for (const auto& comp : three.components) {
    CHECK(comp.epsilon >= 0.0);
    CHECK(comp.epsilon <= 1.0);
    mx = std::max(mx, comp.epsilon);
  }
  CHECK(three.combined == mx);
  const auto with_identical = estimate_epsilon({{a, b}, {a, c}, {b, c}, {a, a}});
  CHECK(with_identical.combined == three.combined);
  CHECK_THROWS_AS(estimate_epsilon({}), InputError);
}

TEST_CASE("estimator error shrinks with sample size") {
  const double truth = analytic_tv(0, 1);
  std::vector<double> errors;
  for (std::size_t m : {1000u, 10000u, 100000u}) {
    double err = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
      err += std::abs(tv_estimate(normal_draws(100 + seed, m, 0.0), normal_draws(200 + seed, m, 1.0)) - truth);
    errors.push_back(err / 10);
  }
  CHECK(errors[0] > errors[1]);
  CHECK(errors[1] > errors[2]);
}

TEST_CASE("score-level shift never exceeds the trajectory-level shift by much") {
  // Trajectories (x0, x1) with x1 shifted by 0.5: trajectory TV = 2 Phi(0.25) - 1.
  const double eps_star = std::erf(0.25 / std::sqrt(2.0));
  auto make = [](std::uint64_t seed, double shift) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    std::vector<Trajectory> xs;
    for (int i = 0; i < 10000; ++i) xs.emplace_back(1, std::vector<double>{n(rng), shift + n(rng)});
    return xs;
  };
  const Formula phi = parse_formula("F[0,1] (x0 >= 0.2)", 1);
  const auto model = PredictorModel::hold_last(0, 1);
  const auto r0 = direct_scores(phi, make(1, 0.0), model, 0);
  const auto r1 = direct_scores(phi, make(2, 0.5), model, 0);
  CHECK(tv_estimate(r0.values(), r1.values()) <= eps_star + 0.03);
}
