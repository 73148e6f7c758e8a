#include "rprv/error.hpp"
#include "rprv/parser.hpp"
#include "rprv/semantics.hpp"

#include <doctest.h>

#include "support.hpp"

using namespace rprv;

namespace {

Trajectory scalar(std::vector<double> v) { return Trajectory(1, std::move(v)); }

}  // namespace

TEST_CASE("robustness on hand examples") {
  const auto x = scalar({1, 2, 3});
  CHECK(eval_robustness(parse_formula("F[0,2] (x0 >= 2.5)", 1), x, 0) == 0.5);
  CHECK(eval_robustness(parse_formula("G[0,2] (x0 >= 2.5)", 1), x, 0) == -1.5);
  CHECK(eval_robustness(parse_formula("G[1,1] (x0 <= 0)", 1), x, 0) == -2.0);
  CHECK(eval_robustness(Formula::truth(), x, 0) == kInfinity);
  CHECK(eval_robustness(Formula::falsity(), x, 0) == -kInfinity);

  // Until: the left operand is only required strictly between tau and tau'.
  const auto y = scalar({0, -1, 5});
  const Formula u = parse_formula("(x0 >= 0) U[0,2] (x0 >= 4)", 1);
  CHECK(eval_robustness(u, y, 0) == -1.0);
  CHECK(eval_robustness(parse_formula("(x0 >= 0) U[0,1] (x0 >= -1)", 1), y, 0) == 1.0);
  CHECK_FALSE(eval_boolean(u, y, 0));
  CHECK(eval_boolean(parse_formula("(x0 >= -1) U[2,2] (x0 >= 4)", 1), y, 0));
}

TEST_CASE("trajectory shorter than the formula horizon is an input error") {
  CHECK_THROWS_WITH_AS(eval_robustness(parse_formula("G[0,5] (x0 >= 0)", 1), scalar({1, 2, 3}), 0),
                       doctest::Contains("too short"), InputError);
  CHECK_THROWS_AS(eval_robustness(parse_formula("(x0 >= 0)", 1), scalar({1, 2, 3}), 3), InputError);
}

TEST_CASE("robustness matches the exhaustive reference") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 400; ++i) {
    const Formula phi = testing::random_formula(rng, 2, 4);
    const int L = formula_length(phi);
    if (L > 11) continue;
    const int tau0 = std::uniform_int_distribution<int>(0, 11 - L)(rng);
    const auto x = testing::random_trajectory(rng, 2, static_cast<std::size_t>(12));
    CHECK(eval_robustness(phi, x, tau0) == testing::reference_robustness(phi, x, tau0));
    CHECK(eval_boolean(phi, x, tau0) == testing::reference_boolean(phi, x, tau0));
    const auto signal = robustness_signal(phi, x, 0, 11 - L);
    for (int tau = 0; tau <= 11 - L; ++tau) CHECK(signal[static_cast<std::size_t>(tau)] == testing::reference_robustness(phi, x, tau));
  }
}

TEST_CASE("property: soundness of the robust semantics") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const Formula phi = testing::random_formula(rng, 2, 3);
    const auto x = testing::random_trajectory(rng, 2, static_cast<std::size_t>(formula_length(phi) + 1));
    const double r = eval_robustness(phi, x, 0);
    if (r > 0) CHECK(eval_boolean(phi, x, 0));
    if (r < 0) CHECK_FALSE(eval_boolean(phi, x, 0));
  }
}

TEST_CASE("property: states beyond tau0 + L never matter") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const Formula phi = testing::random_formula(rng, 1, 3);
    const auto L = static_cast<std::size_t>(formula_length(phi));
    auto a = testing::random_trajectory(rng, 1, L + 4);
    auto data = std::vector<double>(a.data().begin(), a.data().end());
    for (std::size_t k = L + 1; k < data.size(); ++k) data[k] += 100.0;
    const Trajectory b(1, data);
    CHECK(eval_robustness(phi, a, 0) == eval_robustness(phi, b, 0));
    CHECK(eval_robustness(phi, a, 0) == eval_robustness(phi, a.prefix(L + 1), 0));
  }
}

TEST_CASE("property: negation flips the sign") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const Formula phi = testing::random_formula(rng, 2, 3);
    const auto x = testing::random_trajectory(rng, 2, static_cast<std::size_t>(formula_length(phi) + 1));
    CHECK(eval_robustness(Formula::negation(phi), x, 0) == -eval_robustness(phi, x, 0));
  }
}

TEST_CASE("predicate-time pairs cover only unobserved reads") {
  const Formula phi = parse_formula("G[0,105] (x0 >= 60)", 1);
  const auto pairs = predicate_time_pairs(phi, 0, 100);
  REQUIRE(pairs.size() == 5);
  CHECK(pairs.front().tau == 101);
  CHECK(pairs.back().tau == 105);

  const Formula two = to_positive_normal_form(parse_formula("F[0,2] (x0 >= 1) & G[3,4] !(x0 >= 1)", 1));
  const auto p2 = predicate_time_pairs(two, 0, 2);
  // (x0 >= 1) is read up to 2 only; its negation at 3 and 4.
  REQUIRE(p2.size() == 2);
  CHECK(p2[0].predicate.name() == "(-x0 >= -1)");
}

TEST_CASE("probabilistic robustness") {
  const Formula phi = to_positive_normal_form(parse_formula("G[0,4] (x0 >= 0) | F[1,3] (x0 <= -2)", 1));
  const auto full = scalar({1, 2, 3, -1, 4});
  const auto observed = full.prefix(3);
  const auto pairs = predicate_time_pairs(phi, 0, 2);

  SUBCASE("exact bounds reproduce the robustness") {
    PredicateBoundMap bounds(2, 2);
    for (const auto& [p, tau] : pairs) bounds.set(p.name(), tau, p.evaluate(full.state(static_cast<std::size_t>(tau))));
    CHECK(eval_probabilistic_robustness(phi, observed, bounds, 0) == eval_robustness(phi, full, 0));
  }
  SUBCASE("missing bound is reported") {
    PredicateBoundMap bounds(2, 2);
    CHECK_THROWS_AS(eval_probabilistic_robustness(phi, observed, bounds, 0), InputError);
  }
  SUBCASE("bounds outside the horizon are rejected") {
    PredicateBoundMap bounds(2, 2);
    CHECK_THROWS(bounds.set("(x0 >= 0)", 2, 0.0));
    CHECK_THROWS(bounds.set("(x0 >= 0)", 5, 0.0));
  }
  SUBCASE("non-PNF formulas are rejected") {
    PredicateBoundMap bounds(2, 2);
    CHECK_THROWS(eval_probabilistic_robustness(parse_formula("!(x0 >= 0)", 1), observed, bounds, 0));
  }
}

TEST_CASE("property: bound soundness") {
  // Whenever every bound is below the true predicate value, the bound evaluation is below the robustness.
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> slack(0.0, 1.5);
  for (int i = 0; i < 300; ++i) {
    const Formula phi = to_positive_normal_form(testing::random_formula(rng, 2, 3));
    const int L = formula_length(phi);
    if (L == 0) continue;
    const int t = std::uniform_int_distribution<int>(0, L - 1)(rng);
    const auto x = testing::random_trajectory(rng, 2, static_cast<std::size_t>(L + 1));
    PredicateBoundMap bounds(t, L - t);
    for (const auto& [p, tau] : predicate_time_pairs(phi, 0, t))
      bounds.set(p.name(), tau, p.evaluate(x.state(static_cast<std::size_t>(tau))) - slack(rng));
    CHECK(eval_probabilistic_robustness(phi, x.prefix(static_cast<std::size_t>(t + 1)), bounds, 0) <=
          eval_robustness(phi, x, 0));
  }
}
