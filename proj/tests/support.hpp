#pragma once

// Independent reference implementations used as test oracles.

#include "rprv/formula.hpp"
#include "rprv/predicate.hpp"
#include "rprv/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace rprv::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Straight transcription of the sup-min-inf definition, one time point at a time.
inline double reference_robustness(const Formula& phi, const Trajectory& x, int tau) {
  switch (phi.op()) {
    case Operator::truth: return kInf;
    case Operator::falsity: return -kInf;
    case Operator::predicate: return phi.predicate().evaluate(x.state(static_cast<std::size_t>(tau)));
    case Operator::negation: return -reference_robustness(phi.operand(), x, tau);
    case Operator::conjunction:
      return std::min(reference_robustness(phi.lhs(), x, tau), reference_robustness(phi.rhs(), x, tau));
    case Operator::disjunction:
      return std::max(reference_robustness(phi.lhs(), x, tau), reference_robustness(phi.rhs(), x, tau));
    case Operator::eventually: {
      double best = -kInf;
      for (int s = tau + phi.interval().lower; s <= tau + phi.interval().upper; ++s)
        best = std::max(best, reference_robustness(phi.operand(), x, s));
      return best;
    }
    case Operator::always: {
      double worst = kInf;
      for (int s = tau + phi.interval().lower; s <= tau + phi.interval().upper; ++s)
        worst = std::min(worst, reference_robustness(phi.operand(), x, s));
      return worst;
    }
    case Operator::until: {
      double best = -kInf;
      for (int s = tau + phi.interval().lower; s <= tau + phi.interval().upper; ++s) {
        double inner = kInf;
        for (int m = tau + 1; m < s; ++m) inner = std::min(inner, reference_robustness(phi.lhs(), x, m));
        best = std::max(best, std::min(reference_robustness(phi.rhs(), x, s), inner));
      }
      return best;
    }
    case Operator::release: {
      double worst = kInf;
      for (int s = tau + phi.interval().lower; s <= tau + phi.interval().upper; ++s) {
        double inner = -kInf;
        for (int m = tau + 1; m < s; ++m) inner = std::max(inner, reference_robustness(phi.lhs(), x, m));
        worst = std::min(worst, std::max(reference_robustness(phi.rhs(), x, s), inner));
      }
      return worst;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline bool reference_boolean(const Formula& phi, const Trajectory& x, int tau) {
  switch (phi.op()) {
    case Operator::truth: return true;
    case Operator::falsity: return false;
    case Operator::predicate: return phi.predicate().evaluate(x.state(static_cast<std::size_t>(tau))) >= 0.0;
    case Operator::negation: return !reference_boolean(phi.operand(), x, tau);
    case Operator::conjunction: return reference_boolean(phi.lhs(), x, tau) && reference_boolean(phi.rhs(), x, tau);
    case Operator::disjunction: return reference_boolean(phi.lhs(), x, tau) || reference_boolean(phi.rhs(), x, tau);
    case Operator::eventually:
      for (int s = tau + phi.interval().lower; s <= tau + phi.interval().upper; ++s)
        if (reference_boolean(phi.operand(), x, s)) return true;
      return false;
    case Operator::always:
      for (int s = tau + phi.interval().lower; s <= tau + phi.interval().upper; ++s)
        if (!reference_boolean(phi.operand(), x, s)) return false;
      return true;
    case Operator::until:
      for (int s = tau + phi.interval().lower; s <= tau + phi.interval().upper; ++s) {
        bool ok = reference_boolean(phi.rhs(), x, s);
        for (int m = tau + 1; ok && m < s; ++m) ok = reference_boolean(phi.lhs(), x, m);
        if (ok) return true;
      }
      return false;
    case Operator::release:
      for (int s = tau + phi.interval().lower; s <= tau + phi.interval().upper; ++s) {
        bool ok = reference_boolean(phi.rhs(), x, s);
        for (int m = tau + 1; !ok && m < s; ++m) ok = reference_boolean(phi.lhs(), x, m);
        if (!ok) return false;
      }
      return true;
  }
  return false;
}

inline Predicate random_predicate(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> kind(0, 2);
  const int k = kind(rng);
  if (k == 0) {
    std::vector<double> a(dim);
    for (auto& v : a) v = std::round(u(rng) * 4.0) / 4.0;
    a[std::uniform_int_distribution<std::size_t>(0, dim - 1)(rng)] = 1.0;
    return Predicate::affine(a, u(rng));
  }
  std::vector<std::size_t> sel;
  std::vector<double> p;
  for (std::size_t j = 0; j < dim; ++j)
    if (sel.empty() || std::bernoulli_distribution(0.5)(rng)) {
      sel.push_back(j);
      p.push_back(u(rng));
    }
  const double c = std::abs(u(rng)) + 0.5;
  return k == 1 ? Predicate::norm_inside(sel, p, c) : Predicate::norm_outside(sel, p, c);
}

// Random formula of bounded depth over every operator, intervals within [0, max_bound].
inline Formula random_formula(std::mt19937_64& rng, std::size_t dim, int depth, int max_bound = 3) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 9);
  const auto iv = [&] {
    const int a = std::uniform_int_distribution<int>(0, max_bound)(rng);
    const int b = std::uniform_int_distribution<int>(a, max_bound)(rng);
    return Interval{a, b};
  };
  const auto sub = [&] { return random_formula(rng, dim, depth - 1, max_bound); };
  switch (pick(rng)) {
    case 0:
      if (std::bernoulli_distribution(0.05)(rng)) return Formula::truth();
      return Formula::atom(random_predicate(rng, dim));
    case 1: return Formula::negation(sub());
    case 2: return Formula::conjunction(sub(), sub());
    case 3: return Formula::disjunction(sub(), sub());
    case 4: {
      auto l = sub();
      auto i = iv();
      return Formula::until(l, i, sub());
    }
    case 5: {
      auto l = sub();
      auto i = iv();
      return Formula::release(l, i, sub());
    }
    case 6: {
      auto i = iv();
      return Formula::eventually(i, sub());
    }
    case 7: {
      auto i = iv();
      return Formula::always(i, sub());
    }
    default: return Formula::atom(random_predicate(rng, dim));
  }
}

inline Trajectory random_trajectory(std::mt19937_64& rng, std::size_t dim, std::size_t length, double scale = 2.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> flat(dim * length);
  for (auto& v : flat) v = n(rng);
  return Trajectory(dim, std::move(flat));
}

}  // namespace rprv::testing
