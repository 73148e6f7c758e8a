#pragma once

#include "rprv/formula.hpp"
#include "rprv/trajectory.hpp"

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace rprv {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Robust semantics rho^phi(x, tau0). TRUE evaluates to +inf.
// Throws InputError when tau0 + L^phi exceeds the last index of x.
double eval_robustness(const Formula& phi, const Trajectory& x, int tau0);

// Boolean semantics (x, tau0) |= phi; atoms hold iff h(x_tau) >= 0.
bool eval_boolean(const Formula& phi, const Trajectory& x, int tau0);

// Robustness at every tau in [first, last], computed in one pass.
std::vector<double> robustness_signal(const Formula& phi, const Trajectory& x, int first, int last);

// Lower bounds rho*_{pi,tau} for predicates at unobserved times t+1..t+H.
class PredicateBoundMap {
 public:
  PredicateBoundMap(int observed_until, int horizon);

  void set(const std::string& predicate, int tau, double bound);
  bool contains(const std::string& predicate, int tau) const;
  // Throws InputError when the entry is missing.
  double at(const std::string& predicate, int tau) const;

  int observed_until() const noexcept { return t_; }
  int horizon() const noexcept { return horizon_; }
  const std::map<std::pair<std::string, int>, double>& entries() const noexcept {
    return entries_;
  }

 private:
  int t_;
  int horizon_;
  std::map<std::pair<std::string, int>, double> entries_;
};

// Probabilistic robust semantics: atoms read h(X_tau) for tau <= t (the last index of
// `observed`) and the bound rho*_{pi,tau} otherwise. phi must be in positive normal form.
double eval_probabilistic_robustness(const Formula& phi, const Trajectory& observed,
                                     const PredicateBoundMap& bounds, int tau0);

struct PredicateTime {
  Predicate predicate;
  int tau;
};

// (pi, tau) pairs with tau > t that evaluation of phi at tau0 actually reads,
// ordered by (name, tau), one entry per distinct name.
std::vector<PredicateTime> predicate_time_pairs(const Formula& phi, int tau0, int t);

}  // namespace rprv
