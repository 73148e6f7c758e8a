#include "rprv/semantics.hpp"

#include "rprv/error.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace rprv {

namespace {

using Leaf = std::function<double(const Predicate&, int)>;

// Values of phi at tau = first..last.
std::vector<double> signal(const Formula& phi, const Leaf& leaf, int first, int last) {
  const auto count = static_cast<std::size_t>(last - first + 1);
  std::vector<double> out(count);
  switch (phi.op()) {
    case Operator::truth: std::fill(out.begin(), out.end(), kInfinity); return out;
    case Operator::falsity: std::fill(out.begin(), out.end(), -kInfinity); return out;
    case Operator::predicate:
      for (int tau = first; tau <= last; ++tau) out[tau - first] = leaf(phi.predicate(), tau);
      return out;
    case Operator::negation: {
      out = signal(phi.operand(), leaf, first, last);
      for (double& v : out) v = -v;
      return out;
    }
    case Operator::conjunction:
    case Operator::disjunction: {
      const auto l = signal(phi.lhs(), leaf, first, last);
      const auto r = signal(phi.rhs(), leaf, first, last);
      const bool conj = phi.op() == Operator::conjunction;
      for (std::size_t i = 0; i < count; ++i)
        out[i] = conj ? std::min(l[i], r[i]) : std::max(l[i], r[i]);
      return out;
    }
    case Operator::eventually:
    case Operator::always: {
      const Interval iv = phi.interval();
      const auto c = signal(phi.operand(), leaf, first + iv.lower, last + iv.upper);
      const bool ev = phi.op() == Operator::eventually;
      for (std::size_t i = 0; i < count; ++i) {
        const auto begin = c.begin() + static_cast<std::ptrdiff_t>(i);
        const auto end = begin + (iv.upper - iv.lower + 1);
        out[i] = ev ? *std::max_element(begin, end) : *std::min_element(begin, end);
      }
      return out;
    }
    case Operator::until:
    case Operator::release: {
      // until:   sup_{k in [a,b]} min(r(tau+k), inf_{0<j<k} l(tau+j))
      // release: inf_{k in [a,b]} max(r(tau+k), sup_{0<j<k} l(tau+j))
      // Only the indices actually read are evaluated: r on [first+a, last+b], l on [first+1, last+b-1].
      const Interval iv = phi.interval();
      const auto r = signal(phi.rhs(), leaf, first + iv.lower, last + iv.upper);
      const auto l = iv.upper >= 2 ? signal(phi.lhs(), leaf, first + 1, last + iv.upper - 1) : std::vector<double>{};
      const bool until = phi.op() == Operator::until;
      for (std::size_t i = 0; i < count; ++i) {
        double best = until ? -kInfinity : kInfinity;
        double run = until ? kInfinity : -kInfinity;
        for (int k = 0; k <= iv.upper; ++k) {
          if (k >= 2) {
            const double lv = l[i + k - 2];
            run = until ? std::min(run, lv) : std::max(run, lv);
          }
          if (k < iv.lower) continue;
          const double rv = r[i + k - iv.lower];
          best = until ? std::max(best, std::min(rv, run)) : std::min(best, std::max(rv, run));
        }
        out[i] = best;
      }
      return out;
    }
  }
  return out;
}

std::vector<char> boolean_signal(const Formula& phi, const Trajectory& x, int first, int last) {
  const auto count = static_cast<std::size_t>(last - first + 1);
  std::vector<char> out(count);
  switch (phi.op()) {
    case Operator::truth: std::fill(out.begin(), out.end(), 1); return out;
    case Operator::falsity: std::fill(out.begin(), out.end(), 0); return out;
    case Operator::predicate:
      for (int tau = first; tau <= last; ++tau)
        out[tau - first] = phi.predicate().evaluate(x.state(tau)) >= 0.0;
      return out;
    case Operator::negation: {
      out = boolean_signal(phi.operand(), x, first, last);
      for (char& v : out) v = !v;
      return out;
    }
    case Operator::conjunction:
    case Operator::disjunction: {
      const auto l = boolean_signal(phi.lhs(), x, first, last);
      const auto r = boolean_signal(phi.rhs(), x, first, last);
      const bool conj = phi.op() == Operator::conjunction;
      for (std::size_t i = 0; i < count; ++i) out[i] = conj ? (l[i] && r[i]) : (l[i] || r[i]);
      return out;
    }
    case Operator::eventually:
    case Operator::always: {
      const Interval iv = phi.interval();
      const auto c = boolean_signal(phi.operand(), x, first + iv.lower, last + iv.upper);
      const bool ev = phi.op() == Operator::eventually;
      for (std::size_t i = 0; i < count; ++i) {
        const auto begin = c.begin() + static_cast<std::ptrdiff_t>(i);
        const auto end = begin + (iv.upper - iv.lower + 1);
        out[i] = ev ? std::any_of(begin, end, [](char v) { return v != 0; })
                    : std::all_of(begin, end, [](char v) { return v != 0; });
      }
      return out;
    }
    case Operator::until:
    case Operator::release: {
      // until:   exists k in [a,b]: r(tau+k) and forall 0<j<k: l(tau+j)
      // release: forall k in [a,b]: r(tau+k) or exists 0<j<k: l(tau+j)
      const Interval iv = phi.interval();
      const auto l = boolean_signal(phi.lhs(), x, first, last + iv.upper);
      const auto r = boolean_signal(phi.rhs(), x, first, last + iv.upper);
      const bool until = phi.op() == Operator::until;
      for (std::size_t i = 0; i < count; ++i) {
        bool result = !until;
        bool run = until;
        for (int k = 0; k <= iv.upper; ++k) {
          if (k >= 2) run = until ? (run && l[i + k - 1]) : (run || l[i + k - 1]);
          if (k < iv.lower) continue;
          if (until && r[i + k] && run) result = true;
          if (!until && !(r[i + k] || run)) result = false;
        }
        out[i] = result;
      }
      return out;
    }
  }
  return out;
}

void check_horizon(const Formula& phi, std::size_t size, int tau0) {
  if (tau0 < 0) throw InputError("evaluation time must be nonnegative");
  const long need = static_cast<long>(tau0) + formula_length(phi);
  if (need > static_cast<long>(size) - 1)
    throw InputError("trajectory too short: formula needs index " + std::to_string(need) +
                     " but the last index is " + std::to_string(static_cast<long>(size) - 1));
}

void collect_reads(const Formula& phi, const std::set<int>& times,
                   std::map<std::pair<std::string, int>, Predicate>& out) {
  switch (phi.op()) {
    case Operator::truth:
    case Operator::falsity: return;
    case Operator::predicate:
      for (int tau : times) out.emplace(std::make_pair(phi.predicate().name(), tau), phi.predicate());
      return;
    case Operator::negation: collect_reads(phi.operand(), times, out); return;
    case Operator::conjunction:
    case Operator::disjunction:
      collect_reads(phi.lhs(), times, out);
      collect_reads(phi.rhs(), times, out);
      return;
    case Operator::eventually:
    case Operator::always: {
      std::set<int> next;
      const Interval iv = phi.interval();
      for (int tau : times)
        for (int k = iv.lower; k <= iv.upper; ++k) next.insert(tau + k);
      collect_reads(phi.operand(), next, out);
      return;
    }
    case Operator::until:
    case Operator::release: {
      std::set<int> left;
      std::set<int> right;
      const Interval iv = phi.interval();
      for (int tau : times) {
        for (int k = iv.lower; k <= iv.upper; ++k) right.insert(tau + k);
        for (int k = 1; k < iv.upper; ++k) left.insert(tau + k);
      }
      collect_reads(phi.lhs(), left, out);
      collect_reads(phi.rhs(), right, out);
      return;
    }
  }
}

}  // namespace

std::vector<double> robustness_signal(const Formula& phi, const Trajectory& x, int first, int last) {
  if (last < first) return {};
  check_horizon(phi, x.size(), last);
  if (first < 0) throw InputError("evaluation time must be nonnegative");
  return signal(
      phi, [&x](const Predicate& p, int tau) { return p.evaluate(x.state(tau)); }, first, last);
}

double eval_robustness(const Formula& phi, const Trajectory& x, int tau0) {
  return robustness_signal(phi, x, tau0, tau0).front();
}

bool eval_boolean(const Formula& phi, const Trajectory& x, int tau0) {
  check_horizon(phi, x.size(), tau0);
  return boolean_signal(phi, x, tau0, tau0).front() != 0;
}

PredicateBoundMap::PredicateBoundMap(int observed_until, int horizon)
    : t_{observed_until}, horizon_{horizon} {
  if (observed_until < 0 || horizon < 0) throw InputError("invalid bound map window");
}

void PredicateBoundMap::set(const std::string& predicate, int tau, double bound) {
  if (tau <= t_ || tau > t_ + horizon_)
    throw InputError("bound time " + std::to_string(tau) + " outside the prediction window");
  entries_[{predicate, tau}] = bound;
}

bool PredicateBoundMap::contains(const std::string& predicate, int tau) const {
  return entries_.count({predicate, tau}) != 0;
}

double PredicateBoundMap::at(const std::string& predicate, int tau) const {
  auto it = entries_.find({predicate, tau});
  if (it == entries_.end())
    throw InputError("missing bound for " + predicate + "@" + std::to_string(tau));
  return it->second;
}

double eval_probabilistic_robustness(const Formula& phi, const Trajectory& observed,
                                     const PredicateBoundMap& bounds, int tau0) {
  if (!is_positive_normal_form(phi))
    throw InputError("probabilistic robustness requires a formula in positive normal form");
  const int t = static_cast<int>(observed.size()) - 1;
  if (t != bounds.observed_until())
    throw InputError("observed prefix length does not match the bound map");
  check_horizon(phi, static_cast<std::size_t>(t + bounds.horizon() + 1), tau0);
  const Leaf leaf = [&](const Predicate& p, int tau) {
    return tau <= t ? p.evaluate(observed.state(tau)) : bounds.at(p.name(), tau);
  };
  return signal(phi, leaf, tau0, tau0).front();
}

std::vector<PredicateTime> predicate_time_pairs(const Formula& phi, int tau0, int t) {
  std::map<std::pair<std::string, int>, Predicate> reads;
  collect_reads(phi, {tau0}, reads);
  std::vector<PredicateTime> out;
  for (const auto& [key, pred] : reads)
    if (key.second > t) out.push_back({pred, key.second});
  return out;
}

}  // namespace rprv
