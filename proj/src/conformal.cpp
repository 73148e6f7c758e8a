#include "rprv/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rprv {

namespace {

constexpr double kBisectionTolerance = 1e-9;
constexpr int kMaxBisectionSteps = 64;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Products like (K + 1)(1 - delta) land a few ulps off exact integers.
double snap_to_integer(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
}

std::size_t order_index(double level, std::size_t k) {
  const double position = std::ceil(snap_to_integer(level * static_cast<double>(k)));
  return position < 1.0 ? 1 : static_cast<std::size_t>(position);
}

// s * f(u / s), extended to s = 0 by the recession slope of f.
double perspective(const FDivergence& d, double s, double u) {
  if (s > 0.0) return s * d.f(u / s);
  if (u == 0.0) return 0.0;
  constexpr double kFar = 1e12;
  return u * d.f(kFar) / kFar;
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("divergence bound epsilon must be finite and nonnegative");
}

}  // namespace

ScoreSet::ScoreSet(std::vector<double> scores, std::string provenance)
    : scores_{std::move(scores)}, provenance_{std::move(provenance)} {
  if (scores_.empty()) throw std::invalid_argument("score set is empty");
  for (double s : scores_)
    if (!std::isfinite(s)) throw std::invalid_argument("score set contains a non-finite value");
}

FDivergence FDivergence::total_variation(double epsilon) {
  check_epsilon(epsilon);
  FDivergence d;
  d.kind_ = DivergenceKind::total_variation;
  d.f_ = [](double z) { return 0.5 * std::abs(z - 1.0); };
  d.epsilon_ = epsilon;
  d.label_ = "tv";
  return d;
}

FDivergence FDivergence::generic(std::function<double(double)> f, double epsilon, std::string label) {
  check_epsilon(epsilon);
  if (!f) throw std::invalid_argument("f-divergence function is empty");
  if (std::abs(f(1.0)) > 1e-12) throw std::invalid_argument("f-divergence requires f(1) = 0");
  // Midpoint convexity on a grid over [0, 10].
  constexpr int kPoints = 101;
  for (int i = 0; i < kPoints; ++i) {
    for (int j = i + 2; j < kPoints; j += 2) {
      const double a = 0.1 * i;
      const double b = 0.1 * j;
      const double fa = f(a);
      const double fb = f(b);
      const double mid = f(0.5 * (a + b));
      if (mid > 0.5 * (fa + fb) + 1e-9 * (1.0 + std::abs(fa) + std::abs(fb)))
        throw std::invalid_argument("f-divergence function is not convex");
    }
  }
  FDivergence d;
  d.kind_ = DivergenceKind::generic;
  d.f_ = std::move(f);
  d.epsilon_ = epsilon;
  d.label_ = std::move(label);
  return d;
}

FDivergence FDivergence::kullback_leibler(double epsilon) {
  return generic([](double z) { return z > 0.0 ? z * std::log(z) : 0.0; }, epsilon, "kl");
}

FDivergence FDivergence::chi_squared(double epsilon) {
  return generic([](double z) { return (z - 1.0) * (z - 1.0); }, epsilon, "chi2");
}

FDivergence FDivergence::with_epsilon(double epsilon) const {
  check_epsilon(epsilon);
  FDivergence d = *this;
  d.epsilon_ = epsilon;
  return d;
}

FDivergence divergence_from_name(const std::string& name, double epsilon) {
  if (name == "tv" || name == "total-variation") return FDivergence::total_variation(epsilon);
  if (name == "kl") return FDivergence::kullback_leibler(epsilon);
  if (name == "chi2") return FDivergence::chi_squared(epsilon);
  throw std::invalid_argument("unknown divergence '" + name + "' (expected tv, kl or chi2)");
}

double empirical_quantile(const ScoreSet& scores, double level) {
  if (scores.size() == 0) throw std::invalid_argument("score set is empty");
  if (!(level >= 0.0)) throw std::invalid_argument("quantile level must be nonnegative");
  const std::size_t k = scores.size();
  const std::size_t index = order_index(level, k);
  if (index > k) return kInf;
  std::vector<double> sorted = scores.values();
  auto nth = sorted.begin() + static_cast<std::ptrdiff_t>(index - 1);
  std::nth_element(sorted.begin(), nth, sorted.end());
  return *nth;
}

double g_function(const FDivergence& divergence, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("g requires beta in [0, 1]");
  const double eps = divergence.epsilon();
  if (divergence.kind() == DivergenceKind::total_variation) return std::max(0.0, beta - eps);
  if (beta == 0.0) return 0.0;

  const auto constraint = [&](double z) {
    return perspective(divergence, beta, z) + perspective(divergence, 1.0 - beta, 1.0 - z);
  };
  if (constraint(0.0) <= eps) return 0.0;
  // constraint is convex in z with its zero at z = beta: lo infeasible, hi feasible.
  double lo = 0.0;
  double hi = beta;
  for (int step = 0; step < kMaxBisectionSteps && hi - lo > kBisectionTolerance; ++step) {
    const double mid = 0.5 * (lo + hi);
    (constraint(mid) <= eps ? hi : lo) = mid;
  }
  return hi;
}

double g_inverse(const FDivergence& divergence, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("g inverse requires tau in [0, 1]");
  if (divergence.kind() == DivergenceKind::total_variation) {
    const double v = tau + divergence.epsilon();
    return v >= 1.0 - 1e-12 ? 1.0 : v;
  }
  if (g_function(divergence, 1.0) <= tau) return 1.0;
  // g is nondecreasing: lo feasible (g(0) = 0), hi infeasible.
  double lo = 0.0;
  double hi = 1.0;
  for (int step = 0; step < kMaxBisectionSteps && hi - lo > kBisectionTolerance; ++step) {
    const double mid = 0.5 * (lo + hi);
    (g_function(divergence, mid) <= tau ? lo : hi) = mid;
  }
  return lo;
}

PredictionRegion robust_quantile(const ScoreSet& scores, double delta, const FDivergence& divergence) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (scores.size() == 0) throw std::invalid_argument("score set is empty");
  const std::size_t k = scores.size();
  PredictionRegion region;
  region.delta = delta;
  region.epsilon = divergence.epsilon();
  region.calibration_size = k;
  region.value = kInf;

  const double inflated = g_inverse(divergence, 1.0 - delta);
  const double level_n = (1.0 + 1.0 / static_cast<double>(k)) * inflated;  // 1 - delta_n before g
  if (inflated >= 1.0 || order_index(level_n, k) > k) {
    region.adjusted_level = level_n;
    return region;
  }
  const double one_minus_delta_n = g_function(divergence, std::min(level_n, 1.0));
  const double adjusted = g_inverse(divergence, one_minus_delta_n);
  region.adjusted_level = adjusted;
  const std::size_t index = order_index(adjusted, k);
  if (index > k) return region;

  region.index = index;
  region.value = empirical_quantile(scores, adjusted);
  region.feasible = true;
  return region;
}

PredictionRegion conformal_quantile(const ScoreSet& scores, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (scores.size() == 0) throw std::invalid_argument("score set is empty");
  const std::size_t k = scores.size();
  PredictionRegion region;
  region.delta = delta;
  region.epsilon = 0.0;
  region.calibration_size = k;
  region.adjusted_level = (1.0 + 1.0 / static_cast<double>(k)) * (1.0 - delta);
  region.value = empirical_quantile(scores, region.adjusted_level);
  region.feasible = std::isfinite(region.value);
  region.index = region.feasible ? order_index(region.adjusted_level, k) : 0;
  return region;
}

std::optional<std::size_t> min_calibration_size(double delta, const FDivergence& divergence) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const double q = g_inverse(divergence, 1.0 - delta);
  if (q >= 1.0) return std::nullopt;
  const double bound = std::ceil(snap_to_integer(q / (1.0 - q)));
  return bound < 1.0 ? std::size_t{1} : static_cast<std::size_t>(bound);
}

}  // namespace rprv
