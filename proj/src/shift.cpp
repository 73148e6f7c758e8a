#include "rprv/shift.hpp"

#include "rprv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rprv {

namespace {

constexpr double kBandwidthFloor = 1e-6;
constexpr double kTail = 6.0;

struct Grid {
  double lo;
  double step;
  std::size_t count;
};

Grid union_grid(const KernelDensity& p, const KernelDensity& q, const TvOptions& options) {
  if (options.grid_points < 2) throw std::invalid_argument("integration grid needs at least 2 points");
  const double pad = options.padding_bandwidths * std::max(p.bandwidth(), q.bandwidth());
  const double lo = std::min(p.min(), q.min()) - pad;
  const double hi = std::max(p.max(), q.max()) + pad;
  return {lo, (hi - lo) / static_cast<double>(options.grid_points - 1), options.grid_points};
}

}  // namespace

double silverman_bandwidth(const std::vector<double>& samples) {
  const double m = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / m;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / (m - 1.0));
  return std::max(kBandwidthFloor, 1.06 * sd * std::pow(m, -0.2));
}

KernelDensity::KernelDensity(std::vector<double> samples, std::optional<double> bandwidth)
    : samples_{std::move(samples)} {
  if (samples_.size() < 2) throw InputError("density estimation needs at least 2 samples");
  for (double s : samples_)
    if (!std::isfinite(s)) throw InputError("density samples must be finite");
  if (bandwidth && !(*bandwidth > 0.0 && std::isfinite(*bandwidth)))
    throw std::invalid_argument("bandwidth must be positive");
  std::sort(samples_.begin(), samples_.end());
  bandwidth_ = bandwidth ? *bandwidth : silverman_bandwidth(samples_);
}

double KernelDensity::density(double x) const {
  const double h = bandwidth_;
  double acc = 0.0;
  for (double s : samples_) {
    const double u = (x - s) / h;
    acc += std::exp(-0.5 * u * u);
  }
  return acc / (static_cast<double>(samples_.size()) * h * std::sqrt(2.0 * std::numbers::pi));
}

std::vector<double> KernelDensity::on_grid(double lo, double step, std::size_t count) const {
  std::vector<double> out(count, 0.0);
  if (count == 0) return out;
  const double h = bandwidth_;
  const double norm = 1.0 / (static_cast<double>(samples_.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  const double last = static_cast<double>(count - 1);
  const double reach = kTail * h;
  const auto width = static_cast<std::ptrdiff_t>(std::floor(reach / step));

  if (width < 20) {
    // Kernel barely resolved by the grid: evaluate every sample exactly.
    for (double s : samples_) {
      const double first_i = std::max(0.0, std::ceil((s - reach - lo) / step));
      const double last_i = std::min(last, std::floor((s + reach - lo) / step));
      for (double i = first_i; i <= last_i; i += 1.0) {
        const double u = (lo + i * step - s) / h;
        out[static_cast<std::size_t>(i)] += std::exp(-0.5 * u * u);
      }
    }
  } else {
    // Linear binning onto the grid, then a discrete convolution with the sampled kernel.
    const auto n = static_cast<std::ptrdiff_t>(count);
    std::vector<double> bins(count + 2, 0.0);  // one slot of slack on each side
    for (double s : samples_) {
      const double pos = (s - lo) / step;
      const double base = std::floor(pos);
      const double frac = pos - base;
      const auto i = static_cast<std::ptrdiff_t>(base);
      if (i >= -1 && i < n) bins[static_cast<std::size_t>(i + 1)] += 1.0 - frac;
      if (i + 1 >= -1 && i + 1 < n) bins[static_cast<std::size_t>(i + 2)] += frac;
    }
    std::vector<double> kernel(static_cast<std::size_t>(width) + 1);
    for (std::ptrdiff_t d = 0; d <= width; ++d) {
      const double u = static_cast<double>(d) * step / h;
      kernel[static_cast<std::size_t>(d)] = std::exp(-0.5 * u * u);
    }
    for (std::ptrdiff_t b = -1; b <= n; ++b) {
      const double w = bins[static_cast<std::size_t>(b + 1)];
      if (w == 0.0) continue;
      const std::ptrdiff_t from = std::max<std::ptrdiff_t>(0, b - width);
      const std::ptrdiff_t to = std::min<std::ptrdiff_t>(n - 1, b + width);
      for (std::ptrdiff_t i = from; i <= to; ++i)
        out[static_cast<std::size_t>(i)] += w * kernel[static_cast<std::size_t>(std::abs(i - b))];
    }
  }
  for (double& v : out) v *= norm;
  return out;
}

namespace {

ShiftComponent tv_component(const std::vector<double>& a, const std::vector<double>& b, const TvOptions& options) {
  const KernelDensity p(a, options.bandwidth);
  const KernelDensity q(b, options.bandwidth);
  const Grid g = union_grid(p, q, options);
  const auto pv = p.on_grid(g.lo, g.step, g.count);
  const auto qv = q.on_grid(g.lo, g.step, g.count);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.count; ++i) {
    const double w = (i == 0 || i + 1 == g.count) ? 0.5 : 1.0;
    acc += w * std::abs(pv[i] - qv[i]);
  }
  ShiftComponent c;
  c.epsilon = std::clamp(0.5 * acc * g.step, 0.0, 1.0);
  c.calibration_size = a.size();
  c.test_size = b.size();
  c.bandwidth_calibration = p.bandwidth();
  c.bandwidth_test = q.bandwidth();
  c.grid_lo = g.lo;
  c.grid_hi = g.lo + g.step * static_cast<double>(g.count - 1);
  return c;
}

}  // namespace

double tv_estimate(const std::vector<double>& a, const std::vector<double>& b, const TvOptions& options) {
  return tv_component(a, b, options).epsilon;
}

ShiftEstimate estimate_epsilon(const std::vector<std::pair<ScoreSet, ScoreSet>>& pairs, const TvOptions& options) {
  if (pairs.empty()) throw InputError("shift estimation needs at least one (calibration, test) pair");
  ShiftEstimate est;
  est.grid_points = options.grid_points;
  for (const auto& [cal, test] : pairs) {
    est.components.push_back(tv_component(cal.values(), test.values(), options));
    est.combined = std::max(est.combined, est.components.back().epsilon);
  }
  return est;
}

}  // namespace rprv
