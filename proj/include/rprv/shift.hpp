#pragma once

#include "rprv/conformal.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace rprv {

// Gaussian kernel density estimate.
class KernelDensity {
 public:
  // Bandwidth defaults to Silverman's rule 1.06 * sd * m^(-1/5), floored at 1e-6.
  explicit KernelDensity(std::vector<double> samples, std::optional<double> bandwidth = std::nullopt);

  double bandwidth() const noexcept { return bandwidth_; }
  const std::vector<double>& samples() const noexcept { return samples_; }  // sorted
  double min() const noexcept { return samples_.front(); }
  double max() const noexcept { return samples_.back(); }

  double density(double x) const;
  // Density on the uniform grid lo + i * step, i < count; kernel tails beyond 6 bandwidths are dropped.
  std::vector<double> on_grid(double lo, double step, std::size_t count) const;

 private:
  std::vector<double> samples_;
  double bandwidth_;
};

double silverman_bandwidth(const std::vector<double>& samples);

struct TvOptions {
  std::size_t grid_points = 10000;
  double padding_bandwidths = 5.0;
  std::optional<double> bandwidth;  // overrides Silverman for both sides
};

// 0.5 * integral |q - p| by the trapezoid rule, clipped to [0, 1].
double tv_estimate(const std::vector<double>& a, const std::vector<double>& b, const TvOptions& options = {});

struct ShiftComponent {
  double epsilon = 0.0;
  std::size_t calibration_size = 0;
  std::size_t test_size = 0;
  double bandwidth_calibration = 0.0;
  double bandwidth_test = 0.0;
  double grid_lo = 0.0;
  double grid_hi = 0.0;
};

struct ShiftEstimate {
  std::vector<ShiftComponent> components;
  double combined = 0.0;  // max over components
  std::size_t grid_points = 0;
};

// One TV estimate per (calibration, test) pair, combined by the max rule.
ShiftEstimate estimate_epsilon(const std::vector<std::pair<ScoreSet, ScoreSet>>& pairs,
                               const TvOptions& options = {});

}  // namespace rprv
