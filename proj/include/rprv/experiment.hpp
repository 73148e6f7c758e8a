#pragma once

#include "rprv/io.hpp"
#include "rprv/predictors.hpp"
#include "rprv/shift.hpp"
#include "rprv/synthetic.hpp"
#include "rprv/verification.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rprv {

struct ExperimentConfig {
  Method method = Method::direct;
  double delta = 0.2;
  std::optional<double> epsilon;  // nullopt: estimate from score samples
  std::string divergence = "tv";
  std::size_t calibration_size = 2000;
  std::size_t test_count = 100;
  std::size_t trials = 50;
  int t = 100;
  int tau0 = 0;
  std::string formula = "G[0,105] (x0 >= 60)";
  PredictorKind predictor = PredictorKind::autoregressive;
  int order = 1;
  std::uint64_t seed = 1;
  std::size_t training_count = 500;
  std::size_t aux_count = 500;
  std::size_t shift_samples = 1000;
  std::size_t grid_points = 10000;
  unsigned threads = 1;
  BallNorm norm = BallNorm::l2;
  std::size_t histogram_bins = 40;
  std::size_t adaptive_k = 10;
  double alpha_floor = 1e-8;
  std::string base_file;  // one-trajectory file replacing the waveform
  SyntheticSpec data = [] {
    SyntheticSpec s;
    s.length = 0;  // just long enough for the formula
    return s;
  }();
  bool record_timing = false;
};

// Flat "key = value" lines; '#' starts a comment. Unknown keys are input errors.
ExperimentConfig parse_experiment_config(std::string_view text);
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);
Json to_json(const ExperimentConfig& config);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

// Equal-width bins over [min, max] of the values; counts sum to values.size().
Histogram make_histogram(const std::vector<double>& values, std::size_t bins);

struct TrialResult {
  std::size_t index = 0;
  double robust_coverage = 0.0;
  double baseline_coverage = 0.0;
  PredictionRegion robust_region;
  PredictionRegion baseline_region;
  double robust_mean_rho_star = 0.0;
  double baseline_mean_rho_star = 0.0;
  Histogram calibration_scores;
};

struct CoverageReport {
  ExperimentConfig config;
  double epsilon = 0.0;
  std::optional<ShiftEstimate> shift;
  std::vector<TrialResult> trials;
  double target = 0.0;
  double robust_mean = 0.0;
  double baseline_mean = 0.0;
  double robust_standard_error = 0.0;
  double baseline_standard_error = 0.0;
  double robust_mean_rho_star = 0.0;
  double baseline_mean_rho_star = 0.0;
  bool all_feasible = true;
  bool predictor_fell_back = false;
  bool alphas_floored = false;
  double elapsed_seconds = 0.0;  // only reported when config.record_timing
};

// Throws InputError on an invalid configuration; infeasible regions are reported per trial.
CoverageReport run_coverage_experiment(const ExperimentConfig& config);

Json to_json(const CoverageReport& report);
// trial,bin,lo,hi,count
std::string histograms_to_csv(const CoverageReport& report);

}  // namespace rprv
