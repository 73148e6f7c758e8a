#include "rprv/experiment.hpp"

#include "rprv/error.hpp"
#include "rprv/parser.hpp"
#include "rprv/semantics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace rprv {

namespace {

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw InputError("config key '" + key + "' expects a number, got '" + v + "'");
  return out;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    if (!v.empty() && v.front() != '-') out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty())
    throw InputError("config key '" + key + "' expects a nonnegative integer, got '" + v + "'");
  return out;
}

std::vector<Sinusoid> parse_terms(const std::string& v) {
  std::vector<Sinusoid> terms;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trimmed(item);
    if (item.empty()) continue;
    std::stringstream is(item);
    std::string a, p, ph;
    std::getline(is, a, ':');
    std::getline(is, p, ':');
    std::getline(is, ph, ':');
    Sinusoid s;
    s.amplitude = to_real("waveform_terms", trimmed(a));
    s.period = to_real("waveform_terms", trimmed(p));
    s.phase = ph.empty() ? 0.0 : to_real("waveform_terms", trimmed(ph));
    terms.push_back(s);
  }
  return terms;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

// Everything shared by the trials: formula, generator spec, fitted predictor, auxiliary data.
struct Setup {
  Formula phi;
  SyntheticSpec spec;
  PredictorModel model;
  std::vector<Trajectory> aux;
  std::optional<AdaptiveWeightModel> omega;
  MonitorSettings settings;
};

Setup prepare(const ExperimentConfig& c) {
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (c.calibration_size == 0) throw InputError("calibration_size must be at least 1");
  if (c.trials == 0) throw InputError("trials must be at least 1");
  if (c.test_count == 0) throw InputError("test_count must be at least 1");
  if (c.predictor == PredictorKind::external_file)
    throw InputError("experiments generate their own data; external predictions are not supported");
  if (c.t < 0 || c.tau0 < 0) throw InputError("t and tau0 must be nonnegative");

  SyntheticSpec spec = c.data;
  if (!c.base_file.empty()) {
    auto base = read_trajectories(c.base_file);
    if (base.size() != 1) throw InputError("base_file must hold exactly one trajectory");
    spec.base = base.front();
  }
  const std::size_t dim = spec.base ? spec.base->dimension() : spec.dimension;
  Formula phi = parse_formula(c.formula, dim);
  const int h = prediction_horizon(phi, c.tau0, c.t);
  const std::size_t needed = static_cast<std::size_t>(c.t + h + 1);
  if (spec.base) {
    if (spec.base->size() < needed) throw InputError("base trajectory is shorter than t + H + 1");
  } else if (spec.length == 0) {
    spec.length = needed;
  } else if (spec.length < needed) {
    throw InputError("length " + std::to_string(spec.length) + " is shorter than t + H + 1 = " +
                     std::to_string(needed));
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }

  auto train_rng = derive_rng(c.seed, {0, 1});
  auto aux_rng = derive_rng(c.seed, {0, 2});
  const auto training = generate_synthetic(spec, std::max<std::size_t>(c.training_count, 1), Side::nominal,
                                           train_rng, "train");
  PredictorModel model = fit_predictor(training, c.t, h, c.predictor, c.order);
  auto aux = generate_synthetic(spec, std::max<std::size_t>(c.aux_count, 1), Side::nominal, aux_rng, "aux");

  MonitorSettings settings;
  settings.method = c.method;
  settings.tau0 = c.tau0;
  settings.delta = c.delta;
  settings.norm = c.norm;
  settings.alpha_floor = c.alpha_floor;

  std::optional<AdaptiveWeightModel> omega;
  if (c.method == Method::adaptive_direct)
    omega = fit_adaptive_weights(phi, aux, model, c.tau0, c.adaptive_k, 10, c.alpha_floor);
  return Setup{std::move(phi), std::move(spec), std::move(model), std::move(aux), std::move(omega), settings};
}

// Score-level TV between nominal and shifted draws, one component per score definition.
ShiftEstimate estimate_shift(const ExperimentConfig& c, const Setup& s) {
  auto nominal_rng = derive_rng(c.seed, {0, 3});
  auto shifted_rng = derive_rng(c.seed, {0, 4});
  const auto nominal = generate_synthetic(s.spec, c.shift_samples, Side::nominal, nominal_rng, "n");
  const auto shifted = generate_synthetic(s.spec, c.shift_samples, Side::shifted, shifted_rng, "s");
  const Formula pnf = to_positive_normal_form(s.phi);
  const auto alphas = normalization_constants(s.aux, s.model, pnf, c.norm, c.alpha_floor);
  std::vector<std::pair<ScoreSet, ScoreSet>> pairs;
  pairs.emplace_back(direct_scores(s.phi, nominal, s.model, c.tau0), direct_scores(s.phi, shifted, s.model, c.tau0));
  pairs.emplace_back(variant1_scores(nominal, s.model, alphas, c.norm),
                     variant1_scores(shifted, s.model, alphas, c.norm));
  pairs.emplace_back(variant2_scores(pnf, nominal, s.model, alphas, c.tau0),
                     variant2_scores(pnf, shifted, s.model, alphas, c.tau0));
  TvOptions opts;
  opts.grid_points = c.grid_points;
  return estimate_epsilon(pairs, opts);
}

TrialResult run_trial(const ExperimentConfig& c, const Setup& s, const FDivergence& divergence, std::size_t trial) {
  auto cal_rng = derive_rng(c.seed, {trial + 1, 1});
  auto test_rng = derive_rng(c.seed, {trial + 1, 2});
  const auto calibration = generate_synthetic(s.spec, c.calibration_size, Side::nominal, cal_rng, "cal");
  const auto tests = generate_synthetic(s.spec, c.test_count, Side::shifted, test_rng, "test");

  MonitorSettings settings = s.settings;
  settings.divergence = divergence;
  const RuntimeMonitor robust(s.phi, calibration, s.aux, s.model, settings, s.omega, c.adaptive_k);
  const RuntimeMonitor baseline = robust.with_divergence(FDivergence::total_variation(0.0));

  TrialResult r;
  r.index = trial;
  r.robust_region = robust.region();
  r.baseline_region = baseline.region();
  r.calibration_scores = make_histogram(robust.scores().values(), c.histogram_bins);
  std::size_t robust_hits = 0, baseline_hits = 0;
  double robust_sum = 0.0, baseline_sum = 0.0;
  const auto t1 = static_cast<std::size_t>(c.t + 1);
  for (const auto& x : tests) {
    const double truth = eval_robustness(s.phi, x, c.tau0);
    const Trajectory observed = x.prefix(t1);
    const double rs = robust.verify(observed).rho_star;
    const double bs = baseline.verify(observed).rho_star;
    robust_hits += truth >= rs;
    baseline_hits += truth >= bs;
    robust_sum += rs;
    baseline_sum += bs;
  }
  const double n = static_cast<double>(tests.size());
  r.robust_coverage = static_cast<double>(robust_hits) / n;
  r.baseline_coverage = static_cast<double>(baseline_hits) / n;
  r.robust_mean_rho_star = robust_sum / n;
  r.baseline_mean_rho_star = baseline_sum / n;
  return r;
}

Json histogram_json(const Histogram& h) { return Json{{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}}; }

Json optional_real(const std::optional<double>& v) { return v ? real_to_json(*v) : Json("estimate"); }

}  // namespace

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trimmed(raw);
  try {
    if (key == "method") c.method = method_from_name(v);
    else if (key == "delta") c.delta = to_real(key, v);
    else if (key == "epsilon") c.epsilon = v == "estimate" ? std::nullopt : std::optional<double>(to_real(key, v));
    else if (key == "divergence") c.divergence = (divergence_from_name(v, 0.0), v);
    else if (key == "calibration_size" || key == "K") c.calibration_size = to_count(key, v);
    else if (key == "test_count") c.test_count = to_count(key, v);
    else if (key == "trials") c.trials = to_count(key, v);
    else if (key == "t") c.t = static_cast<int>(to_count(key, v));
    else if (key == "tau0") c.tau0 = static_cast<int>(to_count(key, v));
    else if (key == "formula") c.formula = v;
    else if (key == "predictor") c.predictor = predictor_kind_from_name(v);
    else if (key == "order") c.order = static_cast<int>(to_count(key, v));
    else if (key == "seed") c.seed = to_count(key, v);
    else if (key == "training_count") c.training_count = to_count(key, v);
    else if (key == "aux_count") c.aux_count = to_count(key, v);
    else if (key == "shift_samples") c.shift_samples = to_count(key, v);
    else if (key == "grid_points") c.grid_points = to_count(key, v);
    else if (key == "threads") c.threads = static_cast<unsigned>(to_count(key, v));
    else if (key == "norm") c.norm = norm_from_name(v);
    else if (key == "histogram_bins") c.histogram_bins = to_count(key, v);
    else if (key == "adaptive_k") c.adaptive_k = to_count(key, v);
    else if (key == "alpha_floor") c.alpha_floor = to_real(key, v);
    else if (key == "base_file") c.base_file = v;
    else if (key == "sigma0") c.data.sigma0 = to_real(key, v);
    else if (key == "sigma") c.data.sigma = to_real(key, v);
    else if (key == "length") c.data.length = to_count(key, v);
    else if (key == "dimension") c.data.dimension = to_count(key, v);
    else if (key == "waveform_offset") c.data.waveform.offset = to_real(key, v);
    else if (key == "waveform_terms") c.data.waveform.terms = parse_terms(v);
    else if (key == "record_timing") c.record_timing = v == "true" || v == "1";
    else throw InputError("unknown config key '" + key + "'");
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig c;
  std::stringstream ss{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(ss, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(number) + ": expected key = value");
    set_config_value(c, trimmed(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json terms = Json::array();
  for (const auto& s : c.data.waveform.terms)
    terms.push_back({{"amplitude", s.amplitude}, {"period", s.period}, {"phase", s.phase}});
  return Json{{"method", method_name(c.method)},
              {"delta", c.delta},
              {"epsilon", optional_real(c.epsilon)},
              {"divergence", c.divergence},
              {"calibration_size", c.calibration_size},
              {"test_count", c.test_count},
              {"trials", c.trials},
              {"t", c.t},
              {"tau0", c.tau0},
              {"formula", c.formula},
              {"predictor", predictor_kind_name(c.predictor)},
              {"order", c.order},
              {"seed", c.seed},
              {"training_count", c.training_count},
              {"aux_count", c.aux_count},
              {"shift_samples", c.shift_samples},
              {"grid_points", c.grid_points},
              {"norm", norm_name(c.norm)},
              {"histogram_bins", c.histogram_bins},
              {"adaptive_k", c.adaptive_k},
              {"alpha_floor", c.alpha_floor},
              {"base_file", c.base_file},
              {"sigma0", c.data.sigma0},
              {"sigma", c.data.sigma},
              {"length", c.data.length},
              {"dimension", c.data.dimension},
              {"waveform_offset", c.data.waveform.offset},
              {"waveform_terms", terms}};
}

Histogram make_histogram(const std::vector<double>& values, std::size_t bins) {
  Histogram h;
  if (values.empty() || bins == 0) return h;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  h.lo = *lo;
  h.hi = *hi;
  h.counts.assign(bins, 0);
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double v : values) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - h.lo) / width) : 0;
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

CoverageReport run_coverage_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const Setup setup = prepare(config);

  CoverageReport report;
  report.config = config;
  report.config.data.length = setup.spec.base ? setup.spec.base->size() : setup.spec.length;
  report.target = 1.0 - config.delta;
  report.predictor_fell_back = setup.model.fell_back();

  if (config.epsilon) {
    report.epsilon = *config.epsilon;
  } else {
    if (config.divergence != "tv") throw InputError("epsilon = estimate is only available for total variation");
    if (config.shift_samples < 2) throw InputError("shift_samples must be at least 2");
    report.shift = estimate_shift(config, setup);
    report.epsilon = report.shift->combined;
  }
  const FDivergence divergence = divergence_from_name(config.divergence, report.epsilon);

  report.trials.resize(config.trials);
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.trials));
  if (threads <= 1) {
    for (std::size_t i = 0; i < config.trials; ++i) report.trials[i] = run_trial(config, setup, divergence, i);
  } else {
    // Each trial owns its generators, so the schedule does not affect the results.
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < config.trials; i = next++) {
          try {
            report.trials[i] = run_trial(config, setup, divergence, i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<double> robust, baseline, robust_rho, baseline_rho;
  for (const auto& t : report.trials) {
    robust.push_back(t.robust_coverage);
    baseline.push_back(t.baseline_coverage);
    robust_rho.push_back(t.robust_mean_rho_star);
    baseline_rho.push_back(t.baseline_mean_rho_star);
    report.all_feasible = report.all_feasible && t.robust_region.feasible && t.baseline_region.feasible;
  }
  report.robust_mean = mean_of(robust);
  report.baseline_mean = mean_of(baseline);
  report.robust_standard_error = standard_error(robust);
  report.baseline_standard_error = standard_error(baseline);
  report.robust_mean_rho_star = mean_of(robust_rho);
  report.baseline_mean_rho_star = mean_of(baseline_rho);
  if (config.method == Method::variant1 || config.method == Method::variant2) {
    const auto alphas = normalization_constants(setup.aux, setup.model, to_positive_normal_form(setup.phi),
                                                config.norm, config.alpha_floor);
    report.alphas_floored = alphas.floored;
  }
  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Json to_json(const CoverageReport& r) {
  Json trials = Json::array();
  for (const auto& t : r.trials)
    trials.push_back({{"index", t.index},
                      {"robust_coverage", t.robust_coverage},
                      {"baseline_coverage", t.baseline_coverage},
                      {"robust_region", to_json(t.robust_region)},
                      {"baseline_region", to_json(t.baseline_region)},
                      {"robust_mean_rho_star", real_to_json(t.robust_mean_rho_star)},
                      {"baseline_mean_rho_star", real_to_json(t.baseline_mean_rho_star)},
                      {"calibration_score_histogram", histogram_json(t.calibration_scores)}});
  Json j{{"config", to_json(r.config)},
         {"epsilon", r.epsilon},
         {"target", r.target},
         {"robust_mean_coverage", r.robust_mean},
         {"baseline_mean_coverage", r.baseline_mean},
         {"robust_standard_error", r.robust_standard_error},
         {"baseline_standard_error", r.baseline_standard_error},
         {"robust_mean_rho_star", real_to_json(r.robust_mean_rho_star)},
         {"baseline_mean_rho_star", real_to_json(r.baseline_mean_rho_star)},
         {"all_feasible", r.all_feasible},
         {"predictor_fell_back", r.predictor_fell_back},
         {"alphas_floored", r.alphas_floored}};
  if (r.shift) j["shift_estimate"] = to_json(*r.shift);
  j["trials"] = std::move(trials);
  Json meta{{"trial_count", r.trials.size()}, {"threads", r.config.threads}};
  if (r.config.record_timing) meta["elapsed_seconds"] = r.elapsed_seconds;
  j["runtime"] = std::move(meta);
  return j;
}

std::string histograms_to_csv(const CoverageReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "trial,bin,lo,hi,count\n";
  for (const auto& t : report.trials) {
    const auto& h = t.calibration_scores;
    const double width = h.counts.empty() ? 0.0 : (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      os << t.index << ',' << b << ',' << h.lo + width * static_cast<double>(b) << ','
         << (b + 1 == h.counts.size() ? h.hi : h.lo + width * static_cast<double>(b + 1)) << ',' << h.counts[b]
         << '\n';
  }
  return os.str();
}

}  // namespace rprv
