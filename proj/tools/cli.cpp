#include "cli.hpp"

#include "rprv/error.hpp"
#include "rprv/experiment.hpp"
#include "rprv/io.hpp"
#include "rprv/parser.hpp"
#include "rprv/semantics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <optional>
#include <ostream>

namespace rprv::cli {

namespace {

void emit(const Json& doc, const std::string& output, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (output.empty()) {
    out << text;
  } else {
    write_text(output, text);
  }
}

std::vector<Trajectory> downsample_all(std::vector<Trajectory> xs, std::size_t stride) {
  if (stride <= 1) return xs;
  for (auto& x : xs) x = x.downsampled(stride);
  return xs;
}

struct VerifyArgs {
  std::string formula, calibration, observed, id, training, predictions, aux, output;
  std::string method = "direct", predictor = "hold-last", divergence = "tv", norm = "l2";
  std::optional<int> t;
  int tau0 = 0;
  int order = 1;
  double delta = 0.2;
  double epsilon = 0.0;
  std::size_t downsample = 1;
  std::size_t adaptive_k = 10;
};

int do_verify(const VerifyArgs& a, std::ostream& out) {
  const auto calibration = downsample_all(read_trajectories(a.calibration), a.downsample);
  const auto observed_set = downsample_all(read_trajectories(a.observed), a.downsample);
  const Trajectory* chosen = &observed_set.front();
  if (!a.id.empty()) {
    auto it = std::find_if(observed_set.begin(), observed_set.end(), [&](const auto& x) { return x.id() == a.id; });
    if (it == observed_set.end()) throw InputError("no observed trajectory with id '" + a.id + "'");
    chosen = &*it;
  }
  const int t = a.t ? *a.t : static_cast<int>(chosen->size()) - 1;
  if (t < 0 || static_cast<std::size_t>(t) >= chosen->size())
    throw InputError("observed trajectory has fewer than t + 1 states");
  const Trajectory observed = chosen->prefix(static_cast<std::size_t>(t + 1));

  const Formula phi = parse_formula(a.formula, calibration.front().dimension());
  const int h = prediction_horizon(phi, a.tau0, t);
  const PredictorKind kind = predictor_kind_from_name(a.predictor);

  std::optional<PredictorModel> model;
  if (kind == PredictorKind::external_file) {
    if (a.predictions.empty()) throw InputError("--predictor external needs --predictions");
    model = PredictorModel::external(t, h, read_external_predictions(a.predictions));
  } else if (kind == PredictorKind::autoregressive) {
    if (a.training.empty()) throw InputError("--predictor ar needs --training");
    model = fit_predictor(downsample_all(read_trajectories(a.training), a.downsample), t, h, kind, a.order);
  } else {
    model = fit_predictor({}, t, h, kind);
  }

  const Method method = method_from_name(a.method);
  std::vector<Trajectory> aux;
  if (method != Method::direct) {
    if (a.aux.empty()) throw InputError("--method " + a.method + " needs --aux trajectories");
    aux = downsample_all(read_trajectories(a.aux), a.downsample);
  }
  MonitorSettings settings;
  settings.method = method;
  settings.tau0 = a.tau0;
  settings.delta = a.delta;
  settings.divergence = divergence_from_name(a.divergence, a.epsilon);
  settings.norm = norm_from_name(a.norm);
  const RuntimeMonitor monitor(phi, calibration, aux, *model, settings, std::nullopt, a.adaptive_k);
  const VerificationOutcome outcome = monitor.verify(observed);

  Json doc = to_json(outcome);
  doc["formula"] = to_string(phi);
  doc["trajectory_id"] = observed.id();
  doc["t"] = t;
  doc["horizon"] = h;
  if (model->fell_back()) doc["predictor_fell_back"] = true;
  emit(doc, a.output, out);
  return outcome.region.feasible ? kSuccess : kInfeasible;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust predictive runtime verification for signal temporal logic"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Lower-bound the robustness of one observed prefix");
  verify->add_option("--formula", va.formula, "STL formula")->required();
  verify->add_option("--calibration", va.calibration, "Calibration trajectories (CSV or JSON)")->required();
  verify->add_option("--observed", va.observed, "Observed trajectory file")->required();
  verify->add_option("--id", va.id, "Trajectory id within --observed (default: first)");
  verify->add_option("--t", va.t, "Last observed time index (default: last state of the observed trajectory)");
  verify->add_option("--tau0", va.tau0, "Evaluation time");
  verify->add_option("--method", va.method, "direct | variant1 | variant2 | adaptive-direct");
  verify->add_option("--delta", va.delta, "Failure probability");
  verify->add_option("--epsilon", va.epsilon, "Distribution shift bound");
  verify->add_option("--divergence", va.divergence, "tv | kl | chi2");
  verify->add_option("--predictor", va.predictor, "hold-last | constant-velocity | ar | external");
  verify->add_option("--order", va.order, "Autoregressive order");
  verify->add_option("--training", va.training, "Predictor training trajectories");
  verify->add_option("--predictions", va.predictions, "External predictions JSON");
  verify->add_option("--aux", va.aux, "Auxiliary trajectories for normalization / adaptive weights");
  verify->add_option("--norm", va.norm, "Ball norm for variant1: l2 | linf");
  verify->add_option("--adaptive-k", va.adaptive_k, "Neighbours for adaptive weights");
  verify->add_option("--downsample", va.downsample, "Keep every n-th state of all trajectories");
  verify->add_option("--output", va.output, "Write JSON here instead of stdout");

  std::string scores_path, cal_output, cal_divergence = "tv";
  double cal_delta = 0.2, cal_epsilon = 0.0;
  auto* calibrate = app.add_subcommand("calibrate", "Prediction region from a score file");
  calibrate->add_option("--scores", scores_path, "Scores (single-column CSV or JSON array)")->required();
  calibrate->add_option("--delta", cal_delta, "Failure probability");
  calibrate->add_option("--epsilon", cal_epsilon, "Distribution shift bound");
  calibrate->add_option("--divergence", cal_divergence, "tv | kl | chi2");
  calibrate->add_option("--output", cal_output, "Write JSON here instead of stdout");

  std::vector<std::string> shift_files;
  std::string shift_output;
  std::size_t grid_points = 10000;
  std::optional<double> bandwidth;
  auto* shift = app.add_subcommand("estimate-shift", "Total-variation estimate between score samples");
  shift->add_option("files", shift_files, "Score files as consecutive (calibration, test) pairs")->required();
  shift->add_option("--grid-points", grid_points, "Integration grid size");
  shift->add_option("--bandwidth", bandwidth, "Kernel bandwidth (default: Silverman)");
  shift->add_option("--output", shift_output, "Write JSON here instead of stdout");

  std::string config_path, exp_output, histogram_output, exp_method, exp_formula, exp_epsilon;
  std::optional<double> exp_delta;
  std::optional<std::uint64_t> exp_seed;
  std::optional<unsigned> exp_threads;
  std::optional<std::size_t> exp_trials;
  auto* experiment = app.add_subcommand("experiment", "Coverage experiment on synthetic data");
  experiment->add_option("config", config_path, "Flat key = value config file")->required();
  experiment->add_option("--delta", exp_delta);
  experiment->add_option("--epsilon", exp_epsilon, "Number or 'estimate'");
  experiment->add_option("--method", exp_method);
  experiment->add_option("--formula", exp_formula);
  experiment->add_option("--seed", exp_seed);
  experiment->add_option("--threads", exp_threads);
  experiment->add_option("--trials", exp_trials);
  experiment->add_option("--output", exp_output, "Write the report here instead of stdout");
  experiment->add_option("--histograms", histogram_output, "Write calibration-score histogram CSV here");

  std::string gen_config, gen_output, gen_side = "nominal";
  std::size_t gen_count = 10;
  std::optional<std::uint64_t> gen_seed;
  auto* generate = app.add_subcommand("generate", "Write synthetic trajectories");
  generate->add_option("--config", gen_config, "Experiment config supplying the data keys");
  generate->add_option("--count", gen_count, "Number of trajectories");
  generate->add_option("--side", gen_side, "nominal (sigma0) | shifted (sigma)");
  generate->add_option("--seed", gen_seed);
  generate->add_option("--output", gen_output, "CSV or JSON path (default: CSV on stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*verify) return do_verify(va, out);

    if (*calibrate) {
      const ScoreSet scores = read_scores(scores_path);
      const PredictionRegion region =
          robust_quantile(scores, cal_delta, divergence_from_name(cal_divergence, cal_epsilon));
      emit(to_json(region), cal_output, out);
      if (!region.feasible) err << "infeasible: calibration set too small for this delta and epsilon\n";
      return region.feasible ? kSuccess : kInfeasible;
    }

    if (*shift) {
      if (shift_files.size() % 2 != 0) throw InputError("estimate-shift expects (calibration, test) file pairs");
      std::vector<std::pair<ScoreSet, ScoreSet>> pairs;
      for (std::size_t i = 0; i < shift_files.size(); i += 2)
        pairs.emplace_back(read_scores(shift_files[i]), read_scores(shift_files[i + 1]));
      TvOptions opts;
      opts.grid_points = grid_points;
      opts.bandwidth = bandwidth;
      emit(to_json(estimate_epsilon(pairs, opts)), shift_output, out);
      return kSuccess;
    }

    if (*experiment) {
      ExperimentConfig config = parse_experiment_config(read_text(config_path));
      if (exp_delta) config.delta = *exp_delta;
      if (!exp_epsilon.empty()) set_config_value(config, "epsilon", exp_epsilon);
      if (!exp_method.empty()) set_config_value(config, "method", exp_method);
      if (!exp_formula.empty()) config.formula = exp_formula;
      if (exp_seed) config.seed = *exp_seed;
      if (exp_threads) config.threads = *exp_threads;
      if (exp_trials) config.trials = *exp_trials;
      const CoverageReport report = run_coverage_experiment(config);
      emit(to_json(report), exp_output, out);
      if (!histogram_output.empty()) write_text(histogram_output, histograms_to_csv(report));
      if (!report.all_feasible) err << "infeasible: at least one trial produced an unbounded region\n";
      return report.all_feasible ? kSuccess : kInfeasible;
    }

    if (*generate) {
      ExperimentConfig config = gen_config.empty() ? ExperimentConfig{} : parse_experiment_config(read_text(gen_config));
      SyntheticSpec spec = config.data;
      if (!config.base_file.empty()) spec.base = read_trajectories(config.base_file).front();
      if (spec.length == 0) {
        const Formula phi = parse_formula(config.formula, spec.dimension);
        spec.length = static_cast<std::size_t>(config.t + prediction_horizon(phi, config.tau0, config.t) + 1);
      }
      spec.seed = gen_seed ? *gen_seed : config.seed;
      if (gen_side != "nominal" && gen_side != "shifted") throw InputError("--side must be nominal or shifted");
      const auto xs = generate_synthetic(spec, gen_count, gen_side == "nominal" ? Side::nominal : Side::shifted);
      if (gen_output.empty()) {
        out << trajectories_to_csv(xs);
      } else {
        write_trajectories(gen_output, xs);
      }
      return kSuccess;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace rprv::cli
