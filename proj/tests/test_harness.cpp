#include "rprv/error.hpp"
#include "rprv/experiment.hpp"
#include "rprv/io.hpp"
#include "rprv/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace rprv;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.calibration_size = 300;
  c.test_count = 50;
  c.trials = 4;
  c.training_count = 100;
  c.aux_count = 100;
  c.shift_samples = 300;
  c.t = 20;
  c.formula = "G[0,25] (x0 >= 60)";
  return c;
}

}  // namespace

TEST_CASE("synthetic trajectories") {
  SyntheticSpec spec;
  spec.length = 12;
  spec.dimension = 2;
  spec.sigma0 = 1e-12;
  const auto base = spec.base_trajectory();
  CHECK(base.state(0)[0] == 115.0);
  for (const auto& x : generate_synthetic(spec, 5, Side::nominal))
    for (std::size_t i = 0; i < x.data().size(); ++i) CHECK(std::abs(x.data()[i] - base.data()[i]) <= 1e-9);

  spec.sigma0 = 3.0;
  spec.sigma = 3.5;
  spec.length = 4;
  spec.dimension = 1;
  const auto xs = generate_synthetic(spec, 10000, Side::shifted);
  for (std::size_t tau = 0; tau < 4; ++tau) {
    double m = 0, ss = 0;
    for (const auto& x : xs) m += x.state(tau)[0];
    m /= 10000;
    for (const auto& x : xs) ss += (x.state(tau)[0] - m) * (x.state(tau)[0] - m);
    CHECK(ss / 9999 == doctest::Approx(3.5 * 3.5).epsilon(0.05));
  }
  CHECK(trajectories_to_csv(generate_synthetic(spec, 3, Side::nominal)) ==
        trajectories_to_csv(generate_synthetic(spec, 3, Side::nominal)));
  CHECK(trajectories_to_csv(generate_synthetic(spec, 3, Side::nominal)) !=
        trajectories_to_csv(generate_synthetic(spec, 3, Side::shifted)));
  spec.sigma = 0.0;
  CHECK_THROWS(generate_synthetic(spec, 1, Side::nominal));
}

TEST_CASE("trajectory ingestion") {
  const std::string csv =
      "trajectory_id,time_index,x0,x1\n"
      "b,0,1,2\nb,1,3,4\nb,2,5,6\n"
      "a,0,0.5,1\na,1,1.5,2\na,2,2.5,3\n";
  const auto xs = parse_trajectories_csv(csv);
  REQUIRE(xs.size() == 2);
  CHECK(xs[0].id() == "a");
  CHECK(xs[1].size() == 3);
  CHECK(xs[1].state(2)[1] == 6.0);

  const std::string shuffled = "a,2,2.5,3\nb,1,3,4\na,0,0.5,1\nb,2,5,6\nb,0,1,2\na,1,1.5,2\n";
  CHECK(parse_trajectories_csv(shuffled) == xs);

  const auto json = trajectories_to_json(xs).dump();
  CHECK(parse_trajectories_json(json) == xs);
  CHECK(parse_trajectories_csv(trajectories_to_csv(xs)) == xs);

  CHECK(parse_trajectories_csv("10,0,1\n2,0,1\n")[0].id() == "2");  // numeric ids sort numerically

  CHECK_THROWS_WITH_AS(parse_trajectories_csv("a,0,1\na,1,2\nb,0,1\n"), doctest::Contains("ragged"), InputError);
  CHECK_THROWS_WITH_AS(parse_trajectories_csv("a,0,1\na,0,2\n"), doctest::Contains("duplicate"), InputError);
  CHECK_THROWS_WITH_AS(parse_trajectories_csv("a,0,1\na,1,abc\n"), doctest::Contains("non-numeric"), InputError);
  CHECK_THROWS_AS(parse_trajectories_csv("a,0,1\na,2,2\n"), InputError);  // gap in time
  CHECK_THROWS_AS(parse_trajectories_csv("a,0,1\na,1,2,3\n"), InputError);
  CHECK_THROWS_AS(parse_trajectories_json("[{\"id\": 1, \"states\": [[1], [2, 3]]}]"), InputError);
  CHECK_THROWS_AS(parse_trajectories_json("{"), InputError);
}

TEST_CASE("score and prediction files") {
  CHECK(parse_scores_csv("score\n1\n2.5\n-3\n").values() == std::vector<double>{1, 2.5, -3});
  CHECK(parse_scores_csv("1\n2\n").size() == 2);
  CHECK(parse_scores_json("[1, 2, 3]").values() == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(parse_scores_csv("score\n1\nx\n"), InputError);
  CHECK_THROWS_AS(parse_scores_csv("score\n"), InputError);
  const ScoreSet s({0.1, 1.0 / 3.0, -2e-17});
  CHECK(parse_scores_csv(scores_to_csv(s)).values() == s.values());

  const std::map<std::string, std::vector<StateVector>> preds{{"a", {{1.0 / 7.0, 2}, {3, 4}}}};
  CHECK(parse_external_predictions(external_predictions_to_json(preds).dump()) == preds);
}

TEST_CASE("JSON encodings") {
  CHECK(real_to_json(INFINITY) == "inf");
  CHECK(real_from_json(real_to_json(-INFINITY)) == -INFINITY);
  PredictionRegion r;
  r.value = INFINITY;
  const auto j = to_json(r);
  for (const char* key : {"value", "adjusted_level", "feasible", "delta", "epsilon"}) CHECK(j.contains(key));
  VerificationOutcome o;
  o.method = Method::variant2;
  o.predicate_bounds = PredicateBoundMap(1, 2);
  o.predicate_bounds->set("(x0 >= 60)", 2, -1.5);
  CHECK(to_json(o)["predicate_bounds"]["(x0 >= 60)@2"] == -1.5);
}

TEST_CASE("experiment configuration") {
  const auto c = parse_experiment_config(
      "# comment\nmethod = variant1\ndelta=0.1\nepsilon = 0.05\nK = 500\nwaveform_terms = 25:210:0, 2:30\n"
      "sigma0 = 1\nnorm = linf\n");
  CHECK(c.method == Method::variant1);
  CHECK(c.delta == 0.1);
  CHECK(c.epsilon == std::optional<double>(0.05));
  CHECK(c.calibration_size == 500);
  CHECK(c.data.waveform.terms.size() == 2);
  CHECK(c.data.waveform.terms[1].period == 30.0);
  CHECK(c.norm == BallNorm::linf);
  CHECK_FALSE(parse_experiment_config("epsilon = estimate").epsilon.has_value());
  CHECK_THROWS_AS(parse_experiment_config("colour = blue"), InputError);
  CHECK_THROWS_AS(parse_experiment_config("delta = lots"), InputError);
  CHECK_THROWS_AS(parse_experiment_config("method = magic"), InputError);
  CHECK_THROWS_AS(parse_experiment_config("just words"), InputError);
}

TEST_CASE("coverage experiment: no shift, no robustness") {
  ExperimentConfig c = small_config();
  c.epsilon = 0.0;
  c.data.sigma = c.data.sigma0;
  c.trials = 20;
  const auto r = run_coverage_experiment(c);
  CHECK(r.all_feasible);
  CHECK(r.robust_mean >= r.target - 3 * r.robust_standard_error);
  double mean = 0;
  for (const auto& t : r.trials) {
    mean += t.robust_coverage;
    CHECK(t.robust_coverage >= 0.0);
    CHECK(t.robust_coverage <= 1.0);
    std::size_t total = 0;
    for (auto n : t.calibration_scores.counts) total += n;
    CHECK(total == c.calibration_size);
    CHECK(t.robust_region.value == t.baseline_region.value);
  }
  CHECK(std::abs(mean / 20 - r.robust_mean) <= 1e-12);
}

TEST_CASE("coverage experiment: determinism and arm consistency") {
  ExperimentConfig c = small_config();
  c.trials = 1;
  const std::string once = to_json(run_coverage_experiment(c)).dump();
  CHECK(once == to_json(run_coverage_experiment(c)).dump());

  c.trials = 4;
  c.threads = 1;
  const auto serial = run_coverage_experiment(c);
  c.threads = 3;
  const auto parallel = run_coverage_experiment(c);
  c.threads = 1;
  CHECK(to_json(serial)["trials"].dump() == to_json(parallel)["trials"].dump());
  CHECK(serial.robust_mean == parallel.robust_mean);

  // The zero-shift arm of an estimated-epsilon run is a plain vanilla run.
  ExperimentConfig vanilla = c;
  vanilla.epsilon = 0.0;
  const auto v = run_coverage_experiment(vanilla);
  REQUIRE(v.trials.size() == serial.trials.size());
  for (std::size_t i = 0; i < v.trials.size(); ++i) {
    CHECK(v.trials[i].robust_coverage == serial.trials[i].baseline_coverage);
    CHECK(v.trials[i].robust_mean_rho_star == serial.trials[i].baseline_mean_rho_star);
  }
  CHECK(serial.shift.has_value());
  CHECK(serial.shift->components.size() == 3);
  CHECK(serial.epsilon == serial.shift->combined);
}

TEST_CASE("coverage experiment: infeasible settings are reported") {
  ExperimentConfig c = small_config();
  c.epsilon = 0.25;
  c.trials = 2;
  const auto r = run_coverage_experiment(c);
  CHECK_FALSE(r.all_feasible);
  for (const auto& t : r.trials) {
    CHECK_FALSE(t.robust_region.feasible);
    CHECK(t.robust_coverage == 1.0);
    CHECK(t.robust_mean_rho_star == -INFINITY);
  }
  CHECK(to_json(r)["robust_mean_rho_star"] == "-inf");

  ExperimentConfig bad = small_config();
  bad.t = 30;
  CHECK_THROWS_AS(run_coverage_experiment(bad), InputError);
  bad = small_config();
  bad.predictor = PredictorKind::external_file;
  CHECK_THROWS_AS(run_coverage_experiment(bad), InputError);
}

TEST_CASE("histograms") {
  const auto h = make_histogram({0, 1, 2, 3, 4}, 2);
  CHECK(h.counts == std::vector<std::size_t>{2, 3});
  CHECK(make_histogram({1, 1, 1}, 4).counts == std::vector<std::size_t>{3, 0, 0, 0});
}

TEST_CASE("coverage holds for every method, including a poor predictor") {
  for (Method m : {Method::direct, Method::variant1, Method::variant2, Method::adaptive_direct}) {
    ExperimentConfig c;  // running-example surrogate, epsilon estimated
    c.method = m;
    c.trials = 20;
    const auto r = run_coverage_experiment(c);
    CHECK_MESSAGE(r.robust_mean >= 0.8 - 3 * r.robust_standard_error, method_name(m));
  }
  ExperimentConfig c;
  c.predictor = PredictorKind::hold_last;
  c.trials = 20;
  const auto r = run_coverage_experiment(c);
  CHECK(r.robust_mean >= 0.8 - 3 * r.robust_standard_error);
}
