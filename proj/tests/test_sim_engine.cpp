#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mtcsim/sim_engine.hpp"

using namespace mtcsim;
using Catch::Approx;

namespace {

Scenario baseline_scenario() {
  Scenario sc;  // defaults are the baseline cell: lambda_m=0.1, R=20, rates (0.01, 1)
  sc.lambda_e = 1e-2;
  sc.n_trials = 60;
  sc.n_slots = 100;
  sc.seed = 71;
  sc.threads = 1;
  return sc;
}

}  // namespace

TEST_CASE("no devices means an all-zero series", "[sim_engine]") {
  Scenario sc = baseline_scenario();
  sc.lambda_m = 0.0;
  const auto series = run_trial(sc, 0);
  REQUIRE(series.total_rate.size() == sc.n_slots);
  for (double v : series.total_rate) CHECK(v == 0.0);
}

TEST_CASE("no events pins every slot to the regular rate", "[sim_engine]") {
  Scenario sc = baseline_scenario();
  sc.lambda_e = 0.0;
  const auto series = run_trial(sc, 3);
  // constant series: every device stays regular
  for (double v : series.total_rate) CHECK(v == series.total_rate[0]);
  // and the constant is device_count * rate_regular
  auto dev_rng = stream_for(sc.seed, 3, StreamRole::devices);
  const auto devices = sample_ppp(sc.lambda_m, sc.cell(), dev_rng);
  CHECK(series.total_rate[0] ==
        Approx(static_cast<double>(devices.points.size()) * sc.rates.rate_regular)
            .margin(1e-9));
}

TEST_CASE("trials are deterministic in (seed, trial_index)", "[sim_engine]") {
  const Scenario sc = baseline_scenario();
  const auto a = run_trial(sc, 5);
  const auto b = run_trial(sc, 5);
  REQUIRE(a.total_rate == b.total_rate);
  const auto c = run_trial(sc, 6);
  CHECK(a.total_rate != c.total_rate);
}

TEST_CASE("experiments reproduce bit for bit, regardless of worker count",
          "[sim_engine]") {
  Scenario sc = baseline_scenario();
  sc.n_trials = 24;
  const auto s1 = run_experiment(sc);
  const auto s2 = run_experiment(sc);
  CHECK(s1.mean_rate == s2.mean_rate);
  CHECK(s1.std_error == s2.std_error);
  Scenario sc4 = sc;
  sc4.threads = 4;  // oversubscribed on small hosts; reduction order is fixed
  const auto s3 = run_experiment(sc4);
  CHECK(s3.mean_rate == s1.mean_rate);
  CHECK(s3.std_error == s1.std_error);
}

TEST_CASE("single-trial single-slot experiments flag their undefined error",
          "[sim_engine]") {
  Scenario sc = baseline_scenario();
  sc.n_trials = 1;
  sc.n_slots = 1;
  const auto stats = run_experiment(sc);
  CHECK_FALSE(stats.std_error_defined);
  CHECK(stats.std_error == 0.0);
  const auto series = run_trial(sc, 0);
  CHECK(stats.mean_rate == series.total_rate[0]);
}

TEST_CASE("mc mean tracks the closed form", "[sim_engine][statistical]") {
  Scenario sc = baseline_scenario();
  sc.n_trials = 80;
  const auto stats = run_experiment(sc);
  REQUIRE(stats.closed_form.has_value());
  CHECK(stats.closed_form->value == Approx(8.83285745129076).epsilon(1e-12));
  CHECK(std::fabs(stats.mean_rate - stats.closed_form->value) <= 4.0 * stats.std_error);
}

TEST_CASE("markov with per-device q reproduces the bernoulli mean",
          "[sim_engine][statistical]") {
  Scenario bern = baseline_scenario();
  bern.n_trials = 120;
  Scenario markov = bern;
  markov.model.kind = TrafficModelKind::markov;
  markov.model.q.reset();  // q tracks each device's own alarm probability
  const auto sb = run_experiment(bern);
  const auto sm = run_experiment(markov);
  const double combined =
      std::sqrt(sb.std_error * sb.std_error + sm.std_error * sm.std_error);
  CHECK(std::fabs(sb.mean_rate - sm.mean_rate) <= 4.0 * combined);
  CHECK_FALSE(sm.approx_markov.has_value());  // no fixed q, no approximation
}

TEST_CASE("markov mc mean respects the steady-state upper bound",
          "[sim_engine][statistical]") {
  Scenario sc = baseline_scenario();
  sc.model.kind = TrafficModelKind::markov;
  sc.model.q = 0.9;
  sc.n_trials = 80;
  const auto stats = run_experiment(sc);
  REQUIRE(stats.approx_markov.has_value());
  CHECK(stats.mean_rate <= *stats.approx_markov + 4.0 * stats.std_error);
}

TEST_CASE("doubling trials shrinks the standard error about sqrt(2)-fold",
          "[sim_engine][statistical]") {
  Scenario sc = baseline_scenario();
  sc.n_trials = 150;
  const auto small = run_experiment(sc);
  sc.n_trials = 300;
  const auto big = run_experiment(sc);
  const double ratio = big.std_error / small.std_error;
  CHECK(std::fabs(ratio * std::sqrt(2.0) - 1.0) <= 0.2);
}

TEST_CASE("a single-value sweep equals run_experiment exactly", "[sim_engine]") {
  Scenario sc = baseline_scenario();
  sc.n_trials = 30;
  const auto direct = run_experiment(sc);
  const auto points = sweep(sc, SweepAxis::lambda_e, {sc.lambda_e});
  REQUIRE(points.size() == 1);
  REQUIRE(points[0].stats.has_value());
  CHECK(points[0].stats->mean_rate == direct.mean_rate);
  CHECK(points[0].stats->std_error == direct.std_error);
}

TEST_CASE("a q sweep under the bernoulli model is flat", "[sim_engine][statistical]") {
  Scenario sc = baseline_scenario();
  sc.n_trials = 100;
  const auto points = sweep(sc, SweepAxis::q, {0.1, 0.5, 0.9});
  REQUIRE(points.size() == 3);
  double max_se = 0.0;
  for (const auto& p : points) {
    REQUIRE(p.stats.has_value());
    max_se = std::max(max_se, p.stats->std_error);
    // the closed form does not depend on q at all
    CHECK(p.stats->closed_form->value == points[0].stats->closed_form->value);
  }
  for (const auto& p : points) {
    CHECK(std::fabs(p.stats->mean_rate - points[0].stats->mean_rate) <=
          4.0 * std::sqrt(2.0) * max_se);
  }
}

TEST_CASE("sweeps collect per-point errors and continue", "[sim_engine]") {
  Scenario sc = baseline_scenario();
  sc.n_trials = 5;
  const auto points = sweep(sc, SweepAxis::lambda_e, {1e-3, -1.0, 1e-2});
  REQUIRE(points.size() == 3);
  CHECK(points[0].stats.has_value());
  CHECK_FALSE(points[1].stats.has_value());
  CHECK_FALSE(points[1].error.empty());
  CHECK(points[2].stats.has_value());
}

TEST_CASE("invalid scenarios are rejected with context", "[sim_engine]") {
  Scenario sc = baseline_scenario();
  sc.n_slots = 0;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = baseline_scenario();
  sc.model.kind = TrafficModelKind::markov;
  sc.model.q = 1.0;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = baseline_scenario();
  sc.acf_max_lag = 99;
  sc.n_slots = 100;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = baseline_scenario();
  sc.epsilon = 0.0;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("fixed event windows run and attach the acf when asked", "[sim_engine]") {
  Scenario sc = baseline_scenario();
  sc.window_policy = EventWindowPolicy::fixed_extent;
  sc.window_extent = 100.0;
  sc.model.kind = TrafficModelKind::markov;
  sc.model.q = 0.5;
  sc.n_trials = 10;
  sc.n_slots = 400;
  sc.acf_max_lag = 12;
  const auto stats = run_experiment(sc);
  REQUIRE(stats.acf.has_value());
  CHECK(stats.acf->lags.size() == 13);
  CHECK(stats.acf->n_trials == 10);
  CHECK(stats.acf->values[0] == Approx(1.0).margin(0.05));
  REQUIRE(stats.acf->std_errors.size() == 13);
}
