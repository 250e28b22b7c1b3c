#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtcsim/config.hpp"
#include "mtcsim/results_io.hpp"

using namespace mtcsim;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepPoint fake_point(double axis, double mean, double se, bool with_acf) {
  SweepPoint p;
  p.axis_value = axis;
  SummaryStats s;
  s.mean_rate = mean;
  s.std_error = se;
  s.std_error_defined = true;
  s.n_trials = 10;
  s.n_slots = 100;
  s.closed_form = ClosedFormRate{mean * 1.01, 125.0, 1.0, 0.25};
  if (with_acf) {
    AcfEstimate acf;
    acf.lags = {0, 1, 2};
    acf.values = {1.0, 0.5, 0.25};
    acf.std_errors = {0.0, 0.01, 0.02};
    acf.n_trials = 10;
    acf.n_slots = 100;
    s.acf = acf;
  }
  p.stats = s;
  return p;
}

}  // namespace

TEST_CASE("table1-defaults preset pins the baseline experiment", "[cli_io]") {
  const auto cfg = preset_config("table1-defaults");
  CHECK(cfg.lambda_m == 0.1);
  CHECK(cfg.cell_radius == 20.0);
  CHECK(cfg.rate_alarm == 1.0);
  CHECK(cfg.rate_regular == 0.01);
  CHECK(cfg.model == "bernoulli");
  CHECK(cfg.sweep_axis == "lambda_e");
  REQUIRE(cfg.sweep_values.size() == 7);
  CHECK(cfg.sweep_values.front() == 1e-5);
  CHECK(cfg.sweep_values.back() == 10.0);
  CHECK(cfg.n_trials == 500);
}

TEST_CASE("fig5 preset drives the acf study", "[cli_io]") {
  const auto cfg = preset_config("fig5");
  CHECK(cfg.lambda_m == 0.01);
  CHECK(cfg.lambda_e == 0.01);
  CHECK(cfg.model == "markov");
  CHECK(cfg.sweep_axis == "q");
  CHECK(cfg.sweep_values == std::vector<double>{0.1, 0.5, 0.9});
  CHECK(cfg.n_slots == 10000);
  CHECK(cfg.n_trials == 100);
  CHECK(cfg.acf_max_lag == 40);
  CHECK_THROWS_WITH(preset_config("fig6"), ContainsSubstring("unknown preset"));
}

TEST_CASE("validation speaks plainly about bad values", "[cli_io]") {
  ExperimentConfig cfg;
  cfg.model = "markov";
  cfg.q = "1";
  CHECK_THROWS_WITH(cfg.make_scenario(), ContainsSubstring("non-ergodic"));
  cfg.q = "0.5";
  cfg.lambda_m = -0.1;
  CHECK_THROWS_AS(cfg.make_scenario(), ConfigError);
  cfg = ExperimentConfig{};
  cfg.model = "brrnoulli";
  CHECK_THROWS_WITH(cfg.make_scenario(), ContainsSubstring("model"));
  cfg = ExperimentConfig{};
  cfg.q = "maybe";
  cfg.model = "markov";
  CHECK_THROWS_WITH(cfg.make_scenario(), ContainsSubstring("number"));
  cfg = ExperimentConfig{};
  cfg.event_window = "sometimes";
  CHECK_THROWS_WITH(cfg.make_scenario(), ContainsSubstring("event_window"));
}

TEST_CASE("q = px leaves the holding parameter tracking each device", "[cli_io]") {
  ExperimentConfig cfg;
  cfg.model = "markov";
  cfg.q = "px";
  const auto sc = cfg.make_scenario();
  CHECK(sc.model.kind == TrafficModelKind::markov);
  CHECK_FALSE(sc.model.q.has_value());
}

TEST_CASE("config files parse strictly", "[cli_io]") {
  const auto path = temp_file("mtcsim_cfg_strict.cfg");
  {
    std::ofstream out(path);
    out << "# comment line\n";
    out << "lambda_m = 0.05\n";
    out << "model = markov\n";
    out << "q = 0.25\n";
    out << "sweep_values = 0.1, 0.2 ,0.3\n";
  }
  const auto cfg = parse_config_file(path.string());
  CHECK(cfg.lambda_m == 0.05);
  CHECK(cfg.model == "markov");
  CHECK(cfg.q == "0.25");
  CHECK(cfg.sweep_values == std::vector<double>{0.1, 0.2, 0.3});

  {
    std::ofstream out(path);
    out << "lambda_q = 3\n";
  }
  CHECK_THROWS_WITH(parse_config_file(path.string()), ContainsSubstring("unknown key"));
  {
    std::ofstream out(path);
    out << "lambda_m = 1\nlambda_m = 2\n";
  }
  CHECK_THROWS_WITH(parse_config_file(path.string()), ContainsSubstring("duplicate"));
  {
    std::ofstream out(path);
    out << "lambda_m 0.3\n";
  }
  CHECK_THROWS_WITH(parse_config_file(path.string()), ContainsSubstring("key = value"));
  CHECK_THROWS_WITH(parse_config_file("/nonexistent/x.cfg"), ContainsSubstring("cannot open"));
  std::filesystem::remove(path);
}

TEST_CASE("a preset named in the file seeds the config before overrides", "[cli_io]") {
  const auto path = temp_file("mtcsim_cfg_preset.cfg");
  {
    std::ofstream out(path);
    out << "preset = fig3\n";
    out << "n_trials = 12\n";
  }
  const auto cfg = parse_config_file(path.string());
  CHECK(cfg.sweep_values.size() == 7);  // from the preset
  CHECK(cfg.n_trials == 12);            // overridden
  std::filesystem::remove(path);
}

TEST_CASE("saved configs parse back field for field", "[cli_io]") {
  ExperimentConfig cfg;
  cfg.lambda_m = 0.037;
  cfg.lambda_e = 3.3e-4;
  cfg.model = "markov";
  cfg.q = "px";
  cfg.n_slots = 123;
  cfg.n_trials = 7;
  cfg.event_window = "fixed";
  cfg.window_extent = 80.5;
  cfg.seed = 991;
  cfg.acf_max_lag = 9;
  cfg.acf_convention = "textbook";
  cfg.atpf = "disk_step";
  cfg.atpf_threshold = 4.25;
  cfg.atpf_level = 0.66;
  cfg.sweep_axis = "q";
  cfg.sweep_values = {0.1, 0.2, 0.35};
  cfg.out = "alt.csv";
  cfg.format = "json";
  const auto path = temp_file("mtcsim_cfg_roundtrip.cfg");
  save_config(cfg, path.string());
  const auto parsed = parse_config_file(path.string());
  CHECK(parsed == cfg);
  std::filesystem::remove(path);
}

TEST_CASE("csv emission writes the pinned schema deterministically", "[cli_io]") {
  ExperimentConfig cfg;
  cfg.sweep_axis = "lambda_e";
  cfg.out = temp_file("mtcsim_results.csv").string();
  const std::vector<SweepPoint> points{fake_point(1e-3, 2.5, 0.1, false),
                                       fake_point(1e-2, 8.8, 0.2, false)};
  const auto files = emit_results(points, cfg);
  REQUIRE(files.size() == 1);
  const std::string body = slurp(files[0]);
  CHECK(body.rfind("axis_value,mc_mean,mc_stderr,closed_form,approx_markov,n_trials,n_slots\n",
                   0) == 0);
  CHECK(body.find("0.001,2.5,0.1,2.525,,10,100\n") != std::string::npos);
  CHECK(body.find("\r") == std::string::npos);
  // byte-identical on rewrite
  emit_results(points, cfg);
  CHECK(slurp(files[0]) == body);
  // an undefined standard error leaves its field empty
  auto single = fake_point(5.0, 3.0, 0.0, false);
  single.stats->std_error_defined = false;
  emit_results({single}, cfg);
  CHECK(slurp(files[0]).find("5,3,,3.03,,10,100\n") != std::string::npos);
  std::filesystem::remove(files[0]);
}

TEST_CASE("acf sweeps write one acf file per point", "[cli_io]") {
  ExperimentConfig cfg;
  cfg.sweep_axis = "q";
  cfg.out = temp_file("mtcsim_acf.csv").string();
  const std::vector<SweepPoint> points{fake_point(0.1, 2.0, 0.1, true),
                                       fake_point(0.5, 2.2, 0.1, true)};
  const auto files = emit_results(points, cfg);
  REQUIRE(files.size() == 3);
  CHECK_THAT(files[1], ContainsSubstring("_acf_q0.1"));
  const std::string body = slurp(files[1]);
  CHECK(body.rfind("lag,acf_mean,acf_stderr\n", 0) == 0);
  CHECK(body.find("1,0.5,0.01\n") != std::string::npos);
  for (const auto& f : files) std::filesystem::remove(f);
}

TEST_CASE("json emission mirrors the schema with a version marker", "[cli_io]") {
  ExperimentConfig cfg;
  cfg.format = "json";
  cfg.out = temp_file("mtcsim_results.json").string();
  std::vector<SweepPoint> points{fake_point(1e-3, 2.5, 0.1, true)};
  SweepPoint failed;
  failed.axis_value = 7.0;
  failed.error = "boom";
  points.push_back(failed);
  const auto files = emit_results(points, cfg);
  REQUIRE(files.size() == 1);
  const auto doc = nlohmann::json::parse(slurp(files[0]));
  CHECK(doc.at("schema_version") == 1);
  CHECK(doc.at("axis") == "lambda_e");
  REQUIRE(doc.at("points").size() == 2);
  CHECK(doc["points"][0]["mc_mean"] == 2.5);
  CHECK(doc["points"][0]["acf"]["lags"].size() == 3);
  CHECK(doc["points"][1]["error"] == "boom");
  std::filesystem::remove(files[0]);
}

TEST_CASE("emission requires at least one point", "[cli_io]") {
  ExperimentConfig cfg;
  cfg.out = temp_file("mtcsim_empty.csv").string();
  CHECK_THROWS_AS(emit_results({}, cfg), std::invalid_argument);
}

TEST_CASE("the CLI maps error classes onto exit codes", "[cli_io]") {
  const auto run = [](const std::string& args) {
    const std::string cmd = std::string(MTCSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  const auto out = temp_file("mtcsim_cli_exit.csv");
  CHECK(run("--trials 2 --slots 4 --sweep-axis none --quiet --out " + out.string()) == 0);
  CHECK(run("--model markov --q 1 --trials 2 --slots 4 --out " + out.string()) == 2);  // validation
  CHECK(run("--no-such-flag") == 2);                                                   // bad usage
  CHECK(run("--trials 2 --slots 4 --sweep-axis none --out /nonexistent_dir/x.csv") == 1);  // io
  std::filesystem::remove(out);
}

TEST_CASE("effective sweep values fall back to the scenario point", "[cli_io]") {
  ExperimentConfig cfg;
  cfg.sweep_axis = "none";
  cfg.sweep_values.clear();
  CHECK(cfg.effective_sweep_values() == std::vector<double>{cfg.lambda_e});
  cfg.sweep_axis = "lambda_e";
  cfg.lambda_e = 0.25;
  CHECK(cfg.effective_sweep_values() == std::vector<double>{0.25});
  cfg.sweep_axis = "q";
  cfg.q = "0.4";
  CHECK(cfg.effective_sweep_values() == std::vector<double>{0.4});
  cfg.q = "px";  // no single axis value to sweep over
  CHECK_THROWS_AS(cfg.effective_sweep_values(), ConfigError);
}
