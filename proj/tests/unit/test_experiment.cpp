#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gsort/errors.hpp"
#include "gsort/experiment.hpp"
#include "json.hpp"

using namespace gsort;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n_values = {16, 40};
  cfg.p_values = {"0.3", "2*ln(n)/n"};
  cfg.trials = 3;
  cfg.seed = 77;
  cfg.record_timing = false;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("p expressions") {
  CHECK(evaluate_p_expression("0.25", 10) == 0.25);
  const double n = 1024.0;
  CHECK(evaluate_p_expression("8*ln(n)/n", 1024) == doctest::Approx(8 * std::log(n) / n));
  CHECK(evaluate_p_expression("8ln(n)/n", 1024) == doctest::Approx(8 * std::log(n) / n));
  CHECK(evaluate_p_expression("2\xC2\xB7ln(n)/n", 1024) == doctest::Approx(2 * std::log(n) / n));
  CHECK(evaluate_p_expression("(ln(n) + ln(ln(n)) + 4)/n", 512) ==
        doctest::Approx((std::log(512.0) + std::log(std::log(512.0)) + 4) / 512.0));
  CHECK(evaluate_p_expression("n^-1", 8) == doctest::Approx(0.125));
  CHECK(evaluate_p_expression("log2(n)/sqrt(n)", 16) == doctest::Approx(1.0));
  CHECK(evaluate_p_expression("-(1 - 3) * 0.1", 3) == doctest::Approx(0.2));
  CHECK(evaluate_p_expression("exp(0) / e", 3) == doctest::Approx(std::exp(-1.0)));
  CHECK(evaluate_p_expression("1e-3", 3) == doctest::Approx(1e-3));
  for (const char* bad : {"", "1+", "(1", "foo(n)", "x", "1)", "ln n", "2 $ 3"})
    CHECK_THROWS_AS(evaluate_p_expression(bad, 10), std::invalid_argument);
}

TEST_CASE("config parsing") {
  const auto cfg = config_from_json(R"({
    "algorithm": "sparse", "n_values": [8, 16], "p_values": [0.5, "4*ln(n)/n"], "trials": 2, "seed": 9,
    "params": {"c": 6, "q": 3, "a": 5, "samples": 10, "burn_in": 100, "thinning": 5},
    "backend": "none", "output": {"path": "x.json", "format": "json"}, "record_timing": false, "workers": 2})");
  CHECK(cfg.algorithm == Algorithm::kSparse);
  CHECK(cfg.n_values == std::vector<std::size_t>{8, 16});
  REQUIRE(cfg.p_values.size() == 2);
  CHECK(evaluate_p_expression(cfg.p_values[0], 8) == 0.5);
  CHECK(cfg.trials == 2);
  CHECK(cfg.seed == 9);
  CHECK(cfg.stochastic.c == 6);
  CHECK(cfg.stochastic.q == 3);
  CHECK(cfg.sparse.a == 5u);
  CHECK(cfg.sparse.samples == 10);
  CHECK(cfg.sparse.mcmc.burn_in == 100u);
  CHECK(cfg.sparse.mcmc.thinning == 5u);
  CHECK(cfg.backend == "none");
  CHECK(cfg.output_path == "x.json");
  CHECK(cfg.format == "json");
  CHECK_FALSE(cfg.record_timing);
  CHECK(cfg.workers == 2u);

  const auto defaults = config_from_json(R"({"n_values": [4], "p_values": [0.1]})");
  CHECK(defaults.algorithm == Algorithm::kStochastic);
  CHECK(defaults.trials == 1);
  CHECK(defaults.format == "csv");
  CHECK(defaults.record_timing);

  for (const char* bad : {
           R"({"n_values": [4], "p_values": [0.1], "trials": 0})",
           R"({"n_values": [1], "p_values": [0.1]})",
           R"({"n_values": [], "p_values": [0.1]})",
           R"({"n_values": [4], "p_values": []})",
           R"({"n_values": [4], "p_values": ["-1"]})",
           R"j({"n_values": [4], "p_values": ["bogus(n)"]})j",
           R"({"n_values": [4], "p_values": [0.1], "backend": "lu"})",
           R"({"n_values": [4], "p_values": [0.1], "algorithm": "quick"})",
           R"({"n_values": [4], "p_values": [0.1], "output": {"format": "xml"}})",
           R"({"p_values": [0.1]})",
           "not json",
       })
    CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
}

TEST_CASE("trial seeds are deterministic and distinct per cell") {
  CHECK(trial_seed(1, 16, 0, 0) == trial_seed(1, 16, 0, 0));
  CHECK(trial_seed(1, 16, 0, 0) != trial_seed(1, 16, 0, 1));
  CHECK(trial_seed(1, 16, 0, 0) != trial_seed(1, 16, 1, 0));
  CHECK(trial_seed(1, 16, 0, 0) != trial_seed(1, 17, 0, 0));
  CHECK(trial_seed(1, 16, 0, 0) != trial_seed(2, 16, 0, 0));
}

TEST_CASE("normalized query count") {
  CHECK(normalized_queries(100, 10, 0.5) == doctest::Approx(100.0 / (10 * std::log2(5.0))));
  CHECK(normalized_queries(100, 10, 0.1) == doctest::Approx(10.0));  // n p < 2 clamps to log2(2) = 1
}

TEST_CASE("run_experiment: one cell, one trial") {
  ExperimentConfig cfg;
  cfg.n_values = {12};
  cfg.p_values = {"0.5"};
  const auto records = run_experiment(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].correct);
  CHECK(records[0].n == 12);
  CHECK(records[0].p == 0.5);
  CHECK(records[0].normalized > 0.0);
  CHECK(records[0].seed == trial_seed(0, 12, 0, 0));
}

TEST_CASE("run_experiment: record order and determinism across worker counts") {
  auto cfg = small_config();
  cfg.workers = 1;
  const auto serial = run_experiment(cfg);
  cfg.workers = 3;
  const auto parallel = run_experiment(cfg);
  REQUIRE(serial.size() == 12);
  CHECK(records_to_csv(serial) == records_to_csv(parallel));
  std::size_t i = 0;
  for (std::size_t n : cfg.n_values)
    for (std::size_t pi = 0; pi < 2; ++pi)
      for (std::size_t t = 0; t < 3; ++t, ++i) {
        CHECK(serial[i].n == n);
        CHECK(serial[i].seed == trial_seed(77, n, pi, t));
        CHECK(serial[i].correct);
        CHECK(serial[i].wall_ms == 0.0);
        CHECK(serial[i].normalized == doctest::Approx(normalized_queries(serial[i].queries, n, serial[i].p)));
      }
  CHECK(serial[3].p == doctest::Approx(2 * std::log(16.0) / 16.0));
}

TEST_CASE("run_experiment: sparse algorithm with both backends") {
  auto cfg = small_config();
  cfg.algorithm = Algorithm::kSparse;
  cfg.n_values = {6, 9};
  for (const char* backend : {"fallback", "none"}) {
    cfg.backend = backend;
    for (const auto& r : run_experiment(cfg)) {
      CHECK(r.correct);
      CHECK(r.algorithm == Algorithm::kSparse);
    }
  }
}

TEST_CASE("p above one is clamped") {
  ExperimentConfig cfg;
  cfg.n_values = {4};
  cfg.p_values = {"8*ln(n)/n"};
  const auto records = run_experiment(cfg);
  CHECK(records[0].p == 1.0);
}

TEST_CASE("csv and json output") {
  const auto records = run_experiment(small_config());
  const std::string csv = records_to_csv(records);
  CHECK(csv.rfind("n,p,seed,algorithm,queries,correct,wall_ms,normalized\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
  CHECK(csv.find(",stochastic,") != std::string::npos);
  CHECK(csv.find(",false,") == std::string::npos);
  const auto j = nlohmann::json::parse(records_to_json(records));
  REQUIRE(j.size() == records.size());
  CHECK(j[0]["n"] == 16);
  CHECK(j[0]["correct"] == true);
}

TEST_CASE("run_and_write: identical configs give identical bytes") {
  const auto dir = std::filesystem::temp_directory_path() / "gsort_experiment_test";
  std::filesystem::create_directories(dir);
  auto cfg = small_config();
  cfg.output_path = (dir / "a.csv").string();
  run_and_write(cfg);
  cfg.output_path = (dir / "b.csv").string();
  cfg.workers = 2;
  run_and_write(cfg);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  cfg.format = "json";
  cfg.output_path = (dir / "c.json").string();
  run_and_write(cfg);
  CHECK(nlohmann::json::parse(slurp(dir / "c.json")).size() == 12);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run_and_write: unwritable output fails before any trial runs") {
  ExperimentConfig cfg;
  // Large enough that running first would take far longer than the test timeout.
  cfg.n_values = {2000000};
  cfg.p_values = {"1"};
  cfg.output_path = "/nonexistent-dir/out.csv";
  CHECK_THROWS_AS(run_and_write(cfg), std::runtime_error);
  cfg.output_path.clear();
  CHECK_THROWS_AS(run_and_write(cfg), std::invalid_argument);
}

TEST_CASE("worker count resolution") {
  CHECK(resolve_workers(5) == 5);
  ::setenv("GSORT_WORKERS", "3", 1);
  CHECK(resolve_workers(std::nullopt) == 3);
  CHECK(resolve_workers(2) == 2);
  ::setenv("GSORT_WORKERS", "junk", 1);
  CHECK(resolve_workers(std::nullopt) >= 1);
  ::unsetenv("GSORT_WORKERS");
  CHECK(resolve_workers(std::nullopt) >= 1);
}
