#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsort/leveled_sort.hpp"
#include "gsort/sparse_sort.hpp"

namespace gsort {

enum class Algorithm { kStochastic, kSparse };

std::string_view to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view name);

/// Evaluates a p expression in n: numbers, n, e, + - * / ^, parentheses,
/// ln/log/log2/sqrt/exp, and implicit products such as "8ln(n)/n".
double evaluate_p_expression(std::string_view expr, std::size_t n);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kStochastic;
  std::vector<std::size_t> n_values;
  /// Each entry is a number or an expression in n; results are clamped to [0, 1].
  std::vector<std::string> p_values;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  SortParams stochastic;
  SparseParams sparse;
  std::string backend = "fallback";
  std::string output_path;
  std::string format = "csv";
  /// When false wall_ms is written as 0 so identical configs give identical bytes.
  bool record_timing = true;
  std::optional<std::size_t> workers;

  void validate() const;
};

/// Schema (all keys but n_values and p_values optional):
/// {"algorithm": "stochastic"|"sparse", "n_values": [...], "p_values": [0.1, "8*ln(n)/n"],
///  "trials": 30, "seed": 1, "params": {"c", "q", "rebuild_interval", "a", "a_multiplier", "w",
///  "samples", "exact_cap", "burn_in", "thinning"}, "backend": "fallback"|"none",
///  "output": {"path": "r.csv", "format": "csv"|"json"}, "record_timing": true, "workers": 4}
ExperimentConfig config_from_json(std::string_view text);

struct TrialRecord {
  std::size_t n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::kStochastic;
  std::size_t queries = 0;
  bool correct = false;
  double wall_ms = 0.0;
  double normalized = 0.0;
};

/// queries / (n * log2(max(2, n p)))
double normalized_queries(std::size_t queries, std::size_t n, double p);

/// splitmix fold of (base, n, p_index, trial).
std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t p_index, std::size_t trial);

/// Runs one trial end to end on a freshly generated instance.
TrialRecord run_trial(const ExperimentConfig& config, std::size_t n, double p, std::uint64_t seed);

/// One record per (n, p, trial) in that nesting order, independent of worker
/// count. Throws InvariantViolation if any trial returns a wrong order.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config);

inline constexpr std::string_view kCsvHeader = "n,p,seed,algorithm,queries,correct,wall_ms,normalized";
std::string records_to_csv(const std::vector<TrialRecord>& records);
std::string records_to_json(const std::vector<TrialRecord>& records);

/// Opens the output first (failing before any work), runs, then writes.
std::vector<TrialRecord> run_and_write(const ExperimentConfig& config);

/// Worker count: config, then the GSORT_WORKERS environment variable, then
/// hardware concurrency.
std::size_t resolve_workers(const std::optional<std::size_t>& requested);

}  // namespace gsort
