#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsort/instance.hpp"
#include "gsort/poset.hpp"

namespace gsort {

/// Orients every edge from lower to higher average rank; ties go to the
/// smaller id first.
std::vector<Arc> predict_orientation(std::span<const double> avg_ranks, std::span<const Edge> edges);

/// Completes a sort given a predicted orientation with at most `budget`
/// mispredictions. Implementations must return the true orientation of every
/// edge of the graph.
class PredictionSorter {
 public:
  virtual ~PredictionSorter() = default;
  virtual std::string_view name() const = 0;
  virtual std::vector<Arc> sort(const SortingInstance& graph, std::span<const Arc> predicted, std::size_t budget,
                                CountingOracle& oracle, const DirectedKnowledge& known) = 0;
};

/// Queries every edge whose direction the known closure does not already
/// settle. Always correct; costs at most m queries.
class FallbackPredictionSorter final : public PredictionSorter {
 public:
  std::string_view name() const override { return "fallback"; }
  std::vector<Arc> sort(const SortingInstance& graph, std::span<const Arc> predicted, std::size_t budget,
                        CountingOracle& oracle, const DirectedKnowledge& known) override;
};

/// Backend by name: "fallback", or "none" for nullptr (the sampling loop then
/// keeps every sampled answer and runs until the order is forced).
std::unique_ptr<PredictionSorter> make_prediction_sorter(std::string_view name);

struct SparseParams {
  /// a = ceil(a_multiplier * ceil(sqrt(m/n))) edges sampled per round, unless a is set.
  double a_multiplier = 2.0;
  std::optional<std::size_t> a;
  /// w = ceil(sqrt(m/n) * log2 n), unless set.
  std::optional<std::size_t> w;
  /// Exact ranks up to exact_cap vertices, MCMC with `samples` draws above.
  std::optional<RankMode> rank_mode;
  std::size_t exact_cap = kDefaultExactCap;
  std::size_t samples = 200;
  McmcOptions mcmc;
  /// Track the exact extension count per round (n <= exact_cap only).
  bool track_extensions = false;
};

struct SparseRound {
  std::size_t sampled = 0;
  std::size_t charged = 0;  // oracle queries made this round
  std::size_t contradictions = 0;
  std::size_t new_arcs = 0;
  std::optional<std::uint64_t> extensions_before;
  std::optional<std::uint64_t> extensions_after;
};

struct SparseOutcome {
  std::vector<Vertex> order;
  std::size_t queries = 0;
  std::size_t loop_queries = 0;
  std::size_t backend_queries = 0;
  bool used_backend = false;
  std::size_t a = 0;
  std::size_t w = 0;
  std::vector<SparseRound> rounds;
};

std::size_t default_sample_count(std::size_t n, std::size_t m, double multiplier);
std::size_t default_error_budget(std::size_t n, std::size_t m);

/// Average-rank guided sampling loop; delegates to `backend` once a full
/// round of samples agrees with the prediction. backend may be nullptr.
SparseOutcome sparse_generalized_sort(CountingOracle& oracle, const SparseParams& params, PredictionSorter* backend,
                                      std::uint64_t seed, const std::function<void(const SparseRound&)>& on_round = {});

}  // namespace gsort
