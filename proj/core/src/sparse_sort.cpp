#include "gsort/sparse_sort.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gsort/errors.hpp"
#include "gsort/rng.hpp"

namespace gsort {
namespace {

// The unique topological order of a fully oriented graph with a Hamiltonian
// path; anything else means the backend broke its contract.
std::vector<Vertex> forced_order(std::size_t n, std::span<const Arc> arcs) {
  std::vector<std::vector<Vertex>> out(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const Arc& a : arcs) {
    out[a.first].push_back(a.second);
    ++indegree[a.second];
  }
  std::vector<Vertex> ready;
  for (Vertex v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::vector<Vertex> order;
  order.reserve(n);
  while (!ready.empty()) {
    if (ready.size() != 1) throw InvariantViolation("backend orientation does not force a unique order");
    const Vertex v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (Vertex w : out[v])
      if (--indegree[w] == 0) ready.push_back(w);
  }
  if (order.size() != n) throw InvariantViolation("backend orientation contains a cycle");
  return order;
}

}  // namespace

std::vector<Arc> predict_orientation(std::span<const double> avg_ranks, std::span<const Edge> edges) {
  std::vector<Arc> arcs;
  arcs.reserve(edges.size());
  for (const Edge& e : edges) {
    const Vertex lo = std::min(e.u, e.v);
    const Vertex hi = std::max(e.u, e.v);
    if (avg_ranks[lo] <= avg_ranks[hi]) {
      arcs.push_back({lo, hi});
    } else {
      arcs.push_back({hi, lo});
    }
  }
  return arcs;
}

std::vector<Arc> FallbackPredictionSorter::sort(const SortingInstance& graph, std::span<const Arc> /*predicted*/,
                                                std::size_t /*budget*/, CountingOracle& oracle,
                                                const DirectedKnowledge& known) {
  std::vector<Arc> arcs;
  arcs.reserve(graph.edge_count());
  for (const Edge& e : graph.edges()) {
    if (known.implies(e.u, e.v)) {
      arcs.push_back({e.u, e.v});
    } else if (known.implies(e.v, e.u)) {
      arcs.push_back({e.v, e.u});
    } else if (oracle.precedes(e.u, e.v)) {
      arcs.push_back({e.u, e.v});
    } else {
      arcs.push_back({e.v, e.u});
    }
  }
  return arcs;
}

std::unique_ptr<PredictionSorter> make_prediction_sorter(std::string_view name) {
  if (name == "fallback") return std::make_unique<FallbackPredictionSorter>();
  if (name == "none") return nullptr;
  throw std::invalid_argument("unknown prediction backend: " + std::string(name));
}

std::size_t default_sample_count(std::size_t n, std::size_t m, double multiplier) {
  const double ratio = std::sqrt(static_cast<double>(m) / static_cast<double>(n));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(multiplier * std::ceil(ratio))));
}

std::size_t default_error_budget(std::size_t n, std::size_t m) {
  const double ratio = std::sqrt(static_cast<double>(m) / static_cast<double>(n));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio * std::log2(static_cast<double>(n)))));
}

SparseOutcome sparse_generalized_sort(CountingOracle& oracle, const SparseParams& params, PredictionSorter* backend,
                                      std::uint64_t seed, const std::function<void(const SparseRound&)>& on_round) {
  const SortingInstance& graph = oracle.instance();
  const std::size_t n = graph.n();
  const std::size_t m = graph.edge_count();
  const std::size_t start_queries = oracle.query_count();

  SparseOutcome out;
  out.a = params.a.value_or(default_sample_count(n, m, params.a_multiplier));
  out.w = params.w.value_or(default_error_budget(n, m));
  if (out.a == 0) throw std::invalid_argument("sparse sort: a must be at least 1");
  const RankMode mode =
      params.rank_mode.value_or(n <= params.exact_cap ? RankMode::exact() : RankMode::sampled(params.samples));
  const bool track = params.track_extensions && n <= std::min(params.exact_cap, kMaxExactVertices);

  DirectedKnowledge known(n);
  Rng rng(derive_seed(seed, Stream::kSparse));
  std::vector<double> ranks;
  bool stale = true;

  for (std::uint64_t round = 0;; ++round) {
    if (known.unique_extension()) {
      out.order = known.topological_order();
      break;
    }
    if (stale) {
      ranks = average_ranks(known, mode, derive_seed(seed, {static_cast<std::uint64_t>(Stream::kMcmc), round}),
                            params.exact_cap, params.mcmc);
      stale = false;
    }
    const std::vector<Arc> predicted = predict_orientation(ranks, graph.edges());

    SparseRound info;
    if (track) info.extensions_before = count_extensions(known, params.exact_cap);
    const std::size_t round_start = oracle.query_count();
    bool agree = true;
    for (std::size_t i = 0; i < out.a; ++i) {
      const Arc guess = predicted[rng.below(m)];
      ++info.sampled;
      bool correct;
      if (known.implies(guess.first, guess.second)) {
        correct = true;
      } else if (known.implies(guess.second, guess.first)) {
        correct = false;
      } else {
        correct = oracle.precedes(guess.first, guess.second);
      }
      const Arc truth = correct ? guess : Arc{guess.second, guess.first};
      if (!correct) {
        ++info.contradictions;
        agree = false;
      }
      if ((!correct || backend == nullptr) && !known.implies(truth.first, truth.second)) {
        known.add(truth);
        ++info.new_arcs;
      }
    }
    info.charged = oracle.query_count() - round_start;
    stale = info.new_arcs > 0;
    if (track) info.extensions_after = count_extensions(known, params.exact_cap);
    out.rounds.push_back(info);
    if (on_round) on_round(info);

    if (agree && backend != nullptr) {
      const std::size_t before = oracle.query_count();
      const std::vector<Arc> arcs = backend->sort(graph, predicted, out.w, oracle, known);
      out.backend_queries = oracle.query_count() - before;
      out.used_backend = true;
      if (arcs.size() != m) throw InvariantViolation("backend returned the wrong number of arcs");
      for (const Arc& a : arcs) {
        if (!graph.has_edge(a.first, a.second)) throw InvariantViolation("backend returned a non-edge");
        if (known.implies(a.second, a.first)) throw InvariantViolation("backend contradicts known directions");
        if (oracle.known(a.first, a.second) == Direction::kAfter)
          throw InvariantViolation("backend contradicts an answered query");
      }
      out.order = forced_order(n, arcs);
      break;
    }
  }
  out.queries = oracle.query_count() - start_queries;
  out.loop_queries = out.queries - out.backend_queries;
  return out;
}

}  // namespace gsort
