#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gsort {

using Vertex = std::uint32_t;

enum class EdgeKind : std::uint8_t { kDeterministic, kStochastic };

/// Answer to a comparison: kBefore means the first argument precedes the second.
enum class Direction : std::uint8_t { kBefore, kAfter };

constexpr Direction flip(Direction d) noexcept {
  return d == Direction::kBefore ? Direction::kAfter : Direction::kBefore;
}

/// Undirected edge, stored with u < v.
struct Edge {
  Vertex u;
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// A directed pair: `first` precedes `second`.
struct Arc {
  Vertex first;
  Vertex second;
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Hidden total order plus the public comparability graph.
///
/// Vertices are 0..n-1 and ranks are 0-based: hidden_rank(v) == 0 is the
/// minimum. Consecutive-rank pairs are always edges (kind deterministic);
/// every other edge is stochastic. Immutable once built.
class SortingInstance {
 public:
  /// Erdos-Renyi G(n, p) over the non-consecutive pairs plus the planted path
  /// of a uniformly random hidden order. Identical (n, p, seed) gives an
  /// identical instance.
  static SortingInstance generate(std::size_t n, double p, std::uint64_t seed);

  /// Builds an instance from an explicit graph. Edges may be given in any
  /// orientation and order; duplicates are merged. Missing path edges are an
  /// error. Kinds are derived from the hidden order.
  static SortingInstance from_graph(std::vector<std::size_t> hidden_rank, std::vector<Edge> edges, double p,
                                    std::uint64_t seed);

  std::size_t n() const noexcept { return hidden_rank_.size(); }
  double p() const noexcept { return p_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const EdgeKind> kinds() const noexcept { return kinds_; }

  /// Sorted neighbor ids of v. Performs no queries.
  std::span<const Vertex> neighbors(Vertex v) const;
  /// Edge indices parallel to neighbors(v).
  std::span<const std::uint32_t> incident_edges(Vertex v) const;

  std::optional<std::size_t> edge_index(Vertex u, Vertex v) const;
  bool has_edge(Vertex u, Vertex v) const { return edge_index(u, v).has_value(); }

  // Hidden information. Algorithms must go through CountingOracle; these are
  // for oracles, tests and diagnostics.
  std::size_t hidden_rank(Vertex v) const { return hidden_rank_.at(v); }
  std::span<const std::size_t> hidden_ranks() const noexcept { return hidden_rank_; }
  std::vector<Vertex> hidden_order() const;

  void check_vertex(Vertex v) const;

 private:
  SortingInstance() = default;
  void build_adjacency();

  double p_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> hidden_rank_;
  std::vector<Edge> edges_;  // sorted lexicographically
  std::vector<EdgeKind> kinds_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Vertex> adjacency_;
  std::vector<std::uint32_t> adjacency_edge_;
};

/// Planted-path graph families used as adversarial inputs.
namespace fixtures {
/// Only the hidden path.
SortingInstance path(std::size_t n, std::uint64_t seed);
/// Hidden path closed into a cycle, plus `chords` random extra edges.
SortingInstance cycle_with_chords(std::size_t n, std::size_t chords, std::uint64_t seed);
/// Ranks [0, k) and [n-k, n) each form a clique; the middle is a bare path.
SortingInstance two_cliques(std::size_t n, std::size_t clique_size, std::uint64_t seed);
}  // namespace fixtures

/// One charged (first-time) query.
struct QueryRecord {
  Vertex u;
  Vertex v;
  Direction answer;
};

/// The only gateway to edge directions. Answers are memoized per unordered
/// pair and only first-time queries are counted. Single-writer.
class CountingOracle {
 public:
  explicit CountingOracle(const SortingInstance& instance);

  Direction query(Vertex u, Vertex v);
  /// Same as query(u, v) for the edge with the given index; skips the pair lookup.
  Direction query_edge(std::size_t edge_index, Vertex u);
  bool precedes(Vertex u, Vertex v) { return query(u, v) == Direction::kBefore; }

  /// Memoized answer if the pair was already queried; never charges.
  std::optional<Direction> known(Vertex u, Vertex v) const;

  std::size_t query_count() const noexcept { return query_count_; }
  const SortingInstance& instance() const noexcept { return *instance_; }

  /// When enabled, every charged query is appended to log().
  void set_recording(bool on) { recording_ = on; }
  const std::vector<QueryRecord>& log() const noexcept { return log_; }

 private:
  const SortingInstance* instance_;
  // Per edge index: 0 unknown, 1 lower id first, 2 higher id first.
  std::vector<std::uint8_t> answered_;
  std::size_t query_count_ = 0;
  bool recording_ = false;
  std::vector<QueryRecord> log_;
};

/// Comparison view over an oracle, optionally with reversed polarity so a
/// sorter can recover the order from the top.
class OracleView {
 public:
  explicit OracleView(CountingOracle& oracle, bool reversed = false) : oracle_(&oracle), reversed_(reversed) {}

  bool precedes(Vertex u, Vertex v) const { return oracle_->precedes(u, v) != reversed_; }
  /// precedes(u, other endpoint) for a known incident edge of u.
  bool precedes_via(std::size_t edge_index, Vertex u) const {
    return (oracle_->query_edge(edge_index, u) == Direction::kBefore) != reversed_;
  }
  bool reversed() const noexcept { return reversed_; }
  std::size_t query_count() const noexcept { return oracle_->query_count(); }
  const SortingInstance& instance() const noexcept { return oracle_->instance(); }

 private:
  CountingOracle* oracle_;
  bool reversed_;
};

/// JSON: {n, p, seed, hidden_rank, edges: [[u,v],...], kinds: ["deterministic"|"stochastic",...]}.
std::string instance_to_json(const SortingInstance& instance);
SortingInstance instance_from_json(std::string_view text);

std::string_view to_string(EdgeKind kind);

}  // namespace gsort
