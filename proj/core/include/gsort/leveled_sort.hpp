#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsort/edge_partition.hpp"
#include "gsort/instance.hpp"

namespace gsort {

struct SortParams {
  /// Promotion look-ahead: a vertex is blocked from L_i only by vertices in L_{i+c}.
  int c = 8;
  /// Number of edge subsets; defaults to default_level_count(n, p).
  std::optional<int> q;
  /// Rebuild period unit in discovered vertices; defaults to 1/(16 p).
  std::optional<double> rebuild_interval;
};

inline constexpr Vertex kNoVertex = ~Vertex{0};

/// Nested levels L_1 ⊆ ... ⊆ L_{q+c}, stored as the lowest level holding each
/// vertex. Undiscovered vertices have lowest level in 1..q+1 (levels above q
/// hold everything); discovered vertices sit at q+c+1, i.e. in no level.
class LevelState {
 public:
  LevelState(std::size_t n, int q, int c);

  int q() const noexcept { return q_; }
  int c() const noexcept { return c_; }
  int top() const noexcept { return q_ + c_; }
  int discovered_level() const noexcept { return q_ + c_ + 1; }
  std::size_t n() const noexcept { return low_.size(); }

  int lowest_level(Vertex v) const { return low_.at(v); }
  bool in_level(Vertex v, int level) const { return low_.at(v) <= level; }
  bool is_discovered(Vertex v) const { return low_.at(v) == discovered_level(); }
  /// The vertex recorded as blocking v from the level below its lowest one.
  std::optional<Vertex> blocker(Vertex v) const {
    return elim_.at(v) == kNoVertex ? std::nullopt : std::optional<Vertex>(elim_[v]);
  }
  std::span<const Vertex> discovered() const noexcept { return discovered_; }
  std::span<const int> lowest_levels() const noexcept { return low_; }

  std::size_t level_size(int level) const;
  std::vector<Vertex> members(int level) const;

 private:
  friend class LeveledSorter;
  void set_low(Vertex v, int level);

  int q_;
  int c_;
  std::vector<int> low_;
  std::vector<Vertex> elim_;
  std::vector<Vertex> discovered_;
  std::vector<std::size_t> count_at_;  // indexed by lowest level
};

struct LevelEvent {
  enum class Kind { kDiscovered, kLevelRebuilt };
  Kind kind;
  std::size_t ell;  // vertices discovered so far
  int level;        // rebuilt level, or 0 for discoveries
  Vertex vertex;    // discovered vertex, or kNoVertex
  std::size_t queries;
};

class LeveledSorter;
using LevelObserver = std::function<void(const LevelEvent&, const LeveledSorter&)>;

/// Rebuild level due after the ell-th discovery: 1 + nu_2(l') for the integers
/// l' >= 1 with floor(l' * interval) == ell (largest such level), clamped to q.
std::optional<int> scheduled_rebuild_level(std::size_t ell, double interval, int q);

/// Recovers the true order from the bottom, one vertex at a time, using the
/// level structure over an EdgePartition. A reversed OracleView recovers from
/// the top instead. Single-threaded; one sorter per pass.
class LeveledSorter {
 public:
  LeveledSorter(const EdgePartition& partition, OracleView view, const SortParams& params = {});

  /// Finds the minimum by walking to ever-smaller neighbors. At most n queries;
  /// uses no levels.
  Vertex find_first();
  /// Rebuilds L_level from L_{level+1}, then every level below it, top-down.
  void create_level(int level);
  /// Records x as the next discovered vertex and re-advances vertices it blocked.
  void increment(Vertex x);
  /// Finds the successor of the last discovered vertex among its L_1 neighbors.
  Vertex find_next();

  /// Builds the levels and discovers `count` vertices.
  std::vector<Vertex> run(std::size_t count);

  const LevelState& state() const noexcept { return state_; }
  const OracleView& view() const noexcept { return view_; }
  const EdgePartition& partition() const noexcept { return *partition_; }
  /// s_i = 2^i / p.
  double target_size(int level) const;
  double rebuild_interval() const noexcept { return interval_; }

  void set_observer(LevelObserver observer) { observer_ = std::move(observer); }

 private:
  struct Neighbor {
    Vertex vertex;
    std::uint32_t edge;
    LevelTuple tuple;
  };

  std::span<const Neighbor> arcs(Vertex v) const {
    return std::span<const Neighbor>(arcs_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
  }
  /// First u (by id) in L_{level+c} with E_level(u, v) and u before v.
  Vertex find_blocker(Vertex v, int level);
  void block(Vertex v, Vertex by);
  void emit(LevelEvent::Kind kind, int level, Vertex vertex);

  const EdgePartition* partition_;
  OracleView view_;
  LevelState state_;
  double p_;
  double interval_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Neighbor> arcs_;
  std::vector<std::vector<Vertex>> blocked_by_;
  LevelObserver observer_;
};

struct SortOutcome {
  std::vector<Vertex> order;
  std::size_t queries = 0;
};

/// Full order: the bottom ceil(n/2) vertices by a forward pass, the rest by a
/// reversed pass on the same graph and partition. Always exact.
SortOutcome stochastic_sort(CountingOracle& oracle, const SortParams& params, std::uint64_t seed,
                            const LevelObserver& observer = {});
SortOutcome stochastic_sort(const SortingInstance& instance, const SortParams& params, std::uint64_t seed);

/// One JSON line: {"event", "pass", "ell", "level", "vertex", "queries"}.
std::string trace_line(const LevelEvent& event, bool reversed);

}  // namespace gsort
