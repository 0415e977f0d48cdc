#include "gsort/leveled_sort.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "gsort/errors.hpp"
#include "json.hpp"

namespace gsort {

LevelState::LevelState(std::size_t n, int q, int c)
    : q_(q), c_(c), low_(n, 1), elim_(n, kNoVertex), count_at_(static_cast<std::size_t>(q + c + 2), 0) {
  if (q < 1) throw std::invalid_argument("LevelState: q must be at least 1");
  if (c < 1) throw std::invalid_argument("LevelState: c must be at least 1");
  count_at_[1] = n;
}

void LevelState::set_low(Vertex v, int level) {
  --count_at_[static_cast<std::size_t>(low_[v])];
  ++count_at_[static_cast<std::size_t>(level)];
  low_[v] = level;
}

std::size_t LevelState::level_size(int level) const {
  if (level < 1 || level > top()) throw std::invalid_argument("level_size: level out of range");
  std::size_t total = 0;
  for (int k = 1; k <= std::min(level, q_ + 1); ++k) total += count_at_[static_cast<std::size_t>(k)];
  return total;
}

std::vector<Vertex> LevelState::members(int level) const {
  if (level < 1 || level > top()) throw std::invalid_argument("members: level out of range");
  std::vector<Vertex> out;
  for (Vertex v = 0; v < low_.size(); ++v)
    if (low_[v] <= level) out.push_back(v);
  return out;
}

std::optional<int> scheduled_rebuild_level(std::size_t ell, double interval, int q) {
  if (ell == 0 || !(interval > 0.0) || !std::isfinite(interval)) return std::nullopt;
  const double target = static_cast<double>(ell);
  // Candidates l' satisfy ell <= l' * interval < ell + 1.
  double start = std::floor(target / interval) - 1.0;
  if (start < 1.0) start = 1.0;
  if (start > 9.0e15) return std::nullopt;
  int best = -1;
  for (auto lp = static_cast<std::uint64_t>(start);; ++lp) {
    const double scaled = static_cast<double>(lp) * interval;
    if (scaled >= target + 1.0) break;
    if (std::floor(scaled) == target) best = std::max(best, std::countr_zero(lp));
  }
  if (best < 0) return std::nullopt;
  return std::min(1 + best, q);
}

LeveledSorter::LeveledSorter(const EdgePartition& partition, OracleView view, const SortParams& params)
    : partition_(&partition),
      view_(view),
      state_(partition.instance().n(), partition.q(), params.c),
      p_(partition.effective_p()),
      interval_(params.rebuild_interval.value_or(1.0 / (16.0 * partition.effective_p()))),
      blocked_by_(partition.instance().n()) {
  const SortingInstance& inst = partition.instance();
  if (&view.instance() != &inst) throw std::invalid_argument("LeveledSorter: oracle and partition disagree on instance");
  offsets_.assign(inst.n() + 1, 0);
  arcs_.reserve(2 * inst.edge_count());
  for (Vertex v = 0; v < inst.n(); ++v) {
    const auto nbrs = inst.neighbors(v);
    const auto idx = inst.incident_edges(v);
    for (std::size_t k = 0; k < nbrs.size(); ++k) arcs_.push_back({nbrs[k], idx[k], partition.edge_tuple(idx[k])});
    offsets_[v + 1] = static_cast<std::uint32_t>(arcs_.size());
  }
}

double LeveledSorter::target_size(int level) const { return std::ldexp(1.0, level) / p_; }

void LeveledSorter::emit(LevelEvent::Kind kind, int level, Vertex vertex) {
  if (!observer_) return;
  observer_(LevelEvent{kind, state_.discovered_.size(), level, vertex, view_.query_count()}, *this);
}

Vertex LeveledSorter::find_first() {
  const SortingInstance& inst = partition_->instance();
  if (inst.edge_count() == 0) throw InvariantViolation("find_first: graph has no edges");
  std::vector<std::uint8_t> later(inst.n(), 0);  // the set S of vertices known to follow v0
  const Edge& start = inst.edges()[0];
  Vertex v0;
  if (view_.precedes_via(0, start.u)) {
    v0 = start.u;
    later[start.v] = 1;
  } else {
    v0 = start.v;
    later[start.u] = 1;
  }
  bool moved = true;
  while (moved) {
    moved = false;
    for (const Neighbor& nb : arcs(v0)) {
      if (later[nb.vertex]) continue;
      if (view_.precedes_via(nb.edge, nb.vertex)) {
        later[v0] = 1;
        v0 = nb.vertex;
        moved = true;
        break;
      }
      later[nb.vertex] = 1;
    }
  }
  return v0;
}

Vertex LeveledSorter::find_blocker(Vertex v, int level) {
  const LevelTuple bit = LevelTuple{1} << (level - 1);
  const int reach = level + state_.c_;
  for (const Neighbor& nb : arcs(v)) {
    if (!(nb.tuple & bit) || state_.low_[nb.vertex] > reach) continue;
    if (view_.precedes_via(nb.edge, nb.vertex)) return nb.vertex;
  }
  return kNoVertex;
}

void LeveledSorter::block(Vertex v, Vertex by) {
  state_.elim_[v] = by;
  blocked_by_[by].push_back(v);
}

void LeveledSorter::create_level(int level) {
  if (level < 1 || level > state_.q_) throw std::invalid_argument("create_level: level out of range");
  const auto n = static_cast<Vertex>(state_.n());
  for (int i = level; i >= 1; --i) {
    for (Vertex v = 0; v < n; ++v) {
      if (state_.low_[v] > i + 1) continue;  // not in L_{i+1}, or discovered
      state_.elim_[v] = kNoVertex;
      const Vertex u = find_blocker(v, i);
      if (u != kNoVertex) {
        state_.set_low(v, i + 1);
        block(v, u);
      } else {
        state_.set_low(v, i);
      }
    }
    emit(LevelEvent::Kind::kLevelRebuilt, i, kNoVertex);
  }
}

void LeveledSorter::increment(Vertex x) {
  partition_->instance().check_vertex(x);
  if (state_.is_discovered(x)) throw std::invalid_argument("increment: vertex already discovered");
  state_.set_low(x, state_.discovered_level());
  state_.elim_[x] = kNoVertex;
  state_.discovered_.push_back(x);

  std::vector<Vertex> released = std::move(blocked_by_[x]);
  blocked_by_[x].clear();
  std::sort(released.begin(), released.end());
  released.erase(std::unique(released.begin(), released.end()), released.end());
  for (Vertex v : released) {
    if (state_.is_discovered(v) || state_.elim_[v] != x) continue;  // stale entry
    state_.elim_[v] = kNoVertex;
    for (int j = state_.low_[v]; j > 1; --j) {
      const Vertex u = find_blocker(v, j - 1);
      if (u != kNoVertex) {
        block(v, u);
        break;
      }
      state_.set_low(v, j - 1);
    }
  }
  emit(LevelEvent::Kind::kDiscovered, 0, x);
}

Vertex LeveledSorter::find_next() {
  if (state_.discovered_.empty()) throw std::logic_error("find_next: nothing discovered yet");
  const Vertex last = state_.discovered_.back();
  std::vector<Vertex> candidates;
  for (const Neighbor& nb : arcs(last))
    if (state_.low_[nb.vertex] == 1) candidates.push_back(nb.vertex);
  if (candidates.empty()) throw InvariantViolation("find_next: empty candidate set");

  std::size_t alive = candidates.size();
  std::vector<std::uint8_t> dead(candidates.size(), 0);
  for (int level = 1; level <= state_.top() && alive > 1; ++level) {
    for (std::size_t k = 0; k < candidates.size() && alive > 1; ++k) {
      if (dead[k]) continue;
      const Vertex v = candidates[k];
      for (const Neighbor& nb : arcs(v)) {
        if (state_.low_[nb.vertex] != level) continue;
        if (view_.precedes_via(nb.edge, nb.vertex)) {
          dead[k] = 1;
          --alive;
          break;
        }
      }
    }
  }
  if (alive != 1) throw InvariantViolation("find_next: candidates did not narrow to one");
  for (std::size_t k = 0; k < candidates.size(); ++k)
    if (!dead[k]) return candidates[k];
  throw InvariantViolation("find_next: unreachable");
}

std::vector<Vertex> LeveledSorter::run(std::size_t count) {
  if (count > state_.n()) throw std::invalid_argument("run: count exceeds n");
  std::vector<Vertex> found;
  found.reserve(count);
  if (count == 0) return found;
  create_level(state_.q_);
  for (std::size_t ell = 1; ell <= count; ++ell) {
    const Vertex x = ell == 1 ? find_first() : find_next();
    increment(x);
    found.push_back(x);
    if (const auto level = scheduled_rebuild_level(ell, interval_, state_.q_)) create_level(*level);
  }
  return found;
}

SortOutcome stochastic_sort(CountingOracle& oracle, const SortParams& params, std::uint64_t seed,
                            const LevelObserver& observer) {
  const SortingInstance& inst = oracle.instance();
  const int q = std::max(1, params.q.value_or(default_level_count(inst.n(), inst.p())));
  const EdgePartition partition = EdgePartition::build(inst, q, seed);
  const std::size_t n = inst.n();
  const std::size_t bottom = (n + 1) / 2;

  LeveledSorter forward(partition, OracleView(oracle, false), params);
  if (observer) forward.set_observer(observer);
  std::vector<Vertex> order = forward.run(bottom);

  LeveledSorter backward(partition, OracleView(oracle, true), params);
  if (observer) backward.set_observer(observer);
  std::vector<Vertex> top = backward.run(n - bottom);

  std::vector<std::uint8_t> seen(n, 0);
  for (Vertex v : order) seen[v] = 1;
  for (auto it = top.rbegin(); it != top.rend(); ++it) {
    if (seen[*it]) throw InvariantViolation("stochastic_sort: forward and reversed passes overlap");
    seen[*it] = 1;
    order.push_back(*it);
  }
  return {std::move(order), oracle.query_count()};
}

SortOutcome stochastic_sort(const SortingInstance& instance, const SortParams& params, std::uint64_t seed) {
  CountingOracle oracle(instance);
  return stochastic_sort(oracle, params, seed);
}

std::string trace_line(const LevelEvent& event, bool reversed) {
  nlohmann::ordered_json j;
  j["event"] = event.kind == LevelEvent::Kind::kDiscovered ? "discovered" : "rebuild";
  j["pass"] = reversed ? "reversed" : "forward";
  j["ell"] = event.ell;
  j["level"] = event.level;
  if (event.vertex != kNoVertex) j["vertex"] = event.vertex;
  j["queries"] = event.queries;
  return j.dump();
}

}  // namespace gsort
