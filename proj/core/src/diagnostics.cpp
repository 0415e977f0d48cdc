#include "gsort/diagnostics.hpp"

namespace gsort::diagnostics {

std::size_t residual_rank(const LeveledSorter& sorter, Vertex v) {
  const SortingInstance& inst = sorter.view().instance();
  const std::size_t r = inst.hidden_rank(v);
  const std::size_t directed = sorter.view().reversed() ? inst.n() - 1 - r : r;
  return directed + 1 - sorter.state().discovered().size();
}

std::size_t anchor_count(const LeveledSorter& sorter, int level) {
  const double s = sorter.target_size(level);
  const double lo = s / 16.0;
  const double hi = 3.0 * s / 32.0;
  const LevelState& state = sorter.state();
  std::size_t count = 0;
  for (Vertex v = 0; v < state.n(); ++v) {
    if (!state.in_level(v, level)) continue;
    const auto r = static_cast<double>(residual_rank(sorter, v));
    if (r >= lo && r < hi) ++count;
  }
  return count;
}

double size_ratio(const LeveledSorter& sorter, int level) {
  return static_cast<double>(sorter.state().level_size(level)) / sorter.target_size(level);
}

}  // namespace gsort::diagnostics
