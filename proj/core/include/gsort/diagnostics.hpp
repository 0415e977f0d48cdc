#pragma once

#include <cstddef>

#include "gsort/leveled_sort.hpp"

namespace gsort::diagnostics {

// These read the hidden order and exist for tests and experiment reports only.

/// Rank r(v) among the not-yet-discovered vertices in the sorter's direction:
/// the next vertex to be discovered has rank 1.
std::size_t residual_rank(const LeveledSorter& sorter, Vertex v);

/// |{v in L_level : r(v) in [s/16, 3s/32)}| with s the level's target size.
std::size_t anchor_count(const LeveledSorter& sorter, int level);

/// |L_level| / s_level.
double size_ratio(const LeveledSorter& sorter, int level);

}  // namespace gsort::diagnostics
