#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gsort/instance.hpp"
#include "gsort/rng.hpp"

namespace gsort {

/// Root of prod_{i=1..q} (1 - alpha*p/2^i) = 1 - p on [1, 2], by bisection.
/// Throws DegenerateParameter for p in {0, 1} and std::invalid_argument for
/// q < 1, tol <= 0 or p outside [0, 1].
double solve_alpha(double p, int q, double tol = 1e-12);

/// prod_{i=1..q} (1 - alpha*p/2^i).
double alpha_product(double alpha, double p, int q);

/// ceil(log2(max(2, n*p))), at least 1.
int default_level_count(std::size_t n, double p);

inline constexpr int kMaxLevels = 64;

/// Bit i-1 of a tuple is the indicator for level set E_i.
using LevelTuple = std::uint64_t;

/// Per-level marginals alpha*p/2^i of the unconditioned tuple law.
std::vector<double> level_marginals(double alpha, double p, int q);

/// One draw from the tuple law conditioned on at least one set bit. The
/// smallest set index is drawn from its closed-form conditional law, then the
/// bits above it independently.
LevelTuple sample_nonzero_tuple(Rng& rng, const std::vector<double>& marginals);

/// q overlapping edge subsets E_1..E_q whose union is E. Each edge carries an
/// independently sampled nonzero tuple; non-edges are implicitly all-zero.
///
/// Holds a pointer to the instance, which must outlive the partition.
class EdgePartition {
 public:
  static EdgePartition build(const SortingInstance& instance, int q, std::uint64_t seed);

  int q() const noexcept { return q_; }
  double alpha() const noexcept { return alpha_; }
  /// The edge probability the tuple law was solved for (p, or a floor when p = 0).
  double effective_p() const noexcept { return effective_p_; }

  /// Indicator E_level(u, v), level in 1..q.
  bool contains(int level, Vertex u, Vertex v) const;
  LevelTuple tuple(Vertex u, Vertex v) const;
  LevelTuple edge_tuple(std::size_t edge_index) const { return tuples_.at(edge_index); }

  const SortingInstance& instance() const noexcept { return *instance_; }

  /// {"q", "alpha", "tuples": [[u, v, mask], ...]}
  std::string to_json() const;

 private:
  const SortingInstance* instance_ = nullptr;
  int q_ = 1;
  double alpha_ = 2.0;
  double effective_p_ = 0.0;
  std::vector<LevelTuple> tuples_;  // per edge index
};

}  // namespace gsort
