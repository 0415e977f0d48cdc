#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gsort/instance.hpp"
#include "gsort/rng.hpp"

namespace gsort {

inline constexpr std::size_t kDefaultExactCap = 10;
/// Hard limit for the subset DP: 18! * 18 still fits in 64 bits.
inline constexpr std::size_t kMaxExactVertices = 18;

/// Known directed pairs plus their transitive closure, kept as bit rows.
class DirectedKnowledge {
 public:
  explicit DirectedKnowledge(std::size_t n);

  std::size_t n() const noexcept { return n_; }

  /// Adds u -> v. Throws InconsistencyError if v already precedes u.
  void add(Vertex u, Vertex v);
  void add(const Arc& arc) { add(arc.first, arc.second); }

  /// u precedes v in the closure.
  bool implies(Vertex u, Vertex v) const { return test(succ_, u, v); }
  bool comparable(Vertex u, Vertex v) const { return implies(u, v) || implies(v, u); }
  std::span<const Arc> known() const noexcept { return known_; }
  std::size_t closure_size() const;

  /// Exactly one linear extension: every pair is comparable in the closure.
  bool unique_extension() const;
  /// Kahn's order, smallest id first among available vertices.
  std::vector<Vertex> topological_order() const;

  /// Predecessor set of v as a bitmask; requires n <= 64.
  std::uint64_t predecessor_mask(Vertex v) const;

 private:
  bool test(const std::vector<std::uint64_t>& rows, Vertex a, Vertex b) const {
    return (rows[a * words_ + (b >> 6)] >> (b & 63)) & 1U;
  }
  void check(Vertex v) const;

  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> succ_;
  std::vector<std::uint64_t> pred_;
  std::vector<Arc> known_;
};

/// Calls visit for every linear extension, in lexicographic order.
void for_each_extension(const DirectedKnowledge& knowledge, const std::function<void(std::span<const Vertex>)>& visit,
                        std::size_t cap = kDefaultExactCap);
std::vector<std::vector<Vertex>> enumerate_compatible(const DirectedKnowledge& knowledge,
                                                      std::size_t cap = kDefaultExactCap);

/// Number of linear extensions and, per vertex, the sum of its 1-based rank
/// over all of them. Subset dynamic program, O(2^n * n).
struct ExactRanks {
  std::uint64_t extensions = 0;
  std::vector<std::uint64_t> rank_sums;
};
ExactRanks exact_rank_sums(const DirectedKnowledge& knowledge, std::size_t cap = kDefaultExactCap);
std::uint64_t count_extensions(const DirectedKnowledge& knowledge, std::size_t cap = kDefaultExactCap);

struct McmcOptions {
  std::optional<std::size_t> burn_in;   // default ceil(n^3 ln n)
  std::optional<std::size_t> thinning;  // default n^2
};

/// Lazy adjacent-transposition walk over linear extensions. The proposal is
/// symmetric, so the stationary law is uniform.
class ExtensionChain {
 public:
  ExtensionChain(const DirectedKnowledge& knowledge, std::uint64_t seed);

  void step();
  void advance(std::size_t steps) {
    for (std::size_t i = 0; i < steps; ++i) step();
  }
  std::span<const Vertex> state() const noexcept { return order_; }

 private:
  const DirectedKnowledge* knowledge_;
  Rng rng_;
  std::vector<Vertex> order_;
};

std::size_t default_burn_in(std::size_t n);
std::size_t default_thinning(std::size_t n);

std::vector<Vertex> sample_extension(const DirectedKnowledge& knowledge, std::uint64_t seed,
                                     const McmcOptions& options = {});

struct RankMode {
  enum class Kind { kExact, kSampled };
  Kind kind = Kind::kExact;
  std::size_t samples = 0;

  static RankMode exact() { return {Kind::kExact, 0}; }
  static RankMode sampled(std::size_t k) { return {Kind::kSampled, k}; }
};

/// S(v): average 1-based rank of v over the linear extensions.
std::vector<double> average_ranks(const DirectedKnowledge& knowledge, RankMode mode, std::uint64_t seed = 0,
                                  std::size_t cap = kDefaultExactCap, const McmcOptions& options = {});

}  // namespace gsort
