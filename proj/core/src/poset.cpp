#include "gsort/poset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gsort/errors.hpp"

namespace gsort {
namespace {

void check_cap(std::size_t n, std::size_t cap) {
  const std::size_t limit = std::min(cap, kMaxExactVertices);
  if (n > limit) {
    throw CapacityError("exact enumeration needs n <= " + std::to_string(limit) + ", got " + std::to_string(n));
  }
}

std::vector<std::uint64_t> predecessor_masks(const DirectedKnowledge& k) {
  std::vector<std::uint64_t> masks(k.n());
  for (Vertex v = 0; v < k.n(); ++v) masks[v] = k.predecessor_mask(v);
  return masks;
}

}  // namespace

DirectedKnowledge::DirectedKnowledge(std::size_t n)
    : n_(n), words_((n + 63) / 64), succ_(n * words_, 0), pred_(n * words_, 0) {}

void DirectedKnowledge::check(Vertex v) const {
  if (v >= n_) throw std::invalid_argument("unknown vertex " + std::to_string(v));
}

void DirectedKnowledge::add(Vertex u, Vertex v) {
  check(u);
  check(v);
  if (u == v) throw std::invalid_argument("add: u == v");
  if (implies(v, u)) {
    throw InconsistencyError("adding " + std::to_string(u) + " -> " + std::to_string(v) + " closes a cycle");
  }
  known_.push_back({u, v});
  if (implies(u, v)) return;
  // Everything at or before u now precedes everything at or after v.
  std::vector<std::uint64_t> before(pred_.begin() + static_cast<std::ptrdiff_t>(u * words_),
                                    pred_.begin() + static_cast<std::ptrdiff_t>((u + 1) * words_));
  std::vector<std::uint64_t> after(succ_.begin() + static_cast<std::ptrdiff_t>(v * words_),
                                   succ_.begin() + static_cast<std::ptrdiff_t>((v + 1) * words_));
  before[u >> 6] |= std::uint64_t{1} << (u & 63);
  after[v >> 6] |= std::uint64_t{1} << (v & 63);
  for (std::size_t w = 0; w < words_; ++w) {
    for (std::uint64_t bits = before[w]; bits; bits &= bits - 1) {
      const std::size_t a = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
      for (std::size_t x = 0; x < words_; ++x) succ_[a * words_ + x] |= after[x];
    }
    for (std::uint64_t bits = after[w]; bits; bits &= bits - 1) {
      const std::size_t b = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
      for (std::size_t x = 0; x < words_; ++x) pred_[b * words_ + x] |= before[x];
    }
  }
}

std::size_t DirectedKnowledge::closure_size() const {
  std::size_t total = 0;
  for (std::uint64_t w : succ_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

bool DirectedKnowledge::unique_extension() const {
  for (std::size_t v = 0; v < n_; ++v) {
    std::size_t related = 0;
    for (std::size_t w = 0; w < words_; ++w)
      related += static_cast<std::size_t>(std::popcount(succ_[v * words_ + w] | pred_[v * words_ + w]));
    if (related + 1 != n_) return false;
  }
  return true;
}

std::vector<Vertex> DirectedKnowledge::topological_order() const {
  // Among vertices whose predecessors are all placed, take the smallest id.
  std::vector<std::size_t> waiting(n_, 0);
  for (std::size_t v = 0; v < n_; ++v)
    for (std::size_t w = 0; w < words_; ++w)
      waiting[v] += static_cast<std::size_t>(std::popcount(pred_[v * words_ + w]));
  std::vector<Vertex> order;
  order.reserve(n_);
  std::vector<std::uint8_t> placed(n_, 0);
  for (std::size_t step = 0; step < n_; ++step) {
    std::size_t pick = n_;
    for (std::size_t v = 0; v < n_; ++v)
      if (!placed[v] && waiting[v] == 0) {
        pick = v;
        break;
      }
    if (pick == n_) throw InvariantViolation("topological_order: cycle in closure");
    placed[pick] = 1;
    order.push_back(static_cast<Vertex>(pick));
    for (std::size_t w = 0; w < words_; ++w)
      for (std::uint64_t bits = succ_[pick * words_ + w]; bits; bits &= bits - 1)
        --waiting[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))];
  }
  return order;
}

std::uint64_t DirectedKnowledge::predecessor_mask(Vertex v) const {
  check(v);
  if (n_ > 64) throw CapacityError("predecessor_mask: n > 64");
  return pred_[v];
}

void for_each_extension(const DirectedKnowledge& knowledge, const std::function<void(std::span<const Vertex>)>& visit,
                        std::size_t cap) {
  const std::size_t n = knowledge.n();
  check_cap(n, cap);
  const std::vector<std::uint64_t> preds = predecessor_masks(knowledge);
  std::vector<Vertex> prefix;
  prefix.reserve(n);
  std::function<void(std::uint64_t)> extend = [&](std::uint64_t placed) {
    if (prefix.size() == n) {
      visit(prefix);
      return;
    }
    for (Vertex v = 0; v < n; ++v) {
      const std::uint64_t bit = std::uint64_t{1} << v;
      if ((placed & bit) || (preds[v] & ~placed)) continue;
      prefix.push_back(v);
      extend(placed | bit);
      prefix.pop_back();
    }
  };
  extend(0);
}

std::vector<std::vector<Vertex>> enumerate_compatible(const DirectedKnowledge& knowledge, std::size_t cap) {
  std::vector<std::vector<Vertex>> out;
  for_each_extension(
      knowledge, [&](std::span<const Vertex> ext) { out.emplace_back(ext.begin(), ext.end()); }, cap);
  return out;
}

ExactRanks exact_rank_sums(const DirectedKnowledge& knowledge, std::size_t cap) {
  const std::size_t n = knowledge.n();
  check_cap(n, cap);
  const std::vector<std::uint64_t> preds = predecessor_masks(knowledge);
  const std::size_t states = std::size_t{1} << n;
  const std::uint64_t full = states - 1;
  // prefix[S]: orderings of the down-set S; suffix[S]: orderings of the rest
  // once S has been placed. Both vanish on sets that are not down-sets.
  std::vector<std::uint64_t> prefix(states, 0);
  std::vector<std::uint64_t> suffix(states, 0);
  prefix[0] = 1;
  for (std::uint64_t s = 0; s < states; ++s) {
    if (!prefix[s]) continue;
    for (Vertex v = 0; v < n; ++v) {
      const std::uint64_t bit = std::uint64_t{1} << v;
      if (!(s & bit) && !(preds[v] & ~s)) prefix[s | bit] += prefix[s];
    }
  }
  suffix[full] = 1;
  for (std::uint64_t s = states; s-- > 0;) {
    if (!prefix[s]) continue;
    std::uint64_t ways = s == full ? 1 : 0;
    for (Vertex v = 0; v < n; ++v) {
      const std::uint64_t bit = std::uint64_t{1} << v;
      if (!(s & bit) && !(preds[v] & ~s)) ways += suffix[s | bit];
    }
    suffix[s] = ways;
  }
  ExactRanks out;
  out.extensions = prefix[full];
  out.rank_sums.assign(n, 0);
  for (std::uint64_t s = 0; s < states; ++s) {
    if (!prefix[s]) continue;
    const auto position = static_cast<std::uint64_t>(std::popcount(s)) + 1;
    for (Vertex v = 0; v < n; ++v) {
      const std::uint64_t bit = std::uint64_t{1} << v;
      if (!(s & bit) && !(preds[v] & ~s)) out.rank_sums[v] += prefix[s] * suffix[s | bit] * position;
    }
  }
  return out;
}

std::uint64_t count_extensions(const DirectedKnowledge& knowledge, std::size_t cap) {
  return exact_rank_sums(knowledge, cap).extensions;
}

std::size_t default_burn_in(std::size_t n) {
  if (n < 2) return 0;
  const double x = std::pow(static_cast<double>(n), 3.0) * std::log(static_cast<double>(n));
  return static_cast<std::size_t>(std::ceil(x));
}

std::size_t default_thinning(std::size_t n) { return std::max<std::size_t>(1, n * n); }

ExtensionChain::ExtensionChain(const DirectedKnowledge& knowledge, std::uint64_t seed)
    : knowledge_(&knowledge), rng_(seed), order_(knowledge.topological_order()) {}

void ExtensionChain::step() {
  const std::size_t n = order_.size();
  if (n < 2) return;
  const std::uint64_t r = rng_.below(2 * (n - 1));
  if (r & 1U) return;  // lazy half
  const std::size_t i = r >> 1;
  if (!knowledge_->implies(order_[i], order_[i + 1])) std::swap(order_[i], order_[i + 1]);
}

std::vector<Vertex> sample_extension(const DirectedKnowledge& knowledge, std::uint64_t seed,
                                     const McmcOptions& options) {
  ExtensionChain chain(knowledge, seed);
  chain.advance(options.burn_in.value_or(default_burn_in(knowledge.n())));
  return {chain.state().begin(), chain.state().end()};
}

std::vector<double> average_ranks(const DirectedKnowledge& knowledge, RankMode mode, std::uint64_t seed,
                                  std::size_t cap, const McmcOptions& options) {
  const std::size_t n = knowledge.n();
  std::vector<double> ranks(n, 0.0);
  if (mode.kind == RankMode::Kind::kExact) {
    const ExactRanks exact = exact_rank_sums(knowledge, cap);
    for (std::size_t v = 0; v < n; ++v)
      ranks[v] = static_cast<double>(exact.rank_sums[v]) / static_cast<double>(exact.extensions);
    return ranks;
  }
  if (mode.samples == 0) throw std::invalid_argument("average_ranks: sampled mode needs k >= 1");
  ExtensionChain chain(knowledge, seed);
  chain.advance(options.burn_in.value_or(default_burn_in(n)));
  const std::size_t thin = options.thinning.value_or(default_thinning(n));
  std::vector<std::uint64_t> sums(n, 0);
  for (std::size_t k = 0; k < mode.samples; ++k) {
    chain.advance(thin);
    const auto state = chain.state();
    for (std::size_t pos = 0; pos < n; ++pos) sums[state[pos]] += pos + 1;
  }
  for (std::size_t v = 0; v < n; ++v) ranks[v] = static_cast<double>(sums[v]) / static_cast<double>(mode.samples);
  return ranks;
}

}  // namespace gsort
