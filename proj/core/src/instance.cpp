#include "gsort/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gsort/errors.hpp"
#include "gsort/rng.hpp"
#include "json.hpp"

namespace gsort {
namespace {

std::vector<Vertex> random_order(std::size_t n, Rng& rng) {
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  return order;
}

std::vector<std::size_t> ranks_of(const std::vector<Vertex>& order) {
  std::vector<std::size_t> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

Edge normalized(Vertex a, Vertex b) { return a < b ? Edge{a, b} : Edge{b, a}; }

bool edge_less(const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; }

double stochastic_density(std::size_t n, std::size_t m) {
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0 - static_cast<double>(n - 1);
  if (pairs <= 0) return 0.0;
  return static_cast<double>(m - (n - 1)) / pairs;
}

}  // namespace

std::string_view to_string(EdgeKind kind) {
  return kind == EdgeKind::kDeterministic ? "deterministic" : "stochastic";
}

SortingInstance SortingInstance::generate(std::size_t n, double p, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate: n must be at least 2");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("generate: p must lie in [0, 1]");
  if (n > (std::size_t{1} << 31)) throw std::invalid_argument("generate: n too large");

  Rng rng(derive_seed(seed, Stream::kInstance));
  const std::vector<Vertex> order = random_order(n, rng);

  SortingInstance inst;
  inst.p_ = p;
  inst.seed_ = seed;
  inst.hidden_rank_ = ranks_of(order);

  auto consecutive = [&](Vertex a, Vertex b) {
    const std::size_t ra = inst.hidden_rank_[a];
    const std::size_t rb = inst.hidden_rank_[b];
    return ra + 1 == rb || rb + 1 == ra;
  };

  for (std::size_t r = 0; r + 1 < n; ++r) inst.edges_.push_back(normalized(order[r], order[r + 1]));

  // Bernoulli(p) over all pairs in lexicographic order, using geometric gaps
  // between successes; consecutive-rank hits are dropped (already present).
  if (p >= 1.0) {
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v)
        if (!consecutive(u, v)) inst.edges_.push_back({u, v});
  } else if (p > 0.0) {
    const double log_q = std::log1p(-p);
    std::size_t u = 0;
    std::size_t offset = 0;  // position within row u, which holds pairs (u, u+1..n-1)
    bool first = true;
    while (u + 1 < n) {
      const double gap = std::floor(std::log(1.0 - rng.unit()) / log_q);
      std::size_t step = gap >= 1e18 ? std::size_t{1} << 62 : static_cast<std::size_t>(gap);
      step += first ? 0 : 1;
      first = false;
      offset += step;
      while (u + 1 < n && offset >= n - 1 - u) {
        offset -= n - 1 - u;
        ++u;
      }
      if (u + 1 >= n) break;
      const Vertex a = static_cast<Vertex>(u);
      const Vertex b = static_cast<Vertex>(u + 1 + offset);
      if (!consecutive(a, b)) inst.edges_.push_back({a, b});
    }
  }

  std::sort(inst.edges_.begin(), inst.edges_.end(), edge_less);
  inst.kinds_.reserve(inst.edges_.size());
  for (const Edge& e : inst.edges_)
    inst.kinds_.push_back(consecutive(e.u, e.v) ? EdgeKind::kDeterministic : EdgeKind::kStochastic);
  inst.build_adjacency();
  return inst;
}

SortingInstance SortingInstance::from_graph(std::vector<std::size_t> hidden_rank, std::vector<Edge> edges, double p,
                                            std::uint64_t seed) {
  const std::size_t n = hidden_rank.size();
  if (n < 2) throw std::invalid_argument("from_graph: n must be at least 2");
  std::vector<Vertex> order(n, static_cast<Vertex>(n));
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t r = hidden_rank[v];
    if (r >= n || order[r] != n) throw std::invalid_argument("from_graph: hidden_rank is not a bijection");
    order[r] = static_cast<Vertex>(v);
  }
  for (Edge& e : edges) {
    if (e.u >= n || e.v >= n) throw std::invalid_argument("from_graph: edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("from_graph: self-loop");
    e = normalized(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), edge_less);
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  SortingInstance inst;
  inst.p_ = p;
  inst.seed_ = seed;
  inst.hidden_rank_ = std::move(hidden_rank);
  inst.edges_ = std::move(edges);
  inst.kinds_.reserve(inst.edges_.size());
  std::size_t path_edges = 0;
  for (const Edge& e : inst.edges_) {
    const std::size_t ra = inst.hidden_rank_[e.u];
    const std::size_t rb = inst.hidden_rank_[e.v];
    const bool det = ra + 1 == rb || rb + 1 == ra;
    path_edges += det ? 1 : 0;
    inst.kinds_.push_back(det ? EdgeKind::kDeterministic : EdgeKind::kStochastic);
  }
  if (path_edges != n - 1) throw std::invalid_argument("from_graph: hidden order is not a path in the graph");
  inst.build_adjacency();
  return inst;
}

void SortingInstance::build_adjacency() {
  const std::size_t n = hidden_rank_.size();
  offsets_.assign(n + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
  adjacency_.assign(offsets_[n], 0);
  adjacency_edge_.assign(offsets_[n], 0);
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  // Edges are sorted by (u, v), so walking them in order fills every row in
  // ascending neighbor order: for row x, neighbors below x arrive (as e.u) before
  // neighbors above x (as e.v, in increasing order).
  for (std::uint32_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    adjacency_[fill[e.v]] = e.u;
    adjacency_edge_[fill[e.v]++] = k;
  }
  for (std::uint32_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    adjacency_[fill[e.u]] = e.v;
    adjacency_edge_[fill[e.u]++] = k;
  }
}

void SortingInstance::check_vertex(Vertex v) const {
  if (v >= n()) throw std::invalid_argument("unknown vertex " + std::to_string(v));
}

std::span<const Vertex> SortingInstance::neighbors(Vertex v) const {
  check_vertex(v);
  return std::span<const Vertex>(adjacency_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

std::span<const std::uint32_t> SortingInstance::incident_edges(Vertex v) const {
  check_vertex(v);
  return std::span<const std::uint32_t>(adjacency_edge_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

std::optional<std::size_t> SortingInstance::edge_index(Vertex u, Vertex v) const {
  if (u >= n() || v >= n() || u == v) return std::nullopt;
  const auto row = neighbors(u);
  const auto it = std::lower_bound(row.begin(), row.end(), v);
  if (it == row.end() || *it != v) return std::nullopt;
  return adjacency_edge_[offsets_[u] + static_cast<std::size_t>(it - row.begin())];
}

std::vector<Vertex> SortingInstance::hidden_order() const {
  std::vector<Vertex> order(n());
  for (std::size_t v = 0; v < n(); ++v) order[hidden_rank_[v]] = static_cast<Vertex>(v);
  return order;
}

namespace fixtures {
namespace {

SortingInstance from_rank_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& rank_edges,
                                std::uint64_t seed, Rng& rng) {
  const std::vector<Vertex> order = random_order(n, rng);
  std::vector<Edge> edges;
  edges.reserve(rank_edges.size() + n);
  for (std::size_t r = 0; r + 1 < n; ++r) edges.push_back({order[r], order[r + 1]});
  for (auto [a, b] : rank_edges) edges.push_back({order[a], order[b]});
  std::vector<std::size_t> rank = ranks_of(order);
  // Density is filled in after deduplication.
  SortingInstance tmp = SortingInstance::from_graph(rank, edges, 0.0, seed);
  return SortingInstance::from_graph(std::move(rank), std::move(edges), stochastic_density(n, tmp.edge_count()), seed);
}

}  // namespace

SortingInstance path(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("path: n must be at least 2");
  Rng rng(derive_seed(seed, Stream::kInstance));
  return from_rank_edges(n, {}, seed, rng);
}

SortingInstance cycle_with_chords(std::size_t n, std::size_t chords, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("cycle_with_chords: n must be at least 3");
  Rng rng(derive_seed(seed, Stream::kInstance));
  std::vector<std::pair<std::size_t, std::size_t>> extra;
  extra.emplace_back(0, n - 1);
  const std::size_t available = n * (n - 1) / 2 - n;
  chords = std::min(chords, available);
  std::vector<std::uint8_t> taken(n * n, 0);
  for (std::size_t r = 0; r + 1 < n; ++r) taken[r * n + r + 1] = 1;
  taken[n - 1] = 1;
  while (extra.size() < chords + 1) {
    std::size_t a = rng.below(n);
    std::size_t b = rng.below(n);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (taken[a * n + b]) continue;
    taken[a * n + b] = 1;
    extra.emplace_back(a, b);
  }
  return from_rank_edges(n, extra, seed, rng);
}

SortingInstance two_cliques(std::size_t n, std::size_t clique_size, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("two_cliques: n must be at least 2");
  if (2 * clique_size > n) throw std::invalid_argument("two_cliques: cliques overlap");
  Rng rng(derive_seed(seed, Stream::kInstance));
  std::vector<std::pair<std::size_t, std::size_t>> extra;
  for (std::size_t a = 0; a < clique_size; ++a)
    for (std::size_t b = a + 2; b < clique_size; ++b) extra.emplace_back(a, b);
  for (std::size_t a = n - clique_size; a < n; ++a)
    for (std::size_t b = a + 2; b < n; ++b) extra.emplace_back(a, b);
  return from_rank_edges(n, extra, seed, rng);
}

}  // namespace fixtures

CountingOracle::CountingOracle(const SortingInstance& instance)
    : instance_(&instance), answered_(instance.edge_count(), 0) {}

Direction CountingOracle::query(Vertex u, Vertex v) {
  instance_->check_vertex(u);
  instance_->check_vertex(v);
  if (u == v) throw std::invalid_argument("query: u == v");
  const auto idx = instance_->edge_index(u, v);
  if (!idx) {
    throw ForbiddenComparison("query: (" + std::to_string(u) + ", " + std::to_string(v) + ") is not an edge");
  }
  return query_edge(*idx, u);
}

Direction CountingOracle::query_edge(std::size_t edge_index, Vertex u) {
  const Edge& e = instance_->edges()[edge_index];
  std::uint8_t& slot = answered_[edge_index];
  if (slot == 0) {
    slot = instance_->hidden_rank(e.u) < instance_->hidden_rank(e.v) ? 1 : 2;
    ++query_count_;
    if (recording_) {
      const Vertex v = u == e.u ? e.v : e.u;
      const bool u_first = instance_->hidden_rank(u) < instance_->hidden_rank(v);
      log_.push_back({u, v, u_first ? Direction::kBefore : Direction::kAfter});
    }
  }
  const bool low_first = slot == 1;
  return (low_first == (u == e.u)) ? Direction::kBefore : Direction::kAfter;
}

std::optional<Direction> CountingOracle::known(Vertex u, Vertex v) const {
  const auto idx = instance_->edge_index(u, v);
  if (!idx || answered_[*idx] == 0) return std::nullopt;
  const bool low_first = answered_[*idx] == 1;
  return (low_first == (u < v)) ? Direction::kBefore : Direction::kAfter;
}

std::string instance_to_json(const SortingInstance& instance) {
  nlohmann::ordered_json j;
  j["n"] = instance.n();
  j["p"] = instance.p();
  j["seed"] = instance.seed();
  j["hidden_rank"] = std::vector<std::size_t>(instance.hidden_ranks().begin(), instance.hidden_ranks().end());
  auto edges = nlohmann::ordered_json::array();
  auto kinds = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < instance.edge_count(); ++k) {
    edges.push_back({instance.edges()[k].u, instance.edges()[k].v});
    kinds.push_back(to_string(instance.kinds()[k]));
  }
  j["edges"] = std::move(edges);
  j["kinds"] = std::move(kinds);
  return j.dump();
}

SortingInstance instance_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("instance json: ") + e.what());
  }
  try {
    const std::size_t n = j.at("n").get<std::size_t>();
    auto rank = j.at("hidden_rank").get<std::vector<std::size_t>>();
    if (rank.size() != n) throw std::invalid_argument("instance json: hidden_rank length != n");
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) edges.push_back({e.at(0).get<Vertex>(), e.at(1).get<Vertex>()});
    const std::size_t listed = edges.size();
    SortingInstance inst = SortingInstance::from_graph(std::move(rank), std::move(edges), j.at("p").get<double>(),
                                                       j.at("seed").get<std::uint64_t>());
    if (inst.edge_count() != listed) throw std::invalid_argument("instance json: duplicate edges");
    if (j.contains("kinds")) {
      const auto& kinds = j.at("kinds");
      if (kinds.size() != inst.edge_count()) throw std::invalid_argument("instance json: kinds length mismatch");
      // Edges may be listed in any order; compare kinds by pair.
      for (std::size_t k = 0; k < kinds.size(); ++k) {
        const auto& e = j.at("edges").at(k);
        const auto idx = inst.edge_index(e.at(0).get<Vertex>(), e.at(1).get<Vertex>());
        if (kinds.at(k).get<std::string>() != to_string(inst.kinds()[*idx]))
          throw std::invalid_argument("instance json: kind disagrees with hidden order");
      }
    }
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("instance json: ") + e.what());
  }
}

}  // namespace gsort
