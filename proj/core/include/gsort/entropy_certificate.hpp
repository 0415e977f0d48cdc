#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsort/instance.hpp"
#include "gsort/poset.hpp"

namespace gsort {

/// Permutations that walk a Hamiltonian path of the graph and respect every
/// known arc. Subset DP over (visited set, last vertex).
std::uint64_t count_consistent(const SortingInstance& graph, std::span<const Arc> known,
                               std::size_t cap = kDefaultExactCap);

/// Undirected Hamiltonian paths (each counted once, n >= 2).
std::uint64_t hamiltonian_path_count(const SortingInstance& graph, std::size_t cap = kDefaultExactCap);

/// -(x lg x + (1-x) lg (1-x)) with 0 lg 0 = 0.
double binary_entropy(double x);

struct TraceEvent {
  Vertex u;
  Vertex v;
  bool u_first;
  /// Count of consistent permutations the trace claims after this answer.
  std::optional<std::uint64_t> claimed_after;
};

struct QueryTrace {
  std::vector<TraceEvent> events;
  std::vector<Vertex> claimed_order;
};

QueryTrace trace_from_log(std::span<const QueryRecord> log, std::vector<Vertex> claimed_order);

struct AuditStep {
  Vertex u;
  Vertex v;
  bool u_first;
  std::uint64_t before;  // K_t
  std::uint64_t a;       // consistent permutations with u before v
  std::uint64_t b;       // ... with v before u
  std::uint64_t after;   // K_{t+1}
  double bits;           // lg K_t - lg K_{t+1}
};

struct AuditReport {
  std::uint64_t k0 = 0;
  std::vector<AuditStep> steps;
  std::size_t total_queries = 0;
  double log2_k0 = 0.0;
  bool determined = false;     // K_T == 1
  bool claim_matches = false;  // claimed order is the one consistent permutation
  std::optional<std::size_t> failed_step;
  std::string reason;
  bool passed = false;
};

/// Replays the trace, checking K_{t+1} in {a_t, b_t} with a_t + b_t = K_t at
/// every step and K_T = 1 for the claimed order.
AuditReport audit_trace(const SortingInstance& graph, const QueryTrace& trace, std::size_t cap = kDefaultExactCap);

/// {K0, steps: [{pair, a, b, K_after}], total_queries, log2_K0, verdict}
std::string audit_to_json(const AuditReport& report);

/// {"events": [{"u", "v", "u_first", "claimed_after"?}], "claimed_order": [...]}
std::string trace_to_json(const QueryTrace& trace);
QueryTrace trace_from_json(std::string_view text);

}  // namespace gsort
