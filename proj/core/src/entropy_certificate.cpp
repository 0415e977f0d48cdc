#include "gsort/entropy_certificate.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "gsort/errors.hpp"
#include "json.hpp"

namespace gsort {
namespace {

void check_cap(std::size_t n, std::size_t cap) {
  const std::size_t limit = std::min(cap, kMaxExactVertices);
  if (n > limit) throw CapacityError("consistent-permutation count needs n <= " + std::to_string(limit));
}

std::vector<std::uint64_t> adjacency_masks(const SortingInstance& graph) {
  std::vector<std::uint64_t> adj(graph.n(), 0);
  for (const Edge& e : graph.edges()) {
    adj[e.u] |= std::uint64_t{1} << e.v;
    adj[e.v] |= std::uint64_t{1} << e.u;
  }
  return adj;
}

std::uint64_t count_with(const std::vector<std::uint64_t>& adj, const std::vector<std::uint64_t>& must_follow) {
  const std::size_t n = adj.size();
  const std::size_t states = std::size_t{1} << n;
  // ways[S * n + v]: orderings of S along graph edges ending at v.
  std::vector<std::uint64_t> ways(states * n, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (must_follow[v] == 0) ways[(std::size_t{1} << v) * n + v] = 1;
  for (std::size_t s = 1; s < states; ++s) {
    for (std::size_t last = 0; last < n; ++last) {
      const std::uint64_t w = ways[s * n + last];
      if (!w) continue;
      for (std::uint64_t next = adj[last] & ~s; next; next &= next - 1) {
        const auto x = static_cast<std::size_t>(std::countr_zero(next));
        if (must_follow[x] & ~s) continue;
        ways[(s | (std::size_t{1} << x)) * n + x] += w;
      }
    }
  }
  std::uint64_t total = 0;
  for (std::size_t v = 0; v < n; ++v) total += ways[(states - 1) * n + v];
  return total;
}

struct Counter {
  std::vector<std::uint64_t> adj;
  std::vector<std::uint64_t> must_follow;  // bit a of row b: a must precede b

  std::uint64_t with(Vertex first, Vertex second) {
    const std::uint64_t saved = must_follow[second];
    must_follow[second] |= std::uint64_t{1} << first;
    const std::uint64_t k = count_with(adj, must_follow);
    must_follow[second] = saved;
    return k;
  }
};

bool respects(const SortingInstance& graph, std::span<const Vertex> order, std::span<const Arc> known) {
  if (order.size() != graph.n()) return false;
  std::vector<std::size_t> pos(graph.n(), graph.n());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] >= graph.n() || pos[order[i]] != graph.n()) return false;
    pos[order[i]] = i;
  }
  for (std::size_t i = 0; i + 1 < order.size(); ++i)
    if (!graph.has_edge(order[i], order[i + 1])) return false;
  for (const Arc& a : known)
    if (pos[a.first] > pos[a.second]) return false;
  return true;
}

}  // namespace

std::uint64_t count_consistent(const SortingInstance& graph, std::span<const Arc> known, std::size_t cap) {
  check_cap(graph.n(), cap);
  std::vector<std::uint64_t> must_follow(graph.n(), 0);
  for (const Arc& a : known) {
    graph.check_vertex(a.first);
    graph.check_vertex(a.second);
    must_follow[a.second] |= std::uint64_t{1} << a.first;
  }
  return count_with(adjacency_masks(graph), must_follow);
}

std::uint64_t hamiltonian_path_count(const SortingInstance& graph, std::size_t cap) {
  return count_consistent(graph, {}, cap) / 2;
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("binary_entropy: x must lie in [0, 1]");
  auto term = [](double y) { return y > 0.0 ? -y * std::log2(y) : 0.0; };
  return term(x) + term(1.0 - x);
}

QueryTrace trace_from_log(std::span<const QueryRecord> log, std::vector<Vertex> claimed_order) {
  QueryTrace trace;
  trace.events.reserve(log.size());
  for (const QueryRecord& r : log) trace.events.push_back({r.u, r.v, r.answer == Direction::kBefore, std::nullopt});
  trace.claimed_order = std::move(claimed_order);
  return trace;
}

AuditReport audit_trace(const SortingInstance& graph, const QueryTrace& trace, std::size_t cap) {
  check_cap(graph.n(), cap);
  AuditReport report;
  Counter counter{adjacency_masks(graph), std::vector<std::uint64_t>(graph.n(), 0)};
  std::vector<Arc> known;
  std::uint64_t k = count_with(counter.adj, counter.must_follow);
  report.k0 = k;
  report.log2_k0 = k > 0 ? std::log2(static_cast<double>(k)) : 0.0;
  report.total_queries = trace.events.size();

  auto fail = [&](std::size_t step, std::string why) {
    if (!report.failed_step) {
      report.failed_step = step;
      report.reason = std::move(why);
    }
  };

  for (std::size_t t = 0; t < trace.events.size(); ++t) {
    const TraceEvent& ev = trace.events[t];
    if (ev.u >= graph.n() || ev.v >= graph.n() || ev.u == ev.v || !graph.has_edge(ev.u, ev.v)) {
      fail(t, "queried pair is not an edge");
      break;
    }
    AuditStep step{ev.u, ev.v, ev.u_first, k, counter.with(ev.u, ev.v), counter.with(ev.v, ev.u), 0, 0.0};
    const Arc answer = ev.u_first ? Arc{ev.u, ev.v} : Arc{ev.v, ev.u};
    step.after = ev.u_first ? step.a : step.b;
    step.bits = (k > 0 && step.after > 0) ? std::log2(static_cast<double>(k)) - std::log2(static_cast<double>(step.after))
                                          : 0.0;
    report.steps.push_back(step);
    if (step.a + step.b != k) fail(t, "split a + b does not equal K");
    if (step.after == 0) fail(t, "answer inconsistent with earlier answers");
    if (ev.claimed_after && *ev.claimed_after != step.after) fail(t, "claimed count is not the induced branch");
    if (report.failed_step) break;
    counter.must_follow[answer.second] |= std::uint64_t{1} << answer.first;
    known.push_back(answer);
    k = step.after;
  }

  report.determined = !report.failed_step && k == 1;
  report.claim_matches = report.determined && respects(graph, trace.claimed_order, known);
  if (!report.failed_step && !report.determined) report.reason = "more than one consistent permutation remains";
  if (report.determined && !report.claim_matches) report.reason = "claimed order is not the consistent permutation";
  report.passed = report.determined && report.claim_matches;
  return report;
}

std::string audit_to_json(const AuditReport& report) {
  nlohmann::ordered_json j;
  j["K0"] = report.k0;
  auto steps = nlohmann::ordered_json::array();
  for (const AuditStep& s : report.steps) {
    nlohmann::ordered_json js;
    js["pair"] = {s.u, s.v};
    js["u_first"] = s.u_first;
    js["a"] = s.a;
    js["b"] = s.b;
    js["K_after"] = s.after;
    steps.push_back(std::move(js));
  }
  j["steps"] = std::move(steps);
  j["total_queries"] = report.total_queries;
  j["log2_K0"] = report.log2_k0;
  j["verdict"] = report.passed ? "pass" : "fail";
  if (report.failed_step) j["failed_step"] = *report.failed_step;
  if (!report.reason.empty()) j["reason"] = report.reason;
  return j.dump();
}

std::string trace_to_json(const QueryTrace& trace) {
  nlohmann::ordered_json j;
  auto events = nlohmann::ordered_json::array();
  for (const TraceEvent& e : trace.events) {
    nlohmann::ordered_json je;
    je["u"] = e.u;
    je["v"] = e.v;
    je["u_first"] = e.u_first;
    if (e.claimed_after) je["claimed_after"] = *e.claimed_after;
    events.push_back(std::move(je));
  }
  j["events"] = std::move(events);
  j["claimed_order"] = trace.claimed_order;
  return j.dump();
}

QueryTrace trace_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    QueryTrace trace;
    for (const auto& je : j.at("events")) {
      TraceEvent e{je.at("u").get<Vertex>(), je.at("v").get<Vertex>(), je.at("u_first").get<bool>(), std::nullopt};
      if (je.contains("claimed_after")) e.claimed_after = je.at("claimed_after").get<std::uint64_t>();
      trace.events.push_back(e);
    }
    if (j.contains("claimed_order")) trace.claimed_order = j.at("claimed_order").get<std::vector<Vertex>>();
    return trace;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("trace json: ") + e.what());
  }
}

}  // namespace gsort
