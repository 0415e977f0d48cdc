// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [output-dir]   (the regime report CSV is written there, default ".")

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gsort/diagnostics.hpp"
#include "gsort/edge_partition.hpp"
#include "gsort/entropy_certificate.hpp"
#include "gsort/errors.hpp"
#include "gsort/experiment.hpp"
#include "gsort/leveled_sort.hpp"
#include "gsort/poset.hpp"
#include "gsort/rng.hpp"
#include "gsort/sparse_sort.hpp"

using namespace gsort;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// 1. StochasticSort is exact on a 5 x 5 grid, 8 seeds per cell.
Verdict exact_stochastic() {
  const std::vector<std::size_t> ns = {8, 16, 64, 256, 512};
  std::size_t runs = 0;
  std::size_t exact = 0;
  for (std::size_t n : ns) {
    const double dn = static_cast<double>(n);
    const std::vector<double> ps = {std::min(1.0, 2 * std::log(dn) / dn), 0.05, 0.25, 0.75, 1.0};
    for (std::size_t pi = 0; pi < ps.size(); ++pi)
      for (std::uint64_t t = 0; t < 8; ++t) {
        const std::uint64_t seed = derive_seed(1, {n, pi, t});
        const auto inst = SortingInstance::generate(n, ps[pi], seed);
        const auto out = stochastic_sort(inst, {}, seed);
        ++runs;
        exact += out.order == inst.hidden_order();
      }
  }
  return {runs == 200 && exact == runs, fmt("%zu/%zu exact", exact, runs)};
}

// 2. Normalized query count stays within a factor 2 across n.
Verdict query_scaling() {
  ExperimentConfig cfg;
  cfg.n_values = {256, 512, 1024, 2048, 4096};
  cfg.p_values = {"8*ln(n)/n"};
  cfg.trials = 30;
  cfg.seed = 2;
  cfg.record_timing = false;
  const auto records = run_experiment(cfg);
  std::vector<double> means;
  std::string detail = "mean q/(n log2 np):";
  for (std::size_t n : cfg.n_values) {
    double sum = 0.0;
    std::size_t k = 0;
    for (const auto& r : records)
      if (r.n == n) sum += r.normalized, ++k;
    means.push_back(sum / static_cast<double>(k));
    detail += fmt(" n=%zu:%.3f", n, means.back());
  }
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  const double ratio = *hi / *lo;
  detail += fmt(" max/min=%.3f (limit 2)", ratio);
  return {ratio <= 2.0, detail};
}

// 3. Per-level marginals of one stochastic pair, plus solver checks.
Verdict partition_fidelity() {
  const double p = 0.3;
  const int q = 4;
  const double alpha = solve_alpha(p, q);
  const std::size_t trials = 100000;
  std::vector<std::size_t> hits(q, 0);
  for (std::uint64_t s = 0; s < trials; ++s) {
    // Ranks 0 and 2 of a 3-vertex instance never form a deterministic pair.
    const auto inst = SortingInstance::generate(3, p, s);
    const auto order = inst.hidden_order();
    const auto part = EdgePartition::build(inst, q, derive_seed(s, Stream::kPartition));
    const LevelTuple t = part.tuple(order[0], order[2]);
    for (int i = 0; i < q; ++i) hits[i] += (t >> i) & 1U;
  }
  bool ok = true;
  std::string detail = fmt("alpha=%.6f", alpha);
  for (int i = 1; i <= q; ++i) {
    const double expect = alpha * p / std::ldexp(1.0, i);
    const double freq = static_cast<double>(hits[i - 1]) / trials;
    const double sigma = std::sqrt(expect * (1 - expect) / trials);
    const double z = (freq - expect) / sigma;
    ok = ok && std::abs(z) <= 3.0;
    detail += fmt(" E%d:%.5f/%.5f(z=%.2f)", i, freq, expect, z);
  }
  double worst_q1 = 0.0;
  double worst_residual = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double pp = k / 1000.0;
    worst_q1 = std::max(worst_q1, std::abs(solve_alpha(pp, 1) - 2.0));
    for (int qq = 1; qq <= 16; ++qq)
      worst_residual = std::max(worst_residual, std::abs(alpha_product(solve_alpha(pp, qq), pp, qq) - (1 - pp)));
  }
  ok = ok && worst_q1 <= 1e-9 && worst_residual < 1e-9;
  detail += fmt(" |alpha(q=1)-2|<=%.1e residual<=%.1e", worst_q1, worst_residual);
  return {ok, detail};
}

// 4. find_first never spends more than n queries.
Verdict find_first_bound() {
  const double ps[] = {0.0, 0.02, 0.1, 0.3, 0.6, 1.0};
  std::size_t worst_excess = 0;
  std::size_t violations = 0;
  std::size_t wrong = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const std::size_t n = 2 + s % 199;
    const auto inst = SortingInstance::generate(n, ps[s % 6], s);
    const auto part = EdgePartition::build(inst, default_level_count(n, inst.p()), s);
    CountingOracle oracle(inst);
    LeveledSorter sorter(part, OracleView(oracle));
    const Vertex first = sorter.find_first();
    wrong += inst.hidden_rank(first) != 0;
    if (oracle.query_count() > n) ++violations;
    worst_excess = std::max(worst_excess, oracle.query_count() * 1000 / n);
  }
  return {violations == 0 && wrong == 0,
          fmt("1000 runs, violations=%zu, wrong minimum=%zu, max queries/n=%.3f", violations, wrong,
              worst_excess / 1000.0)};
}

// 5. Anchor counts at rebuild time, and the level-size constant per n.
Verdict anchors_and_levels() {
  struct Fit {
    std::size_t checkpoints = 0;
    std::size_t anchored = 0;
    double k_max = 0.0;
  };
  auto measure = [](std::size_t n, std::size_t seeds) {
    Fit fit;
    const double dn = static_cast<double>(n);
    const double p = 8 * std::log(dn) / dn;
    for (std::uint64_t s = 0; s < seeds; ++s) {
      const auto inst = SortingInstance::generate(n, p, derive_seed(5, {n, s}));
      CountingOracle oracle(inst);
      const LevelObserver obs = [&](const LevelEvent& e, const LeveledSorter& sorter) {
        if (e.kind != LevelEvent::Kind::kLevelRebuilt) return;
        const double target = sorter.target_size(e.level);
        if (target < 64.0) return;
        fit.k_max = std::max(fit.k_max, diagnostics::size_ratio(sorter, e.level));
        if (e.level <= 3) return;  // the anchor bound needs i >= 4
        ++fit.checkpoints;
        fit.anchored += static_cast<double>(diagnostics::anchor_count(sorter, e.level)) >= target / 128.0;
      };
      const auto out = stochastic_sort(oracle, {}, s, obs);
      if (out.order != inst.hidden_order()) throw InvariantViolation("stochastic sort returned a wrong order");
    }
    return fit;
  };
  std::string detail;
  const Fit big = measure(4096, 5);
  const double share = big.checkpoints ? static_cast<double>(big.anchored) / big.checkpoints : 0.0;
  detail += fmt("n=4096 anchors ok at %zu/%zu checkpoints (%.2f%%);", big.anchored, big.checkpoints, 100 * share);
  std::vector<double> ks;
  for (std::size_t n : {1024, 2048}) {
    ks.push_back(measure(n, 5).k_max);
    detail += fmt(" K(n=%zu)=%.3f", n, ks.back());
  }
  ks.push_back(big.k_max);
  detail += fmt(" K(n=4096)=%.3f", big.k_max);
  const auto [lo, hi] = std::minmax_element(ks.begin(), ks.end());
  const double spread = *hi / *lo;
  detail += fmt(" spread=%.3f (limit 2)", spread);
  return {big.checkpoints > 0 && share >= 0.99 && spread <= 2.0, detail};
}

// 6. Sparse sort with the fallback backend on random graphs and fixtures.
Verdict exact_sparse() {
  std::vector<std::pair<std::string, SortingInstance>> cases;
  const std::size_t ns[] = {8, 16, 32, 64};
  const double ps[] = {0.05, 0.15, 0.3, 0.6};
  for (std::uint64_t s = 0; s < 40; ++s)
    cases.emplace_back("random", SortingInstance::generate(ns[s % 4], ps[(s / 4) % 4], derive_seed(6, {s})));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::size_t n = 4 + 3 * s;  // 4..61
    cases.emplace_back("path", fixtures::path(n, s));
    cases.emplace_back("cycle+chords", fixtures::cycle_with_chords(n, n / 2, s));
    cases.emplace_back("two-cliques", fixtures::two_cliques(n, std::max<std::size_t>(2, n / 4), s));
  }
  std::size_t exact = 0;
  std::string failures;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& [kind, inst] = cases[i];
    CountingOracle oracle(inst);
    FallbackPredictionSorter fb;
    const auto out = sparse_generalized_sort(oracle, {}, &fb, derive_seed(6, {i, 1}));
    if (out.order == inst.hidden_order())
      ++exact;
    else
      failures += " " + kind + fmt("(n=%zu)", inst.n());
  }
  return {exact == cases.size(), fmt("%zu/%zu exact", exact, cases.size()) + failures};
}

// 7. Adding (u, v) with S(u) >= S(v) removes at least a 1/e share of the extensions.
Verdict shrinkage() {
  const double bound = 1.0 - 1.0 / std::numbers::e + 1e-12;
  std::size_t posets = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (std::size_t n = 2; n <= 6; ++n) {
    std::vector<Arc> pairs;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = 0; v < n; ++v)
        if (u != v) pairs.push_back({u, v});
    std::vector<Vertex> perm(n);
    const std::size_t m = pairs.size();
    auto visit = [&](const std::vector<Arc>& arcs) {
      DirectedKnowledge k(n);
      try {
        for (const Arc& a : arcs) k.add(a);
      } catch (const InconsistencyError&) {
        return;
      }
      ++posets;
      // Brute-force extensions as an independent count.
      std::vector<std::vector<std::size_t>> positions;
      for (Vertex v = 0; v < n; ++v) perm[v] = v;
      std::vector<std::size_t> pos(n);
      do {
        for (std::size_t i = 0; i < n; ++i) pos[perm[i]] = i;
        bool ok = true;
        for (const Arc& a : arcs) ok = ok && pos[a.first] < pos[a.second];
        if (ok) positions.push_back(pos);
      } while (std::next_permutation(perm.begin(), perm.end()));
      const ExactRanks exact = exact_rank_sums(k);
      if (exact.extensions != positions.size()) ++mismatches;
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v) {
          if (u == v || k.comparable(u, v) || exact.rank_sums[u] < exact.rank_sums[v]) continue;
          DirectedKnowledge more = k;
          more.add(u, v);
          const std::uint64_t after = count_extensions(more);
          const auto brute = static_cast<std::uint64_t>(std::count_if(
              positions.begin(), positions.end(), [&](const auto& p) { return p[u] < p[v]; }));
          if (after != brute) ++mismatches;
          const double ratio = static_cast<double>(after) / static_cast<double>(exact.extensions);
          worst = std::max(worst, ratio);
          ++checks;
          violations += ratio > bound;
        }
    };
    visit({});
    for (std::size_t a = 0; a < m; ++a) {
      visit({pairs[a]});
      for (std::size_t b = a + 1; b < m; ++b) {
        visit({pairs[a], pairs[b]});
        for (std::size_t c = b + 1; c < m; ++c) visit({pairs[a], pairs[b], pairs[c]});
      }
    }
  }
  return {violations == 0 && mismatches == 0 && checks > 0,
          fmt("%zu posets, %zu additions, worst ratio %.6f (limit %.6f), violations=%zu, count mismatches=%zu",
              posets, checks, worst, bound, violations, mismatches)};
}

// 8. MCMC average ranks against exact ranks.
Verdict mcmc_ranks() {
  Rng rng(derive_seed(8, Stream::kMcmc));
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.below(7);
    std::vector<Vertex> order(n);
    for (Vertex v = 0; v < n; ++v) order[v] = v;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    DirectedKnowledge k(n);
    const std::size_t arcs = rng.below(2 * n);
    for (std::size_t a = 0; a < arcs; ++a) {
      std::size_t i = rng.below(n);
      std::size_t j = rng.below(n);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      k.add(order[i], order[j]);
    }
    // Exact reference by enumeration.
    std::vector<double> exact(n, 0.0);
    const auto all = enumerate_compatible(k);
    for (const auto& ext : all)
      for (std::size_t i = 0; i < n; ++i) exact[ext[i]] += static_cast<double>(i + 1);
    const auto sampled = average_ranks(k, RankMode::sampled(20000), t);
    for (Vertex v = 0; v < n; ++v)
      worst = std::max(worst, std::abs(sampled[v] - exact[v] / static_cast<double>(all.size())));
  }
  return {worst <= 0.5, fmt("100 posets, max |MCMC - exact| = %.4f (limit 0.5)", worst)};
}

// 9. Entropy audit of StochasticSort traces, and the K_4 lower bound.
Verdict entropy_audit() {
  std::size_t audited = 0;
  std::size_t passed = 0;
  const double ps[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  for (std::uint64_t s = 0; s < 480; ++s) {
    const std::size_t n = 2 + s % 8;
    const auto inst = SortingInstance::generate(n, ps[(s / 8) % 6], derive_seed(9, {s}));
    CountingOracle oracle(inst);
    oracle.set_recording(true);
    const auto out = stochastic_sort(oracle, {}, s);
    ++audited;
    passed += audit_trace(inst, trace_from_log(oracle.log(), out.order)).passed;
  }
  double total = 0.0;
  const std::size_t trials = 2000;
  std::size_t wrong = 0;
  for (std::uint64_t s = 0; s < trials; ++s) {
    const auto inst = SortingInstance::generate(4, 1.0, derive_seed(9, {s, 4}));
    const auto out = stochastic_sort(inst, {}, s);
    wrong += out.order != inst.hidden_order();
    total += static_cast<double>(out.queries);
  }
  const double mean = total / trials;
  const double floor = std::log2(24.0) - 0.1;
  return {passed == audited && wrong == 0 && mean >= floor,
          fmt("%zu/%zu traces pass audit; K4 mean queries %.4f over %zu trials (floor %.4f)", passed, audited, mean,
              trials, floor)};
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

// 10. Informational report near the connectivity threshold; the CSV must be well formed.
Verdict regime_report(const std::filesystem::path& dir) {
  ExperimentConfig cfg;
  cfg.n_values = {512, 1024};
  cfg.p_values = {"(ln(n) + ln(ln(n)) + 4)/n"};
  cfg.trials = 20;
  cfg.seed = 10;
  cfg.record_timing = false;
  cfg.output_path = (dir / "acceptance_regime.csv").string();
  run_and_write(cfg);

  std::ifstream in(cfg.output_path);
  std::string line;
  std::getline(in, line);
  bool ok = line == kCsvHeader;
  std::size_t rows = 0;
  std::vector<double> sum(2, 0.0);
  std::vector<double> bound(2, 0.0);
  while (std::getline(in, line)) {
    const auto cells = split(line);
    if (cells.size() != 8 || cells[5] != "true") {
      ok = false;
      continue;
    }
    const std::size_t n = std::stoul(cells[0]);
    const double p = std::stod(cells[1]);
    const std::size_t slot = n == 512 ? 0 : 1;
    sum[slot] += std::stod(cells[4]);
    bound[slot] = static_cast<double>(n) * std::log2(static_cast<double>(n) * p);
    ++rows;
  }
  ok = ok && rows == 2 * cfg.trials;
  std::string detail = fmt("%zu rows in %s;", rows, cfg.output_path.c_str());
  for (std::size_t i = 0; i < 2; ++i) {
    const double mean = sum[i] / cfg.trials;
    detail += fmt(" n=%d: mean queries %.1f, n log2(np) %.1f, ratio %.3f;", i == 0 ? 512 : 1024, mean, bound[i],
                  mean / bound[i]);
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out_dir = argc > 1 ? argv[1] : ".";
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"exact correctness, stochastic", exact_stochastic},
      {"query scaling, stochastic", query_scaling},
      {"partition fidelity", partition_fidelity},
      {"find-first bound", find_first_bound},
      {"anchor and level diagnostics", anchors_and_levels},
      {"exact correctness, sparse", exact_sparse},
      {"shrinkage", shrinkage},
      {"average-rank estimates", mcmc_ranks},
      {"entropy audit", entropy_audit},
      {"lower-bound regime report", [&] { return regime_report(out_dir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
