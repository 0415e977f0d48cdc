#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "gsort/entropy_certificate.hpp"
#include "gsort/errors.hpp"
#include "gsort/experiment.hpp"
#include "gsort/instance.hpp"
#include "gsort/leveled_sort.hpp"
#include "gsort/sparse_sort.hpp"
#include "json.hpp"

namespace gsort::cli {
namespace {

// Bad input files are reported as usage errors, distinct from algorithm failures.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SortingInstance load_instance(const std::string& path) {
  try {
    return instance_from_json(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::string order_json(const std::vector<Vertex>& order, std::size_t queries, const nlohmann::ordered_json& extra = {}) {
  nlohmann::ordered_json j;
  j["order"] = order;
  j["queries"] = queries;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j.dump();
}

struct GenOptions {
  std::size_t n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct StochasticOptions {
  std::string instance;
  std::uint64_t seed = 0;
  int c = 8;
  std::optional<int> q;
  std::optional<double> rebuild_interval;
  std::string trace;
  std::string emit_trace;
};

struct SparseOptions {
  std::string instance;
  std::uint64_t seed = 0;
  std::string backend = "fallback";
  std::optional<std::size_t> a;
  std::optional<std::size_t> w;
  std::size_t samples = 200;
  std::size_t exact_cap = kDefaultExactCap;
  std::string rounds;
  std::string emit_trace;
};

struct ExperimentOptions {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::size_t> workers;
  bool no_timing = false;
};

struct AuditOptions {
  std::string instance;
  std::string trace;
  std::size_t cap = kDefaultExactCap;
};

int run_gen(const GenOptions& o, std::ostream& out) {
  const std::string text = instance_to_json(SortingInstance::generate(o.n, o.p, o.seed));
  if (o.out.empty()) {
    out << text << '\n';
  } else {
    open_output(o.out) << text << '\n';
  }
  return kExitOk;
}

void write_query_trace(const std::string& path, const CountingOracle& oracle, const std::vector<Vertex>& order) {
  open_output(path) << trace_to_json(trace_from_log(oracle.log(), order)) << '\n';
}

int run_stochastic(const StochasticOptions& o, std::ostream& out) {
  const SortingInstance instance = load_instance(o.instance);
  SortParams params;
  params.c = o.c;
  params.q = o.q;
  params.rebuild_interval = o.rebuild_interval;
  CountingOracle oracle(instance);
  oracle.set_recording(!o.emit_trace.empty());

  std::optional<std::ofstream> trace;
  LevelObserver observer;
  if (!o.trace.empty()) {
    trace.emplace(open_output(o.trace));
    observer = [&trace](const LevelEvent& e, const LeveledSorter& s) {
      *trace << trace_line(e, s.view().reversed()) << '\n';
    };
  }
  const SortOutcome result = stochastic_sort(oracle, params, o.seed, observer);
  if (!o.emit_trace.empty()) write_query_trace(o.emit_trace, oracle, result.order);
  out << order_json(result.order, result.queries, {{"correct", result.order == instance.hidden_order()}}) << '\n';
  return kExitOk;
}

int run_sparse(const SparseOptions& o, std::ostream& out) {
  const SortingInstance instance = load_instance(o.instance);
  SparseParams params;
  params.a = o.a;
  params.w = o.w;
  params.samples = o.samples;
  params.exact_cap = o.exact_cap;
  auto backend = make_prediction_sorter(o.backend);
  CountingOracle oracle(instance);
  oracle.set_recording(!o.emit_trace.empty());

  std::optional<std::ofstream> rounds;
  std::function<void(const SparseRound&)> on_round;
  if (!o.rounds.empty()) {
    rounds.emplace(open_output(o.rounds));
    on_round = [&rounds](const SparseRound& r) {
      nlohmann::ordered_json j;
      j["sampled"] = r.sampled;
      j["charged"] = r.charged;
      j["contradictions"] = r.contradictions;
      j["new_arcs"] = r.new_arcs;
      *rounds << j.dump() << '\n';
    };
  }
  const SparseOutcome result = sparse_generalized_sort(oracle, params, backend.get(), o.seed, on_round);
  if (!o.emit_trace.empty()) write_query_trace(o.emit_trace, oracle, result.order);
  nlohmann::ordered_json extra;
  extra["correct"] = result.order == instance.hidden_order();
  extra["loop_queries"] = result.loop_queries;
  extra["backend_queries"] = result.backend_queries;
  extra["rounds"] = result.rounds.size();
  extra["a"] = result.a;
  extra["w"] = result.w;
  out << order_json(result.order, result.queries, extra) << '\n';
  return kExitOk;
}

int run_experiment_cmd(const ExperimentOptions& o, std::ostream& out) {
  ExperimentConfig config;
  try {
    config = config_from_json(read_file(o.config));
  } catch (const std::invalid_argument& e) {
    throw InputError(o.config + ": " + e.what());
  }
  if (!o.out.empty()) config.output_path = o.out;
  if (!o.format.empty()) config.format = o.format;
  if (o.workers) config.workers = o.workers;
  if (o.no_timing) config.record_timing = false;
  if (config.output_path.empty()) throw InputError("experiment: no output path (use --out or output.path)");
  const auto records = run_and_write(config);
  out << "wrote " << records.size() << " records to " << config.output_path << '\n';
  return kExitOk;
}

int run_audit(const AuditOptions& o, std::ostream& out) {
  const SortingInstance instance = load_instance(o.instance);
  QueryTrace trace;
  try {
    trace = trace_from_json(read_file(o.trace));
  } catch (const std::invalid_argument& e) {
    throw InputError(o.trace + ": " + e.what());
  }
  const AuditReport report = audit_trace(instance, trace, o.cap);
  out << audit_to_json(report) << '\n';
  return report.passed ? kExitOk : kExitFailure;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized sorting laboratory", "gsort"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance and print it as JSON");
  gen_cmd->add_option("--n", gen.n, "Vertex count")->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
  gen_cmd->add_option("--p", gen.p, "Stochastic edge probability")->required()->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--out", gen.out, "Write to a file instead of standard output");

  StochasticOptions st;
  auto* st_cmd = app.add_subcommand("sort-stochastic", "Sort an instance with the leveled stochastic sorter");
  st_cmd->add_option("--instance", st.instance, "Instance JSON file")->required();
  st_cmd->add_option("--seed", st.seed, "Partition seed");
  st_cmd->add_option("--c", st.c, "Promotion look-ahead")->check(CLI::PositiveNumber);
  st_cmd->add_option("--q", st.q, "Level count")->check(CLI::Range(1, kMaxLevels));
  st_cmd->add_option("--rebuild-interval", st.rebuild_interval, "Rebuild unit in discoveries")->check(CLI::PositiveNumber);
  st_cmd->add_option("--trace", st.trace, "Write level events as JSON lines");
  st_cmd->add_option("--emit-trace", st.emit_trace, "Write the query trace for the audit command");

  SparseOptions sp;
  auto* sp_cmd = app.add_subcommand("sort-sparse", "Sort an instance with the average-rank sparse sorter");
  sp_cmd->add_option("--instance", sp.instance, "Instance JSON file")->required();
  sp_cmd->add_option("--seed", sp.seed, "Sampling seed");
  sp_cmd->add_option("--backend", sp.backend, "Prediction sorter")->check(CLI::IsMember({"fallback", "none"}));
  sp_cmd->add_option("--a", sp.a, "Edges sampled per round")->check(CLI::PositiveNumber);
  sp_cmd->add_option("--w", sp.w, "Error budget passed to the backend")->check(CLI::PositiveNumber);
  sp_cmd->add_option("--samples", sp.samples, "MCMC samples per rank estimate")->check(CLI::PositiveNumber);
  sp_cmd->add_option("--exact-cap", sp.exact_cap, "Largest n for exact ranks")->check(CLI::Range(std::size_t{1}, kMaxExactVertices));
  sp_cmd->add_option("--rounds", sp.rounds, "Write per-round stats as JSON lines");
  sp_cmd->add_option("--emit-trace", sp.emit_trace, "Write the query trace for the audit command");

  ExperimentOptions ex;
  auto* ex_cmd = app.add_subcommand("experiment", "Run a config-driven experiment grid");
  ex_cmd->add_option("--config", ex.config, "Experiment config JSON")->required();
  ex_cmd->add_option("--out", ex.out, "Output path (overrides the config)");
  ex_cmd->add_option("--format", ex.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  ex_cmd->add_option("--workers", ex.workers, "Worker threads (overrides GSORT_WORKERS)")->check(CLI::PositiveNumber);
  ex_cmd->add_flag("--no-timing", ex.no_timing, "Write wall_ms as 0 for byte-identical reruns");

  AuditOptions au;
  auto* au_cmd = app.add_subcommand("audit", "Replay a query trace against the consistent-permutation count");
  au_cmd->add_option("--instance", au.instance, "Instance JSON file")->required();
  au_cmd->add_option("--trace", au.trace, "Query trace JSON file")->required();
  au_cmd->add_option("--cap", au.cap, "Largest n for exact counting")->check(CLI::Range(std::size_t{1}, kMaxExactVertices));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen, out);
    if (st_cmd->parsed()) return run_stochastic(st, out);
    if (sp_cmd->parsed()) return run_sparse(sp, out);
    if (ex_cmd->parsed()) return run_experiment_cmd(ex, out);
    if (au_cmd->parsed()) return run_audit(au, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace gsort::cli
