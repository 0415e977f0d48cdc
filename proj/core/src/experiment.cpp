#include "gsort/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "gsort/errors.hpp"
#include "gsort/rng.hpp"
#include "json.hpp"

namespace gsort {
namespace {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, double n) : text_(text), n_(n) {}

  double parse() {
    const double v = expression();
    skip_space();
    if (pos_ != text_.size()) error("unexpected trailing input");
    return v;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    throw std::invalid_argument("p expression '" + std::string(text_) + "': " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  double expression() {
    double v = term();
    for (;;) {
      if (accept("+")) {
        v += term();
      } else if (accept("-")) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  bool starts_operand() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    const char ch = text_[pos_];
    return ch == '(' || std::isalpha(static_cast<unsigned char>(ch));
  }

  double term() {
    double v = unary();
    for (;;) {
      if (accept("*") || accept("\xC2\xB7")) {
        v *= unary();
      } else if (accept("/")) {
        v /= unary();
      } else if (starts_operand()) {
        v *= unary();  // implicit product, e.g. 8ln(n)
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept("-")) return -unary();
    if (accept("+")) return unary();
    const double base = primary();
    if (accept("^")) return std::pow(base, unary());
    return base;
  }

  double primary() {
    skip_space();
    if (pos_ >= text_.size()) error("unexpected end of input");
    const char ch = text_[pos_];
    if (accept("(")) {
      const double v = expression();
      if (!accept(")")) error("missing ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(std::string(text_.substr(pos_)), &used);
      } catch (const std::exception&) {
        error("bad number");
      }
      pos_ += used;
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) ++end;
      const std::string name(text_.substr(pos_, end - pos_));
      pos_ = end;
      if (name == "n") return n_;
      if (name == "e") return std::numbers::e;
      if (!accept("(")) error("expected '(' after " + name);
      const double arg = expression();
      if (!accept(")")) error("missing ')'");
      if (name == "ln" || name == "log") return std::log(arg);
      if (name == "log2") return std::log2(arg);
      if (name == "sqrt") return std::sqrt(arg);
      if (name == "exp") return std::exp(arg);
      error("unknown function " + name);
    }
    error(std::string("unexpected character '") + ch + "'");
  }

  std::string_view text_;
  double n_;
  std::size_t pos_ = 0;
};

std::string format_double(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::kStochastic ? "stochastic" : "sparse";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "stochastic") return Algorithm::kStochastic;
  if (name == "sparse") return Algorithm::kSparse;
  throw std::invalid_argument("unknown algorithm: " + std::string(name));
}

double evaluate_p_expression(std::string_view expr, std::size_t n) {
  return ExpressionParser(expr, static_cast<double>(n)).parse();
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be at least 1");
  if (n_values.empty()) throw std::invalid_argument("config: n_values is empty");
  if (p_values.empty()) throw std::invalid_argument("config: p_values is empty");
  for (std::size_t n : n_values)
    if (n < 2) throw std::invalid_argument("config: every n must be at least 2");
  if (format != "csv" && format != "json") throw std::invalid_argument("config: format must be csv or json");
  make_prediction_sorter(backend);
  for (std::size_t n : n_values)
    for (const std::string& p : p_values) {
      const double v = evaluate_p_expression(p, n);
      if (!(v >= 0.0)) throw std::invalid_argument("config: p evaluates below 0 for '" + p + "'");
    }
}

ExperimentConfig config_from_json(std::string_view text) {
  ExperimentConfig cfg;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("algorithm")) cfg.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    cfg.n_values = j.at("n_values").get<std::vector<std::size_t>>();
    for (const auto& p : j.at("p_values")) {
      if (p.is_number()) {
        cfg.p_values.push_back(format_double("%.17g", p.get<double>()));
      } else {
        cfg.p_values.push_back(p.get<std::string>());
      }
    }
    cfg.trials = j.value("trials", std::size_t{1});
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("params")) {
      const auto& pj = j.at("params");
      auto opt = [&](const char* key) { return pj.contains(key) && !pj.at(key).is_null(); };
      if (opt("c")) cfg.stochastic.c = pj.at("c").get<int>();
      if (opt("q")) cfg.stochastic.q = pj.at("q").get<int>();
      if (opt("rebuild_interval")) cfg.stochastic.rebuild_interval = pj.at("rebuild_interval").get<double>();
      if (opt("a")) cfg.sparse.a = pj.at("a").get<std::size_t>();
      if (opt("a_multiplier")) cfg.sparse.a_multiplier = pj.at("a_multiplier").get<double>();
      if (opt("w")) cfg.sparse.w = pj.at("w").get<std::size_t>();
      if (opt("samples")) cfg.sparse.samples = pj.at("samples").get<std::size_t>();
      if (opt("exact_cap")) cfg.sparse.exact_cap = pj.at("exact_cap").get<std::size_t>();
      if (opt("burn_in")) cfg.sparse.mcmc.burn_in = pj.at("burn_in").get<std::size_t>();
      if (opt("thinning")) cfg.sparse.mcmc.thinning = pj.at("thinning").get<std::size_t>();
    }
    cfg.backend = j.value("backend", std::string("fallback"));
    if (j.contains("output")) {
      const auto& oj = j.at("output");
      cfg.output_path = oj.value("path", std::string());
      cfg.format = oj.value("format", std::string("csv"));
    }
    cfg.record_timing = j.value("record_timing", true);
    if (j.contains("workers")) cfg.workers = j.at("workers").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config json: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

double normalized_queries(std::size_t queries, std::size_t n, double p) {
  const double scale = static_cast<double>(n) * std::log2(std::max(2.0, static_cast<double>(n) * p));
  return static_cast<double>(queries) / scale;
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t p_index, std::size_t trial) {
  return derive_seed(base, {static_cast<std::uint64_t>(Stream::kTrial), n, p_index, trial});
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t n, double p, std::uint64_t seed) {
  TrialRecord rec;
  rec.n = n;
  rec.p = p;
  rec.seed = seed;
  rec.algorithm = config.algorithm;
  const SortingInstance instance = SortingInstance::generate(n, p, seed);
  CountingOracle oracle(instance);
  const auto start = std::chrono::steady_clock::now();
  std::vector<Vertex> order;
  if (config.algorithm == Algorithm::kStochastic) {
    order = stochastic_sort(oracle, config.stochastic, seed).order;
  } else {
    const auto backend = make_prediction_sorter(config.backend);
    order = sparse_generalized_sort(oracle, config.sparse, backend.get(), seed).order;
  }
  const auto stop = std::chrono::steady_clock::now();
  rec.queries = oracle.query_count();
  rec.correct = order == instance.hidden_order();
  rec.wall_ms = config.record_timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
  rec.normalized = normalized_queries(rec.queries, n, p);
  return rec;
}

std::size_t resolve_workers(const std::optional<std::size_t>& requested) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("GSORT_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  struct Cell {
    std::size_t n;
    double p;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t n : config.n_values)
    for (std::size_t pi = 0; pi < config.p_values.size(); ++pi) {
      const double p = std::clamp(evaluate_p_expression(config.p_values[pi], n), 0.0, 1.0);
      for (std::size_t t = 0; t < config.trials; ++t) cells.push_back({n, p, trial_seed(config.seed, n, pi, t)});
    }

  std::vector<TrialRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        records[i] = run_trial(config, cells[i].n, cells[i].p, cells[i].seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cells.size();
        return;
      }
    }
  };
  const std::size_t workers = std::min(resolve_workers(config.workers), std::max<std::size_t>(1, cells.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (const TrialRecord& r : records) {
    if (!r.correct) {
      throw InvariantViolation("trial n=" + std::to_string(r.n) + " seed=" + std::to_string(r.seed) +
                               " returned a wrong order");
    }
  }
  return records;
}

std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const TrialRecord& r : records) {
    out += std::to_string(r.n);
    out += ',' + format_double("%.10g", r.p);
    out += ',' + std::to_string(r.seed);
    out += ',';
    out += to_string(r.algorithm);
    out += ',' + std::to_string(r.queries);
    out += r.correct ? ",true" : ",false";
    out += ',' + format_double("%.3f", r.wall_ms);
    out += ',' + format_double("%.6f", r.normalized);
    out += '\n';
  }
  return out;
}

std::string records_to_json(const std::vector<TrialRecord>& records) {
  auto arr = nlohmann::ordered_json::array();
  for (const TrialRecord& r : records) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["p"] = r.p;
    j["seed"] = r.seed;
    j["algorithm"] = to_string(r.algorithm);
    j["queries"] = r.queries;
    j["correct"] = r.correct;
    j["wall_ms"] = r.wall_ms;
    j["normalized"] = r.normalized;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<TrialRecord> run_and_write(const ExperimentConfig& config) {
  config.validate();
  if (config.output_path.empty()) throw std::invalid_argument("config: no output path");
  std::ofstream out(config.output_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file " + config.output_path);
  std::vector<TrialRecord> records = run_experiment(config);
  out << (config.format == "json" ? records_to_json(records) : records_to_csv(records));
  if (!out.flush()) throw std::runtime_error("failed writing " + config.output_path);
  return records;
}

}  // namespace gsort
