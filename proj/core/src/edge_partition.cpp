#include "gsort/edge_partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gsort/errors.hpp"
#include "json.hpp"

namespace gsort {
namespace {

// g(alpha) - (1 - p) is strictly decreasing, nonnegative at 1 and
// nonpositive at 2.
double bisect_alpha(double p, int q, double tol) {
  const double target = 1.0 - p;
  auto residual = [&](double a) { return alpha_product(a, p, q) - target; };
  double lo = 1.0;
  double hi = 2.0;
  if (residual(lo) <= 0.0) return lo;
  if (residual(hi) >= 0.0) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if (r == 0.0) return mid;
    (r > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() && std::abs(r) < tol) break;
  }
  const double mid = 0.5 * (lo + hi);
  return std::abs(residual(lo)) < std::abs(residual(mid)) ? lo : mid;
}

void check_levels(int q) {
  if (q < 1 || q > kMaxLevels) throw std::invalid_argument("level count q must lie in [1, 64]");
}

}  // namespace

double alpha_product(double alpha, double p, int q) {
  double prod = 1.0;
  double scale = 0.5;
  for (int i = 1; i <= q; ++i, scale *= 0.5) prod *= 1.0 - alpha * p * scale;
  return prod;
}

double solve_alpha(double p, int q, double tol) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("solve_alpha: p must lie in [0, 1]");
  if (p == 0.0 || p == 1.0) throw DegenerateParameter("solve_alpha: p in {0, 1} has no informative root");
  if (q < 1) throw std::invalid_argument("solve_alpha: q must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_alpha: tol must be positive");
  return bisect_alpha(p, q, tol);
}

int default_level_count(std::size_t n, double p) {
  const double np = std::max(2.0, static_cast<double>(n) * p);
  return std::max(1, static_cast<int>(std::ceil(std::log2(np) - 1e-12)));
}

std::vector<double> level_marginals(double alpha, double p, int q) {
  std::vector<double> m(static_cast<std::size_t>(q));
  double scale = 0.5;
  for (int i = 0; i < q; ++i, scale *= 0.5) m[static_cast<std::size_t>(i)] = alpha * p * scale;
  return m;
}

LevelTuple sample_nonzero_tuple(Rng& rng, const std::vector<double>& marginals) {
  const std::size_t q = marginals.size();
  // Pr[first set bit = i] is proportional to prod_{j<i}(1 - m_j) * m_i.
  double none_before = 1.0;
  double total = 0.0;
  for (double m : marginals) {
    total += none_before * m;
    none_before *= 1.0 - m;
  }
  const double u = rng.unit() * total;
  std::size_t first = q - 1;
  none_before = 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    acc += none_before * marginals[i];
    if (u < acc) {
      first = i;
      break;
    }
    none_before *= 1.0 - marginals[i];
  }
  LevelTuple tuple = LevelTuple{1} << first;
  for (std::size_t j = first + 1; j < q; ++j)
    if (rng.bernoulli(marginals[j])) tuple |= LevelTuple{1} << j;
  return tuple;
}

EdgePartition EdgePartition::build(const SortingInstance& instance, int q, std::uint64_t seed) {
  check_levels(q);
  EdgePartition part;
  part.instance_ = &instance;
  part.q_ = q;
  const double n = static_cast<double>(instance.n());
  part.effective_p_ = instance.p() > 0.0 ? instance.p() : 1.0 / (n * n);
  part.alpha_ = bisect_alpha(part.effective_p_, q, 1e-12);

  const std::vector<double> marginals = level_marginals(part.alpha_, part.effective_p_, q);
  Rng rng(derive_seed(seed, Stream::kPartition));
  part.tuples_.resize(instance.edge_count());
  for (LevelTuple& t : part.tuples_) t = sample_nonzero_tuple(rng, marginals);
  return part;
}

bool EdgePartition::contains(int level, Vertex u, Vertex v) const {
  if (level < 1 || level > q_) throw std::invalid_argument("membership: level out of range");
  return (tuple(u, v) >> (level - 1)) & 1U;
}

LevelTuple EdgePartition::tuple(Vertex u, Vertex v) const {
  instance_->check_vertex(u);
  instance_->check_vertex(v);
  const auto idx = instance_->edge_index(u, v);
  return idx ? tuples_[*idx] : LevelTuple{0};
}

std::string EdgePartition::to_json() const {
  nlohmann::ordered_json j;
  j["q"] = q_;
  j["alpha"] = alpha_;
  auto tuples = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < tuples_.size(); ++k) {
    const Edge& e = instance_->edges()[k];
    tuples.push_back({e.u, e.v, tuples_[k]});
  }
  j["tuples"] = std::move(tuples);
  return j.dump();
}

}  // namespace gsort
