#include "hdx/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "hdx/errors.hpp"

namespace hdx {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using SparseMat = Eigen::SparseMatrix<double>;

// Largest eigenvalue of a PSD operator on the orthogonal complement of `top`.
template <typename Op>
double deflated_power(Op apply, const Eigen::VectorXd& top, uint64_t seed) {
  const Eigen::Index n = top.size();
  if (n <= 1) return 0.0;
  Rng rng = make_rng(seed, 0x5eed);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = uniform01(rng) - 0.5;
  x -= x.dot(top) * top;
  if (x.norm() == 0) return 0.0;
  x.normalize();
  double theta = 0;
  for (int it = 0; it < kPowerMaxIterations; ++it) {
    Eigen::VectorXd y = apply(x);
    y -= y.dot(top) * top;
    theta = x.dot(y);
    double residual = (y - theta * x).norm();
    double ny = y.norm();
    if (ny == 0) return 0.0;
    if (residual <= kPowerTolerance) break;
    x = y / ny;
  }
  return std::max(theta, 0.0);
}

double top_two_dense(const Eigen::MatrixXd& m, double* sigma1) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (sigma1) *sigma1 = s.size() ? s(0) : 0.0;
  return s.size() >= 2 ? s(1) : 0.0;
}

struct BipartiteData {
  SparseMat normalized;  // rows part a, cols part b
  Eigen::VectorXd sqrt_col;
  Eigen::VectorXd sqrt_row;
};

BipartiteData normalize(const Triplets& raw, int na, int nb) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(na), col = Eigen::VectorXd::Zero(nb);
  double total = 0;
  for (const auto& t : raw) {
    row(t.row()) += t.value();
    col(t.col()) += t.value();
    total += t.value();
  }
  if (total <= 0) throw std::invalid_argument("bipartite operator has no weight");
  row /= total;
  col /= total;
  Triplets norm;
  norm.reserve(raw.size());
  for (const auto& t : raw)
    norm.emplace_back(t.row(), t.col(), t.value() / total / std::sqrt(row(t.row()) * col(t.col())));
  BipartiteData d;
  d.normalized.resize(na, nb);
  d.normalized.setFromTriplets(norm.begin(), norm.end());
  d.sqrt_col = col.cwiseSqrt();
  d.sqrt_row = row.cwiseSqrt();
  return d;
}

SpectralReport bipartite_from_triplets(const Triplets& raw, int na, int nb, SpectralMethod method) {
  BipartiteData d = normalize(raw, na, nb);
  SpectralReport r;
  bool dense = method == SpectralMethod::Dense || (method == SpectralMethod::Auto && std::max(na, nb) <= kDenseCutoff);
  if (dense) {
    r.sigma2 = top_two_dense(Eigen::MatrixXd(d.normalized), &r.sigma1);
    r.method = "dense";
    r.tolerance = 1e-12;
  } else {
    const SparseMat& m = d.normalized;
    SparseMat mt = m.transpose();
    double top = (m * d.sqrt_col).norm();
    double lam = deflated_power([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return mt * (m * x); },
                                d.sqrt_col.normalized(), static_cast<uint64_t>(na) * 7919 + nb);
    r.sigma1 = top;
    r.sigma2 = std::sqrt(lam);
    r.method = "power-iteration";
    r.tolerance = kPowerTolerance;
  }
  r.gap = r.sigma1 - r.sigma2;
  return r;
}

// Normalized adjacency over all vertices with positive measure.
struct WholeGraph {
  SparseMat normalized;
  Eigen::VectorXd sqrt_measure;
};

WholeGraph whole_graph(const WeightedGraph& g) {
  const int n = g.num_vertices();
  Triplets t;
  for (const auto& e : g.edges()) {
    if (e.w <= 0) continue;
    double s = e.w / 2 / std::sqrt(g.measure(e.u) * g.measure(e.v));
    t.emplace_back(e.u, e.v, s);
    t.emplace_back(e.v, e.u, s);
  }
  WholeGraph w;
  w.normalized.resize(n, n);
  w.normalized.setFromTriplets(t.begin(), t.end());
  w.sqrt_measure = Eigen::Map<const Eigen::VectorXd>(g.measures().data(), n).cwiseSqrt();
  return w;
}

bool dense_ok(SpectralMethod method, int n) {
  return method == SpectralMethod::Dense || (method == SpectralMethod::Auto && n <= kDenseCutoff);
}

void require_no_isolated(const WeightedGraph& g) {
  for (int v = 0; v < g.num_vertices(); ++v)
    if (g.measure(v) <= 0) throw std::invalid_argument("graph has a vertex without incident weight");
}

}  // namespace

Eigen::MatrixXd normalized_bipartite_operator(const WeightedGraph& g, int part_a, int part_b, std::vector<int>* rows,
                                              std::vector<int>* cols) {
  std::unordered_map<int, int> ra, cb;
  std::vector<int> rv, cv;
  Triplets raw;
  for (const auto& e : g.edges()) {
    int u = e.u, v = e.v;
    if (g.part_of(u) == part_b && g.part_of(v) == part_a) std::swap(u, v);
    if (g.part_of(u) != part_a || g.part_of(v) != part_b) continue;
    auto [iu, nu] = ra.emplace(u, static_cast<int>(rv.size()));
    if (nu) rv.push_back(u);
    auto [iv, nv] = cb.emplace(v, static_cast<int>(cv.size()));
    if (nv) cv.push_back(v);
    raw.emplace_back(iu->second, iv->second, e.w);
  }
  if (raw.empty()) throw std::invalid_argument("no edges between the requested parts");
  if (rows) *rows = rv;
  if (cols) *cols = cv;
  return Eigen::MatrixXd(normalize(raw, static_cast<int>(rv.size()), static_cast<int>(cv.size())).normalized);
}

SpectralReport bipartite_spectrum(const WeightedGraph& g, int part_a, int part_b, SpectralMethod method) {
  if (part_a == part_b) throw std::invalid_argument("bipartite_spectrum: parts must differ");
  std::unordered_map<int, int> ra, cb;
  Triplets raw;
  for (const auto& e : g.edges()) {
    int u = e.u, v = e.v;
    if (g.part_of(u) == part_b && g.part_of(v) == part_a) std::swap(u, v);
    if (g.part_of(u) != part_a || g.part_of(v) != part_b) continue;
    int iu = ra.emplace(u, static_cast<int>(ra.size())).first->second;
    int iv = cb.emplace(v, static_cast<int>(cb.size())).first->second;
    raw.emplace_back(iu, iv, e.w);
  }
  if (raw.empty()) throw std::invalid_argument("bipartite_spectrum: no edges between the parts");
  SpectralReport r = bipartite_from_triplets(raw, static_cast<int>(ra.size()), static_cast<int>(cb.size()), method);
  r.op = "A(" + std::to_string(part_a) + "," + std::to_string(part_b) + ")";
  return r;
}

double second_singular_value(const WeightedGraph& g, int part_a, int part_b, SpectralMethod method) {
  return bipartite_spectrum(g, part_a, part_b, method).sigma2;
}

double tripartite_second_singular(const WeightedGraph& g, SpectralMethod method) {
  require_no_isolated(g);
  WholeGraph w = whole_graph(g);
  const int n = g.num_vertices();
  if (n <= 1) return 0.0;
  if (dense_ok(method, n)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(w.normalized), Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<double>());
    return ev(1);
  }
  const SparseMat& m = w.normalized;
  double lam = deflated_power([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return m * (m * x); },
                              w.sqrt_measure.normalized(), static_cast<uint64_t>(n));
  return std::sqrt(lam);
}

double walk_second_eigenvalue(const WeightedGraph& g, SpectralMethod method) {
  require_no_isolated(g);
  WholeGraph w = whole_graph(g);
  const int n = g.num_vertices();
  if (n <= 1) return 0.0;
  if (dense_ok(method, n)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(w.normalized), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(n - 2);
  }
  const SparseMat& m = w.normalized;
  double theta = deflated_power([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 0.5 * (x + m * x); },
                                w.sqrt_measure.normalized(), static_cast<uint64_t>(n) + 17);
  return 2 * theta - 1;
}

AuditResult epsilon_product_audit(const PartiteDistribution& mu, double budget) {
  if (!mu.is_explicit()) throw std::invalid_argument("epsilon_product_audit: requires explicit backing");
  const int n = mu.arity();
  AuditResult best;
  if (n < 2) return best;
  double work = 0;
  for (uint32_t mask = 0; mask < (1u << n); ++mask)
    if (std::popcount(mask) <= n - 2) work += static_cast<double>(mu.size()) * (n - std::popcount(mask));
  if (work > budget) throw BudgetExceeded("epsilon_product_audit: " + std::to_string(work) + " row visits over budget");

  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > n - 2) continue;
    std::vector<int> spos, free;
    for (int i = 0; i < n; ++i) (mask >> i & 1u ? spos : free).push_back(i);
    std::map<Tuple, std::vector<size_t>> groups;
    for (size_t r = 0; r < mu.size(); ++r) {
      Tuple key;
      for (int p : spos) key.push_back(mu.tuple(r)[p]);
      groups[key].push_back(r);
    }
    for (const auto& [key, rows] : groups) {
      ++best.conditionals;
      for (size_t a = 0; a < free.size(); ++a)
        for (size_t b = a + 1; b < free.size(); ++b) {
          std::unordered_map<Value, int> ia, ib;
          std::map<std::pair<int, int>, double> cells;
          for (size_t r : rows) {
            int x = ia.emplace(mu.tuple(r)[free[a]], static_cast<int>(ia.size())).first->second;
            int y = ib.emplace(mu.tuple(r)[free[b]], static_cast<int>(ib.size())).first->second;
            cells[{x, y}] += mu.weight(r);
          }
          if (ia.size() < 2 || ib.size() < 2) continue;
          Triplets raw;
          for (const auto& [xy, w] : cells) raw.emplace_back(xy.first, xy.second, w);
          double s2 = bipartite_from_triplets(raw, static_cast<int>(ia.size()), static_cast<int>(ib.size()),
                                              SpectralMethod::Auto)
                          .sigma2;
          if (s2 > best.epsilon) {
            best.epsilon = s2;
            best.condition_labels.clear();
            for (int p : spos) best.condition_labels.push_back(mu.labels()[p]);
            best.condition_value = key;
            best.label_i = mu.labels()[free[a]];
            best.label_j = mu.labels()[free[b]];
          }
        }
    }
  }
  return best;
}

double mixing_check(const WeightedGraph& g, const std::vector<int>& a, const std::vector<int>& b, double lambda) {
  std::vector<char> in_a(g.num_vertices(), 0), in_b(g.num_vertices(), 0);
  for (int v : a) in_a[v] = 1;
  for (int v : b) in_b[v] = 1;
  double total = 0, joint = 0, ma = 0, mb = 0;
  for (const auto& e : g.edges()) {
    int u = e.u, v = e.v;
    if (g.part_of(u) == 1 && g.part_of(v) == 0) std::swap(u, v);
    if (g.part_of(u) != 0 || g.part_of(v) != 1) continue;
    total += e.w;
    if (in_a[u]) ma += e.w;
    if (in_b[v]) mb += e.w;
    if (in_a[u] && in_b[v]) joint += e.w;
  }
  if (total <= 0) throw std::invalid_argument("mixing_check: no edges between parts 0 and 1");
  joint /= total;
  ma /= total;
  mb /= total;
  double lhs = joint - ma * mb;
  double rhs = lambda * std::sqrt(std::max(0.0, ma * (1 - ma) * mb * (1 - mb)));
  return rhs - std::abs(lhs);
}

SamplingResult sampling_check(const WeightedGraph& g, const std::vector<int>& b, double eps, double lambda) {
  if (eps <= 0) throw std::invalid_argument("sampling_check: eps must be positive");
  std::vector<char> in_b(g.num_vertices(), 0);
  for (int v : b) in_b[v] = 1;
  std::vector<double> deg(g.num_vertices(), 0.0), hit(g.num_vertices(), 0.0);
  double total = 0, mass_b = 0;
  for (const auto& e : g.edges()) {
    int u = e.u, v = e.v;
    if (g.part_of(u) == 1 && g.part_of(v) == 0) std::swap(u, v);
    if (g.part_of(u) != 0 || g.part_of(v) != 1) continue;
    total += e.w;
    deg[v] += e.w;
    if (in_b[u]) {
      hit[v] += e.w;
      mass_b += e.w;
    }
  }
  if (total <= 0) throw std::invalid_argument("sampling_check: no edges between parts 0 and 1");
  double pb = mass_b / total;
  SamplingResult r;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (deg[v] > 0 && hit[v] / deg[v] > eps + pb) r.measured += deg[v] / total;
  r.bound = lambda * lambda * pb / (eps * eps);
  return r;
}

double trickling_down_formula(double lambda, int d) {
  double den = 1 - (d - 1) * lambda;
  if (den <= 0) return std::numeric_limits<double>::infinity();
  return lambda / den;
}

namespace {

bool connected(const WeightedGraph& g) {
  if (g.num_vertices() == 0) return true;
  std::vector<char> seen(g.num_vertices(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (auto [v, e] : g.neighbors(u))
      if (!seen[v] && g.edges()[e].w > 0) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  return count == g.num_vertices();
}

}  // namespace

TricklingReport trickling_down_bound(const SimplicialComplex& x) {
  const int d = x.dim();
  if (d < 2) throw std::invalid_argument("trickling_down_bound: needs faces of size >= 2");
  TricklingReport r;
  Level lv = level(x, d - 2);
  for (const auto& f : lv.faces) {
    WeightedGraph skel = one_skeleton(link(x, f));
    if (!connected(skel)) throw std::invalid_argument("trickling_down_bound: disconnected link");
    r.link_lambda = std::max(r.link_lambda, walk_second_eigenvalue(skel));
  }
  r.bound = trickling_down_formula(r.link_lambda, d);
  r.measured_gamma = local_spectral_audit(x);
  return r;
}

double local_spectral_audit(const SimplicialComplex& x, double budget) {
  const int d = x.dim();
  if (d < 2) throw std::invalid_argument("local_spectral_audit: needs faces of size >= 2");
  double gamma = -std::numeric_limits<double>::infinity();
  double visited = 0;
  for (int i = 0; i <= d - 2; ++i) {
    Level lv = level(x, i);
    visited += static_cast<double>(lv.faces.size()) * static_cast<double>(x.num_top());
    if (visited > budget * 100) throw BudgetExceeded("local_spectral_audit: too many links");
    for (const auto& f : lv.faces) gamma = std::max(gamma, walk_second_eigenvalue(one_skeleton(link(x, f))));
  }
  return gamma;
}

double restriction_blowup_rhs(int k, int d, double mean_f, double eta) {
  double l = std::log(1 / eta);
  double ll = std::log(l);
  if (ll <= 0) return std::numeric_limits<double>::infinity();
  return (static_cast<double>(k) / d) * (mean_f / eta) * l / ll;
}

BlowupReport restriction_blowup_estimate(const PartiteDistribution& mu, const std::vector<bool>& f, int k, double eta,
                                         int samples, Rng& rng) {
  if (!mu.is_explicit()) throw std::invalid_argument("restriction_blowup_estimate: requires explicit backing");
  if (f.size() != mu.size()) throw std::invalid_argument("restriction_blowup_estimate: f must cover every row");
  const int n = mu.arity();
  if (k < 0 || k > n) throw std::invalid_argument("restriction_blowup_estimate: bad k");
  if (samples <= 0) throw std::invalid_argument("restriction_blowup_estimate: samples must be positive");
  BlowupReport r;
  for (size_t i = 0; i < mu.size(); ++i)
    if (f[i]) r.mean_f += mu.weight(i);
  if (r.mean_f > eta / 100 + 1e-15) throw std::invalid_argument("restriction_blowup_estimate: needs E[f] <= eta/100");
  r.rhs = restriction_blowup_rhs(k, n, r.mean_f, eta);
  r.samples = samples;
  if (r.mean_f == 0) return r;

  std::vector<double> cum(mu.size());
  double acc = 0;
  for (size_t i = 0; i < mu.size(); ++i) cum[i] = acc += mu.weight(i);
  // Per subset mask: projected value -> (mass, mass where f holds).
  std::unordered_map<uint32_t, std::unordered_map<Tuple, std::pair<double, double>, TupleHash>> cache;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  int hits = 0;
  for (int s = 0; s < samples; ++s) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> pos(order.begin(), order.begin() + k);
    std::sort(pos.begin(), pos.end());
    uint32_t mask = 0;
    for (int p : pos) mask |= 1u << p;
    auto project = [&](size_t row) {
      Tuple t;
      for (int p : pos) t.push_back(mu.tuple(row)[p]);
      return t;
    };
    auto it = cache.find(mask);
    if (it == cache.end()) {
      std::unordered_map<Tuple, std::pair<double, double>, TupleHash> table;
      for (size_t i = 0; i < mu.size(); ++i) {
        auto& cell = table[project(i)];
        cell.first += mu.weight(i);
        if (f[i]) cell.second += mu.weight(i);
      }
      it = cache.emplace(mask, std::move(table)).first;
    }
    double u = uniform01(rng) * acc;
    size_t row = std::min(static_cast<size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin()), mu.size() - 1);
    const auto& cell = it->second.at(project(row));
    if (cell.second / cell.first >= eta) ++hits;
  }
  r.estimate = static_cast<double>(hits) / samples;
  return r;
}

}  // namespace hdx
