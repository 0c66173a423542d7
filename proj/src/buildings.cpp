#include "hdx/buildings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hdx/errors.hpp"

namespace hdx {

namespace {

// Calls f on every vector of length `len` over GF(p).
template <typename F>
void for_each_vector(int len, int p, F&& f) {
  std::vector<int> v(len, 0);
  while (true) {
    f(v);
    int i = len - 1;
    while (i >= 0 && v[i] == p - 1) v[i--] = 0;
    if (i < 0) return;
    ++v[i];
  }
}

// Rows of `coeffs` taken as coordinates in the basis of `within`.
Subspace embed(const Subspace& within, const Subspace& coeffs) {
  if (coeffs.dim() == 0) return Subspace::zero(within.ambient(), within.modulus());
  return Subspace::span(coeffs.basis() * within.basis());
}

void check_field(int p) {
  if (!is_prime(p) || p >= 256) throw std::invalid_argument("field size must be a prime below 256");
}

}  // namespace

std::vector<Subspace> enumerate_subspaces(int n, int p, int k, double budget) {
  check_field(p);
  if (k < 0 || k > n) throw std::invalid_argument("enumerate_subspaces: need 0 <= k <= n");
  double count = gaussian_binomial(n, k, p);
  if (count > budget) throw BudgetExceeded("enumerate_subspaces: " + std::to_string(count) + " subspaces over budget");
  std::vector<Subspace> out;
  out.reserve(static_cast<size_t>(count));
  for (const auto& pivots : combinations(n, k)) {
    // Free entries: row r, column c > pivot r, c not a pivot.
    std::vector<std::pair<int, int>> free;
    for (int r = 0; r < k; ++r)
      for (int c = pivots[r] + 1; c < n; ++c)
        if (!std::binary_search(pivots.begin(), pivots.end(), c)) free.emplace_back(r, c);
    for_each_vector(static_cast<int>(free.size()), p, [&](const std::vector<int>& vals) {
      Matrix m(k, n, p);
      for (int r = 0; r < k; ++r) m.set(r, pivots[r], 1);
      for (size_t i = 0; i < free.size(); ++i) m.set(free[i].first, free[i].second, vals[i]);
      out.push_back(Subspace::span(m));
    });
  }
  return out;
}

std::vector<Subspace> superspaces(const Subspace& v, bool isotropic) {
  const int n = v.ambient(), p = v.modulus();
  std::vector<int> pivot_free;
  {
    std::vector<bool> is_pivot(n, false);
    for (int r = 0; r < v.dim(); ++r)
      for (int c = 0; c < n; ++c)
        if (v.basis()(r, c) != 0) {
          is_pivot[c] = true;
          break;
        }
    for (int c = 0; c < n; ++c)
      if (!is_pivot[c]) pivot_free.push_back(c);
  }
  const Subspace symp = isotropic ? symplectic_complement(v) : Subspace();
  std::vector<Subspace> out;
  // Each superspace is v + span(w) for a unique normalized w supported off the pivots.
  const int m = static_cast<int>(pivot_free.size());
  for (int lead = 0; lead < m; ++lead) {
    for_each_vector(m - lead - 1, p, [&](const std::vector<int>& tail) {
      std::vector<int> w(n, 0);
      w[pivot_free[lead]] = 1;
      for (int i = 0; i < m - lead - 1; ++i) w[pivot_free[lead + 1 + i]] = tail[i];
      if (isotropic && !symp.contains_vector(w)) return;
      Matrix gen = Matrix::vstack(v.basis(), Matrix::from_rows({w}, n, p));
      out.push_back(Subspace::span(gen));
    });
  }
  return out;
}

std::vector<Subspace> enumerate_isotropic(int two_d, int p, int k, double budget) {
  check_field(p);
  if (two_d % 2 != 0) throw std::invalid_argument("enumerate_isotropic: ambient dimension must be even");
  if (k < 0 || k > two_d / 2) throw std::invalid_argument("enumerate_isotropic: no isotropic subspace of that dim");
  if (gaussian_binomial(two_d, k, p) > budget) throw BudgetExceeded("enumerate_isotropic: over budget");
  std::vector<Subspace> out;
  for (auto& s : enumerate_subspaces(two_d, p, k, budget))
    if (is_isotropic(s)) out.push_back(std::move(s));
  return out;
}

double flag_count_a(int d, int p) {
  double c = 1;
  for (int i = 1; i <= d + 1; ++i) c *= (std::pow(p, i) - 1) / (p - 1);
  return c;
}

double flag_count_c(int d, int p) {
  double c = 1;
  for (int i = 1; i <= d; ++i) c *= (std::pow(p, 2 * i) - 1) / (p - 1);
  return c;
}

namespace {

std::vector<int> labels_1_to(int d) {
  std::vector<int> l(d);
  for (int i = 0; i < d; ++i) l[i] = i + 1;
  return l;
}

void extend_flags(const Subspace& cur, int depth, int d, bool isotropic, std::vector<Value>& prefix,
                  VertexUniverse& uni, std::vector<Tuple>& out) {
  if (depth == d) {
    out.push_back(prefix);
    return;
  }
  for (const auto& w : superspaces(cur, isotropic)) {
    prefix.push_back(uni.intern(w));
    extend_flags(w, depth + 1, d, isotropic, prefix, uni, out);
    prefix.pop_back();
  }
}

bool use_sampler(const BuildOptions& opts, double count) {
  switch (opts.mode) {
    case BuildMode::Sampler:
      return true;
    case BuildMode::Explicit:
      if (count > opts.budget) throw BudgetExceeded("flag enumeration over budget: " + std::to_string(count));
      return false;
    default:
      return count > opts.budget;
  }
}

}  // namespace

PartiteDistribution sb_type_a(int d, int p, const BuildOptions& opts, std::shared_ptr<VertexUniverse> universe) {
  check_field(p);
  if (d < 1) throw std::invalid_argument("sb_type_a: d must be >= 1");
  if (!universe) universe = std::make_shared<VertexUniverse>();
  if (use_sampler(opts, flag_count_a(d, p))) {
    auto uni = universe;
    return PartiteDistribution::from_sampler(
        labels_1_to(d),
        [d, p, uni](Rng& rng) {
          Matrix cols = random_gl(d + 1, p, rng).transpose();
          Tuple t;
          for (int i = 1; i <= d; ++i) t.push_back(uni->intern(Subspace::span(cols.row_block(0, i))));
          return t;
        },
        universe);
  }
  std::vector<Tuple> tuples;
  std::vector<Value> prefix;
  extend_flags(Subspace::zero(d + 1, p), 0, d, false, prefix, *universe, tuples);
  return PartiteDistribution::uniform(labels_1_to(d), tuples, universe);
}

PartiteDistribution sb_type_c(int d, int p, const BuildOptions& opts, std::shared_ptr<VertexUniverse> universe) {
  check_field(p);
  if (d < 1) throw std::invalid_argument("sb_type_c: d must be >= 1");
  if (!universe) universe = std::make_shared<VertexUniverse>();
  if (use_sampler(opts, flag_count_c(d, p))) {
    auto uni = universe;
    int word_len = opts.word_len;
    return PartiteDistribution::from_sampler(
        labels_1_to(d),
        [d, p, uni, word_len](Rng& rng) {
          Matrix m = random_sp(d, p, rng, word_len);
          Tuple t;
          for (int i = 1; i <= d; ++i) {
            Matrix e(i, 2 * d, p);
            for (int r = 0; r < i; ++r) e.set(r, r, 1);
            t.push_back(uni->intern(apply(m, Subspace::span(e))));
          }
          return t;
        },
        universe);
  }
  std::vector<Tuple> tuples;
  std::vector<Value> prefix;
  extend_flags(Subspace::zero(2 * d, p), 0, d, true, prefix, *universe, tuples);
  return PartiteDistribution::uniform(labels_1_to(d), tuples, universe);
}

PartiteDistribution tensor(const PartiteDistribution& first, const PartiteDistribution& second, int offset) {
  if (!first.is_explicit() || !second.is_explicit()) throw std::invalid_argument("tensor: requires explicit backing");
  if (offset < 0) offset = *std::max_element(first.labels().begin(), first.labels().end());
  std::vector<int> labels = first.labels();
  for (int l : second.labels()) {
    int shifted = l + offset;
    if (std::find(labels.begin(), labels.end(), shifted) != labels.end())
      throw std::invalid_argument("tensor: label clash after offset");
    labels.push_back(shifted);
  }
  // Values of the second factor are re-interned when the universes differ.
  auto uni = first.universe() ? first.universe() : std::make_shared<VertexUniverse>();
  auto remap = [&](const PartiteDistribution& mu, Value v) -> Value {
    if (mu.universe() == uni) return v;
    if (!mu.universe()) return uni->intern_label("v" + std::to_string(v));
    if (const Subspace* s = mu.universe()->subspace(v)) return uni->intern(*s);
    return uni->intern_label(mu.universe()->label(v));
  };
  std::vector<Tuple> rows_a, rows_b;
  for (size_t i = 0; i < first.size(); ++i) {
    Tuple t;
    for (Value v : first.tuple(i)) t.push_back(remap(first, v));
    rows_a.push_back(std::move(t));
  }
  for (size_t i = 0; i < second.size(); ++i) {
    Tuple t;
    for (Value v : second.tuple(i)) t.push_back(remap(second, v));
    rows_b.push_back(std::move(t));
  }
  std::vector<Tuple> tuples;
  std::vector<double> weights;
  tuples.reserve(rows_a.size() * rows_b.size());
  for (size_t i = 0; i < rows_a.size(); ++i)
    for (size_t j = 0; j < rows_b.size(); ++j) {
      Tuple t = rows_a[i];
      t.insert(t.end(), rows_b[j].begin(), rows_b[j].end());
      tuples.push_back(std::move(t));
      weights.push_back(first.weight(i) * second.weight(j));
    }
  return PartiteDistribution::explicit_table(labels, tuples, weights, uni);
}

namespace {

void check_dims(const std::vector<int>& dims, int top) {
  if (dims.empty()) throw std::invalid_argument("chain dims must be nonempty");
  for (size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1 || dims[i] > top) throw std::invalid_argument("chain dim out of range");
    if (i && dims[i] <= dims[i - 1]) throw std::invalid_argument("chain dims must be increasing");
  }
}

// Chains below each top subspace, descending through `dims` (increasing).
PartiteDistribution chains_below(const std::vector<Subspace>& tops, int p, const std::vector<int>& dims, double budget,
                                 std::shared_ptr<VertexUniverse> universe) {
  if (!universe) universe = std::make_shared<VertexUniverse>();
  const size_t m = dims.size();
  // Coordinate subspaces of GF(p)^{dims[i+1]} of dim dims[i].
  std::vector<std::vector<Subspace>> local(m);
  double per_top = 1;
  for (size_t i = 0; i + 1 < m; ++i) {
    local[i] = enumerate_subspaces(dims[i + 1], p, dims[i], budget);
    per_top *= static_cast<double>(local[i].size());
  }
  if (per_top * static_cast<double>(tops.size()) > budget) throw BudgetExceeded("chain enumeration over budget");
  std::vector<Tuple> tuples;
  Tuple cur(m);
  std::function<void(const Subspace&, int)> descend = [&](const Subspace& s, int level) {
    cur[level] = universe->intern(s);
    if (level == 0) {
      tuples.push_back(cur);
      return;
    }
    for (const auto& c : local[level - 1]) descend(embed(s, c), level - 1);
  };
  for (const auto& t : tops) descend(t, static_cast<int>(m) - 1);
  return PartiteDistribution::uniform(dims, tuples, universe);
}

}  // namespace

PartiteDistribution grassmann_chains(int n, int p, const std::vector<int>& dims, double budget,
                                     std::shared_ptr<VertexUniverse> universe) {
  check_field(p);
  check_dims(dims, n);
  return chains_below(enumerate_subspaces(n, p, dims.back(), budget), p, dims, budget, std::move(universe));
}

PartiteDistribution symplectic_chains(int d, int p, const std::vector<int>& dims, double budget,
                                      std::shared_ptr<VertexUniverse> universe) {
  check_field(p);
  check_dims(dims, d);
  return chains_below(enumerate_isotropic(2 * d, p, dims.back(), budget), p, dims, budget, std::move(universe));
}

WeightedGraph grassmann_tripartite(int d, int p, int k1, int k2, int k3, double budget) {
  auto mu = grassmann_chains(d, p, {k1, k2, k3}, budget);
  return tripartite_graph(mu, {k1}, {k2}, {k3});
}

WeightedGraph symplectic_tripartite(int d, int p, int k1, int k2, int k3, double budget) {
  auto mu = symplectic_chains(d, p, {k1, k2, k3}, budget);
  return tripartite_graph(mu, {k1}, {k2}, {k3});
}

WeightedGraph johnson_graph(int n, int k) {
  if (k < 1 || k >= n) throw std::invalid_argument("johnson_graph: need 1 <= k < n");
  WeightedGraph g(std::vector<std::vector<int>>{{0}});
  auto vertex = [&](std::vector<int> s) {
    std::sort(s.begin(), s.end());
    return g.add_vertex({0, Tuple(s.begin(), s.end())});
  };
  for (const auto& s : combinations(n, k)) vertex(s);
  // Common (k-1)-core plus three outside elements.
  for (const auto& core : combinations(n, k - 1)) {
    std::vector<int> outside;
    for (int x = 0; x < n; ++x)
      if (!std::binary_search(core.begin(), core.end(), x)) outside.push_back(x);
    for (const auto& abc : combinations(static_cast<int>(outside.size()), 3)) {
      int v[3];
      for (int j = 0; j < 3; ++j) {
        auto s = core;
        s.push_back(outside[abc[j]]);
        v[j] = vertex(s);
      }
      g.add_triangle_weight(v[0], v[1], v[2], 1.0);
    }
  }
  // Common (k+1)-hull minus one of three inside elements.
  if (k >= 2)
    for (const auto& hull : combinations(n, k + 1))
      for (const auto& abc : combinations(k + 1, 3)) {
        int v[3];
        for (int j = 0; j < 3; ++j) {
          std::vector<int> s;
          for (int i = 0; i <= k; ++i)
            if (i != abc[j]) s.push_back(hull[i]);
          v[j] = vertex(s);
        }
        g.add_triangle_weight(v[0], v[1], v[2], 1.0);
      }
  if (g.triangles().empty())
    for (const auto& s : combinations(n, k))
      for (const auto& t : combinations(n, k)) {
        std::vector<int> common;
        std::set_intersection(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(common));
        if (s < t && static_cast<int>(common.size()) == k - 1) g.add_edge_weight(vertex(s), vertex(t), 1.0);
      }
  g.finalize();
  return g;
}

SimplicialComplex complete_complex(int n, int d) {
  if (d < 1 || d > n) throw std::invalid_argument("complete_complex: need 1 <= d <= n");
  auto faces = combinations(n, d);
  std::vector<double> w(faces.size(), 1.0);
  return SimplicialComplex::from_top_faces(n, std::move(faces), std::move(w));
}

}  // namespace hdx
