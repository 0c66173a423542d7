#include <gtest/gtest.h>

#include <algorithm>

#include <cmath>
#include <map>
#include <set>

#include "hdx/buildings.hpp"
#include "hdx/errors.hpp"
#include "hdx/spectral.hpp"

using namespace hdx;

namespace {

// Independent count of k-dim subspaces of GF(p)^n: distinct row spaces of all k x n matrices of rank k,
// counted via element sets.
size_t brute_subspace_count(int n, int p, int k) {
  std::set<std::set<std::vector<int>>> spaces;
  const int cells = n * k;
  std::vector<int> c(cells, 0);
  auto vec = [&](int row) { return std::vector<int>(c.begin() + row * n, c.begin() + (row + 1) * n); };
  while (true) {
    std::set<std::vector<int>> span;
    std::vector<int> coef(k, 0);
    while (true) {
      std::vector<int> v(n, 0);
      for (int i = 0; i < k; ++i) {
        auto r = vec(i);
        for (int j = 0; j < n; ++j) v[j] = (v[j] + coef[i] * r[j]) % p;
      }
      span.insert(v);
      int i = 0;
      while (i < k && ++coef[i] == p) coef[i++] = 0;
      if (i == k) break;
    }
    if (static_cast<double>(span.size()) == std::pow(p, k)) spaces.insert(span);
    int i = 0;
    while (i < cells && ++c[i] == p) c[i++] = 0;
    if (i == cells) break;
  }
  return spaces.size();
}

const Subspace& sub(const PartiteDistribution& mu, Value v) { return *mu.universe()->subspace(v); }

void expect_chains(const PartiteDistribution& mu, bool isotropic) {
  for (size_t i = 0; i < mu.size(); ++i) {
    auto row = mu.tuple(i);
    for (size_t j = 0; j < row.size(); ++j) {
      EXPECT_EQ(sub(mu, row[j]).dim(), mu.labels()[j]);
      if (isotropic) EXPECT_TRUE(is_isotropic(sub(mu, row[j])));
      if (j) EXPECT_TRUE(sub(mu, row[j]).contains(sub(mu, row[j - 1])));
    }
  }
}

}  // namespace

TEST(Enumerate, CountsMatchBruteForce) {
  EXPECT_EQ(enumerate_subspaces(3, 2, 1).size(), 7u);
  EXPECT_EQ(brute_subspace_count(3, 2, 1), 7u);
  for (auto [n, p, k] : std::vector<std::array<int, 3>>{{3, 2, 2}, {4, 2, 2}, {3, 3, 1}, {3, 3, 2}})
    EXPECT_EQ(enumerate_subspaces(n, p, k).size(), brute_subspace_count(n, p, k)) << n << " " << p << " " << k;
  EXPECT_EQ(enumerate_subspaces(4, 3, 0).size(), 1u);
  EXPECT_EQ(enumerate_subspaces(4, 3, 4).size(), 1u);
  EXPECT_NEAR(gaussian_binomial(5, 2, 3), enumerate_subspaces(5, 3, 2).size(), 0);
}

TEST(Enumerate, IsotropicCounts) {
  auto lines = enumerate_isotropic(4, 2, 1);
  EXPECT_EQ(lines.size(), 15u);
  // Independent oracle: every line of GF(2)^4 is isotropic.
  EXPECT_EQ(brute_subspace_count(4, 2, 1), 15u);
  auto lag = enumerate_isotropic(4, 2, 2);
  EXPECT_EQ(lag.size(), 15u);
  size_t iso2 = 0;
  for (const auto& s : enumerate_subspaces(4, 2, 2)) iso2 += is_isotropic(s);
  EXPECT_EQ(iso2, 15u);
  for (const auto& s : lag) EXPECT_TRUE(is_isotropic(s));
}

TEST(TypeA, FanoFlags) {
  auto mu = sb_type_a(2, 2);
  EXPECT_EQ(mu.size(), 21u);
  EXPECT_EQ(mu.labels(), (std::vector<int>{1, 2}));
  expect_chains(mu, false);
  for (double w : mu.weights()) EXPECT_NEAR(w, 1.0 / 21, 1e-15);
}

TEST(TypeA, PartSizesAreGaussianBinomials) {
  auto mu = sb_type_a(3, 3);
  EXPECT_EQ(mu.support(1).size(), enumerate_subspaces(4, 3, 1).size());
  EXPECT_EQ(mu.support(2).size(), enumerate_subspaces(4, 3, 2).size());
  EXPECT_EQ(mu.support(3).size(), enumerate_subspaces(4, 3, 3).size());
  EXPECT_NEAR(static_cast<double>(mu.size()), flag_count_a(3, 3), 0);
  expect_chains(mu, false);
}

TEST(TypeA, AuditShrinksWithQ) {
  const double e2 = epsilon_product_audit(sb_type_a(2, 2)).epsilon;
  const double e3 = epsilon_product_audit(sb_type_a(2, 3)).epsilon;
  const double e5 = epsilon_product_audit(sb_type_a(2, 5)).epsilon;
  EXPECT_GT(e2, e3);
  EXPECT_GT(e3, e5);
  // Points vs lines of a projective plane: sigma_2 = sqrt(q)/(q+1) < 1/sqrt(q).
  for (auto [q, e] : std::vector<std::pair<int, double>>{{2, e2}, {3, e3}, {5, e5}}) {
    EXPECT_NEAR(e, std::sqrt(q) / (q + 1), 1e-9);
    EXPECT_LE(e, 1 / std::sqrt(q));
  }
}

TEST(TypeA, GroupInvariance) {
  auto mu = sb_type_a(2, 3);
  Rng rng = make_rng(4);
  std::set<std::pair<std::string, std::string>> flags;
  for (size_t i = 0; i < mu.size(); ++i)
    flags.insert({sub(mu, mu.tuple(i)[0]).encode(), sub(mu, mu.tuple(i)[1]).encode()});
  for (int t = 0; t < 5; ++t) {
    Matrix g = random_gl(3, 3, rng);
    for (size_t i = 0; i < mu.size(); ++i) {
      auto a = apply(g, sub(mu, mu.tuple(i)[0])), b = apply(g, sub(mu, mu.tuple(i)[1]));
      EXPECT_TRUE(flags.count({a.encode(), b.encode()}));
    }
  }
}

TEST(TypeC, SmallestSymplecticBuilding) {
  auto mu = sb_type_c(2, 2);
  EXPECT_EQ(mu.size(), 45u);
  EXPECT_EQ(mu.support(1).size(), 15u);
  EXPECT_EQ(mu.support(2).size(), 15u);
  expect_chains(mu, true);
  // Each Lagrangian contains three lines.
  std::map<Value, int> per_lagrangian;
  for (size_t i = 0; i < mu.size(); ++i) per_lagrangian[mu.tuple(i)[1]]++;
  for (const auto& [v, c] : per_lagrangian) EXPECT_EQ(c, 3);
}

TEST(TypeC, AuditAndSymplecticInvariance) {
  auto mu = sb_type_c(2, 3);
  expect_chains(mu, true);
  EXPECT_LE(epsilon_product_audit(mu).epsilon, 1.0);
  EXPECT_GT(epsilon_product_audit(sb_type_c(2, 3)).epsilon, epsilon_product_audit(sb_type_c(2, 5)).epsilon);
  Rng rng = make_rng(5);
  std::set<std::string> lagr;
  for (Value v : mu.support(2)) lagr.insert(sub(mu, v).encode());
  for (int t = 0; t < 5; ++t) {
    Matrix g = random_sp(2, 3, rng);
    for (Value v : mu.support(2)) EXPECT_TRUE(lagr.count(apply(g, sub(mu, v)).encode()));
  }
}

TEST(TypeC, SamplerModeProducesIsotropicFlags) {
  BuildOptions opts;
  opts.mode = BuildMode::Sampler;
  auto mu = sb_type_c(3, 5, opts);
  ASSERT_FALSE(mu.is_explicit());
  Rng rng = make_rng(6);
  for (int i = 0; i < 50; ++i) {
    auto t = mu.sample(rng);
    for (size_t j = 0; j < t.size(); ++j) {
      const Subspace& s = sub(mu, t[j]);
      EXPECT_EQ(s.dim(), static_cast<int>(j) + 1);
      EXPECT_TRUE(is_isotropic(s));
      if (j) EXPECT_TRUE(s.contains(sub(mu, t[j - 1])));
    }
  }
}

TEST(Budget, ExplicitOverBudgetRefuses) {
  BuildOptions opts;
  opts.mode = BuildMode::Explicit;
  opts.budget = 100;
  EXPECT_THROW(sb_type_a(3, 3, opts), BudgetExceeded);
  opts.mode = BuildMode::Auto;
  EXPECT_FALSE(sb_type_a(3, 3, opts).is_explicit());
}

TEST(Tensor, PointFactorIsNeutral) {
  auto mu = sb_type_a(2, 2);
  auto point = PartiteDistribution::product({1}, {{1.0}});
  auto t = tensor(mu, point);
  EXPECT_EQ(t.size(), mu.size());
  EXPECT_EQ(t.labels(), (std::vector<int>{1, 2, 3}));
  // The point factor's value is re-interned, so compare prefixes row by row.
  for (size_t i = 0; i < mu.size(); ++i) {
    Tuple row = t.tuple_copy(i);
    row.pop_back();
    EXPECT_EQ(row, mu.tuple_copy(i));
    EXPECT_NEAR(t.weight(i), mu.weight(i), 1e-15);
  }
}

TEST(Tensor, MarginalsFactorAcrossSeam) {
  auto a = sb_type_a(2, 2), b = sb_type_c(2, 2);
  auto t = tensor(a, b);
  EXPECT_EQ(t.size(), a.size() * b.size());
  // Second-factor values are re-interned: check independence inside t, and that the
  // seam marginals carry the factors' weight profiles.
  auto m = marginal(t, {2, 3});
  auto ta = marginal(t, {2}), tb = marginal(t, {3});
  for (size_t i = 0; i < m.size(); ++i) {
    auto row = m.tuple(i);
    EXPECT_NEAR(m.weight(i), ta.probability({row[0]}) * tb.probability({row[1]}), 1e-14);
  }
  auto profile = [](const PartiteDistribution& d) {
    std::vector<double> w;
    for (size_t i = 0; i < d.size(); ++i) w.push_back(d.weight(i));
    std::sort(w.begin(), w.end());
    return w;
  };
  auto pa = profile(ta), pb = profile(tb), qa = profile(marginal(a, {2})), qb = profile(marginal(b, {1}));
  ASSERT_EQ(pa.size(), qa.size());
  ASSERT_EQ(pb.size(), qb.size());
  for (size_t i = 0; i < pa.size(); ++i) EXPECT_NEAR(pa[i], qa[i], 1e-14);
  for (size_t i = 0; i < pb.size(); ++i) EXPECT_NEAR(pb[i], qb[i], 1e-14);
}

TEST(Tensor, AuditAtMostMaxOfFactors) {
  auto a = sb_type_a(2, 2), b = sb_type_a(2, 3);
  const double ea = epsilon_product_audit(a).epsilon, eb = epsilon_product_audit(b).epsilon;
  EXPECT_LE(epsilon_product_audit(tensor(a, b)).epsilon, std::max(ea, eb) + 1e-9);
}

TEST(Grassmann, ThreeSpacePartSizes) {
  auto g = grassmann_tripartite(3, 2, 1, 2, 3);
  EXPECT_EQ(g.vertices_in_part(0).size(), 7u);
  EXPECT_EQ(g.vertices_in_part(1).size(), 7u);
  EXPECT_EQ(g.vertices_in_part(2).size(), 1u);
  EXPECT_EQ(g.triangles().size(), 21u);
}

TEST(Grassmann, TrianglesAreChainsAndConsistent) {
  auto g = grassmann_tripartite(4, 2, 1, 2, 3);
  EXPECT_EQ(g.vertices_in_part(0).size(), 15u);
  EXPECT_EQ(g.vertices_in_part(1).size(), 35u);
  EXPECT_EQ(g.vertices_in_part(2).size(), 15u);
  auto s = [&](int v) { return *g.universe()->subspace(g.key(v).values[0]); };
  double tw = 0;
  std::map<std::pair<int, int>, double> proj;
  for (const auto& t : g.triangles()) {
    EXPECT_TRUE(s(t.b).contains(s(t.a)));
    EXPECT_TRUE(s(t.c).contains(s(t.b)));
    tw += t.w;
    for (auto [x, y] : {std::pair{t.a, t.b}, std::pair{t.a, t.c}, std::pair{t.b, t.c}})
      proj[{std::min(x, y), std::max(x, y)}] += t.w / 3;
  }
  EXPECT_NEAR(tw, 1, 1e-12);
  for (const auto& e : g.edges()) EXPECT_NEAR((proj[{std::min(e.u, e.v), std::max(e.u, e.v)}]), e.w, 1e-12);
}

TEST(Symplectic, PointLineLagrangianCounts) {
  // Sp_6(F_2): 63 points, 315 isotropic lines, 135 Lagrangian planes.
  auto g = symplectic_tripartite(3, 2, 1, 2, 3);
  EXPECT_EQ(g.vertices_in_part(0).size(), 63u);
  EXPECT_EQ(g.vertices_in_part(1).size(), 315u);
  EXPECT_EQ(g.vertices_in_part(2).size(), 135u);
  // A Lagrangian plane contains 7 points and 7 lines.
  for (int v : g.vertices_in_part(2)) EXPECT_EQ(g.neighbors(v).size(), 14u);
  for (int v = 0; v < g.num_vertices(); ++v) EXPECT_TRUE(is_isotropic(*g.universe()->subspace(g.key(v).values[0])));
}

TEST(Symplectic, GroupOrbitCoversTriangles) {
  auto mu = symplectic_chains(2, 3, {1, 2});
  std::set<std::pair<std::string, std::string>> support;
  for (size_t i = 0; i < mu.size(); ++i)
    support.insert({sub(mu, mu.tuple(i)[0]).encode(), sub(mu, mu.tuple(i)[1]).encode()});
  Rng rng = make_rng(7);
  const Subspace a = sub(mu, mu.tuple(0)[0]), b = sub(mu, mu.tuple(0)[1]);
  std::set<std::pair<std::string, std::string>> seen;
  for (int i = 0; i < 20000 && seen.size() < support.size(); ++i) {
    Matrix m = random_sp(2, 3, rng);
    auto img = std::make_pair(apply(m, a).encode(), apply(m, b).encode());
    EXPECT_TRUE(support.count(img));
    seen.insert(img);
  }
  EXPECT_EQ(seen.size(), support.size());
}

TEST(Johnson, SmallCases) {
  auto j = johnson_graph(4, 2);
  EXPECT_EQ(j.num_vertices(), 6);
  for (int v = 0; v < 6; ++v) EXPECT_EQ(j.neighbors(v).size(), 4u);
  auto k = johnson_graph(5, 1);
  EXPECT_EQ(k.num_vertices(), 5);
  EXPECT_EQ(k.edges().size(), 10u);
  for (const auto& e : k.edges()) EXPECT_NEAR(e.w, 0.1, 1e-12);
}

TEST(CompleteComplex, UniformLevels) {
  auto x = complete_complex(6, 3);
  EXPECT_EQ(x.num_top(), 20u);
  for (int i = 1; i <= 3; ++i) {
    auto l = level(x, i);
    EXPECT_EQ(l.faces.size(), static_cast<size_t>(binomial(6, i)));
    for (double w : l.measure) EXPECT_NEAR(w, 1 / binomial(6, i), 1e-14);
  }
}
