#include <gtest/gtest.h>

#include <map>
#include <set>

#include "hdx/gf.hpp"

using namespace hdx;

namespace {

std::vector<int> random_vector(int n, int p, Rng& rng) {
  std::vector<int> v(n);
  for (auto& x : v) x = uniform_int(rng, p);
  return v;
}

// All vectors of a subspace, by brute force over coefficient tuples.
std::set<std::vector<int>> elements(const Subspace& s) {
  const int p = s.modulus(), n = s.ambient(), k = s.dim();
  std::set<std::vector<int>> out;
  std::vector<int> c(k, 0);
  while (true) {
    std::vector<int> v(n, 0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < n; ++j) v[j] = (v[j] + c[i] * s.basis()(i, j)) % p;
    out.insert(v);
    int i = 0;
    while (i < k && ++c[i] == p) c[i++] = 0;
    if (i == k) break;
  }
  return out;
}

}  // namespace

TEST(Rref, IdentityIsAlreadyReduced) {
  Matrix id = Matrix::identity(3, 2);
  auto r = rref(id);
  EXPECT_EQ(r.rank, 3);
  EXPECT_EQ(r.basis, id);
}

TEST(Rref, ZeroMatrixHasEmptyBasis) {
  auto r = rref(Matrix(3, 4, 5));
  EXPECT_EQ(r.rank, 0);
  EXPECT_EQ(r.basis.rows(), 0);
}

TEST(Rref, HandEliminationOverGF2) {
  auto r = rref(Matrix::from_rows({{1, 1, 0}, {0, 1, 1}}, 3, 2));
  EXPECT_EQ(r.rank, 2);
  EXPECT_EQ(r.basis, Matrix::from_rows({{1, 0, 1}, {0, 1, 1}}, 3, 2));
}

TEST(Subspace, SumIsIdempotent) {
  Rng rng = make_rng(1);
  for (int i = 0; i < 20; ++i) {
    Subspace a = random_subspace(5, 2, 3, rng);
    EXPECT_EQ(subspace_sum(a, a), a);
    EXPECT_EQ(subspace_intersect(a, a), a);
  }
}

TEST(Subspace, CoordinateLines) {
  Subspace e1 = Subspace::from_vectors({{1, 0, 0}}, 3, 2);
  Subspace e2 = Subspace::from_vectors({{0, 1, 0}}, 3, 2);
  Subspace s = subspace_sum(e1, e2);
  EXPECT_EQ(s.dim(), 2);
  EXPECT_EQ(s, Subspace::from_vectors({{1, 0, 0}, {0, 1, 0}}, 3, 2));
  EXPECT_EQ(subspace_intersect(e1, e2).dim(), 0);
}

TEST(Subspace, DimensionFormulaAndBruteForceIntersection) {
  Rng rng = make_rng(2);
  for (int i = 0; i < 100; ++i) {
    const int p = i % 2 ? 2 : 3;
    Subspace a = random_subspace(4, 1 + uniform_int(rng, 3), p, rng);
    Subspace b = random_subspace(4, 1 + uniform_int(rng, 3), p, rng);
    Subspace s = subspace_sum(a, b), x = subspace_intersect(a, b);
    EXPECT_EQ(s.dim() + x.dim(), a.dim() + b.dim());
    // Independent oracle: set intersection of element lists.
    auto ea = elements(a), eb = elements(b);
    std::set<std::vector<int>> common;
    for (const auto& v : ea)
      if (eb.count(v)) common.insert(v);
    EXPECT_EQ(elements(x), common);
    // Canonical form: re-spanning the output changes nothing.
    EXPECT_EQ(Subspace::span(s.basis()), s);
    EXPECT_EQ(rref(x.basis()).basis, x.basis());
  }
}

TEST(Subspace, TwoPlanesInThreeSpaceMeet) {
  Rng rng = make_rng(3);
  for (int i = 0; i < 50; ++i)
    EXPECT_GE(subspace_intersect(random_subspace(3, 2, 2, rng), random_subspace(3, 2, 2, rng)).dim(), 1);
}

TEST(Subspace, EncodeRoundTrip) {
  Rng rng = make_rng(4);
  for (int i = 0; i < 20; ++i) {
    Subspace a = random_subspace(5, 2, 5, rng);
    EXPECT_EQ(Subspace::decode(a.encode()), a);
  }
}

TEST(Symplectic, FormOnBasisVectors) {
  // n = 2: e1 = (1,0,0,0), e3 = (0,0,1,0).
  EXPECT_EQ(symplectic_form({1, 0, 0, 0}, {0, 0, 1, 0}, 5), 1);
  EXPECT_EQ(symplectic_form({0, 0, 1, 0}, {1, 0, 0, 0}, 5), 4);
}

TEST(Symplectic, AlternatingAndAntisymmetric) {
  Rng rng = make_rng(5);
  for (int i = 0; i < 100; ++i) {
    const int p = i % 2 ? 3 : 5;
    auto u = random_vector(6, p, rng), v = random_vector(6, p, rng);
    EXPECT_EQ(symplectic_form(u, u, p), 0);
    EXPECT_EQ((symplectic_form(u, v, p) + symplectic_form(v, u, p)) % p, 0);
  }
}

TEST(Symplectic, ComplementProperties) {
  EXPECT_EQ(symplectic_complement(Subspace::zero(4, 3)), Subspace::full(4, 3));
  Rng rng = make_rng(6);
  for (int i = 0; i < 50; ++i) {
    Subspace u = random_subspace(6, uniform_int(rng, 7), 3, rng);
    Subspace c = symplectic_complement(u);
    EXPECT_EQ(c.dim(), 6 - u.dim());
    EXPECT_EQ(symplectic_complement(c), u);
    if (is_isotropic(u)) EXPECT_TRUE(c.contains(u));
    // Oracle: every basis pair of u and c pairs to zero.
    for (int a = 0; a < u.dim(); ++a)
      for (int b = 0; b < c.dim(); ++b)
        EXPECT_EQ(symplectic_form(u.basis().row_vector(a), c.basis().row_vector(b), 3), 0);
    Subspace w = random_subspace(6, uniform_int(rng, 7), 3, rng);
    EXPECT_EQ(symplectic_complement(subspace_sum(u, w)), subspace_intersect(c, symplectic_complement(w)));
  }
}

TEST(Symplectic, Isotropy) {
  Rng rng = make_rng(7);
  for (int i = 0; i < 30; ++i) EXPECT_TRUE(is_isotropic(random_subspace(4, 1, 3, rng)));
  EXPECT_FALSE(is_isotropic(Subspace::from_vectors({{1, 0, 0, 0}, {0, 0, 1, 0}}, 4, 2)));
  EXPECT_TRUE(is_isotropic(Subspace::zero(4, 2)));
}

TEST(RandomGL, AlwaysFullRank) {
  Rng rng = make_rng(8);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(rank(random_gl(4, 2 + (i % 2), rng)), 4);
}

TEST(RandomGL, InvertibleFractionOverGF2) {
  // Enumeration oracle: count invertible 2x2 matrices over GF(2).
  int invertible = 0;
  for (int m = 0; m < 16; ++m) {
    int a = m & 1, b = (m >> 1) & 1, c = (m >> 2) & 1, d = (m >> 3) & 1;
    invertible += ((a * d + b * c) % 2) != 0;
  }
  EXPECT_EQ(invertible, 6);
  Rng rng = make_rng(9);
  int hits = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) hits += rank(random_matrix(2, 2, 2, rng)) == 2;
  const double rate = 6.0 / 16, sd = std::sqrt(rate * (1 - rate) / n);
  EXPECT_NEAR(static_cast<double>(hits) / n, rate, 4 * sd);
}

TEST(RandomGL, UniformOverGL2F2) {
  Rng rng = make_rng(10);
  std::map<std::vector<uint8_t>, int> counts;
  const int n = 6000;
  for (int i = 0; i < n; ++i) counts[random_gl(2, 2, rng).data()]++;
  ASSERT_EQ(counts.size(), 6u);
  double chi2 = 0;
  for (const auto& [m, c] : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  // chi-square with 5 dof: 99.9% quantile 20.5.
  EXPECT_LT(chi2, 20.5);
}

TEST(RandomSp, PreservesForm) {
  Rng rng = make_rng(11);
  EXPECT_TRUE(is_symplectic(random_sp(3, 5, rng, 0)));
  for (int i = 0; i < 50; ++i) {
    Matrix m = random_sp(3, i % 2 ? 3 : 5, rng);
    Matrix w = omega_matrix(3, m.modulus());
    EXPECT_EQ(m.transpose() * w * m, w);
  }
}

TEST(RandomSp, MapsIsotropicToIsotropic) {
  Rng rng = make_rng(12);
  for (int i = 0; i < 30; ++i) {
    Matrix m = random_sp(2, 3, rng);
    Subspace line = random_subspace(4, 1, 3, rng);
    Subspace lagr = subspace_sum(line, random_subspace_of(symplectic_complement(line), 1, rng));
    if (lagr.dim() != 2) continue;
    ASSERT_TRUE(is_isotropic(lagr));
    Subspace img = apply(m, lagr);
    EXPECT_TRUE(is_isotropic(img));
    EXPECT_EQ(img.dim(), 2);
  }
}

TEST(Apply, GroupAction) {
  Rng rng = make_rng(13);
  for (int i = 0; i < 30; ++i) {
    Subspace u = random_subspace(4, 2, 3, rng);
    EXPECT_EQ(apply(Matrix::identity(4, 3), u), u);
    Matrix m = random_gl(4, 3, rng);
    EXPECT_EQ(apply(m, u).dim(), 2);
    EXPECT_EQ(apply(m, apply(inverse(m), u)), u);
  }
}
