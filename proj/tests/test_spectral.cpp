#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Dense>

#include "hdx/buildings.hpp"
#include "hdx/spectral.hpp"

using namespace hdx;

namespace {

// Point-line incidence of PG(2, q) built directly: x on y iff x . y = 0, both as normalized nonzero vectors.
Eigen::MatrixXd projective_plane_incidence(int q) {
  std::vector<std::array<int, 3>> pts;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c) {
        std::array<int, 3> v{a, b, c};
        int lead = 0;
        while (lead < 3 && v[lead] == 0) ++lead;
        if (lead < 3 && v[lead] == 1) pts.push_back(v);
      }
  Eigen::MatrixXd b(pts.size(), pts.size());
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = 0; j < pts.size(); ++j)
      b(i, j) = (pts[i][0] * pts[j][0] + pts[i][1] * pts[j][1] + pts[i][2] * pts[j][2]) % q == 0;
  return b;
}

double second_sv(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(1);
}

std::vector<int> random_subset(const std::vector<int>& from, Rng& rng) {
  std::vector<int> out;
  for (int v : from)
    if (uniform01(rng) < 0.5) out.push_back(v);
  return out;
}

}  // namespace

TEST(Bipartite, ProductGraphHasNoSecondSingularValue) {
  auto mu = PartiteDistribution::product({1, 2}, {{0.3, 0.7}, {0.2, 0.5, 0.3}});
  auto r = bipartite_spectrum(bipartite_graph(mu, {1}, {2}));
  EXPECT_NEAR(r.sigma1, 1.0, 1e-9);
  EXPECT_NEAR(r.sigma2, 0.0, 1e-9);
}

TEST(Bipartite, FanoClosedForm) {
  Eigen::MatrixXd b = projective_plane_incidence(2);
  ASSERT_EQ(b.rows(), 7);
  Eigen::MatrixXd bbt = b * b.transpose();
  Eigen::MatrixXd expected = 2 * Eigen::MatrixXd::Identity(7, 7) + Eigen::MatrixXd::Ones(7, 7);
  EXPECT_LT((bbt - expected).norm(), 1e-12);
  EXPECT_NEAR(second_sv(b / 3), std::sqrt(2.0) / 3, 1e-12);
  auto g = bipartite_graph(sb_type_a(2, 2), {1}, {2});
  EXPECT_NEAR(second_singular_value(g), std::sqrt(2.0) / 3, 1e-9);
}

TEST(Bipartite, ProjectivePlaneTrend) {
  double prev = 1;
  for (int q : {2, 3, 5}) {
    Eigen::MatrixXd b = projective_plane_incidence(q);
    const double oracle = second_sv(b / (q + 1));
    const double s = second_singular_value(bipartite_graph(sb_type_a(2, q), {1}, {2}));
    EXPECT_NEAR(s, oracle, 1e-9);
    EXPECT_NEAR(s, std::sqrt(q) / (q + 1), 1e-9);
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(Bipartite, DenseAndPowerAgree) {
  for (auto g : {bipartite_graph(sb_type_a(2, 3), {1}, {2}), bipartite_graph(sb_type_a(3, 2), {1}, {3}),
                 bipartite_graph(sb_type_c(2, 3), {1}, {2})}) {
    auto d = bipartite_spectrum(g, 0, 1, SpectralMethod::Dense);
    auto p = bipartite_spectrum(g, 0, 1, SpectralMethod::Power);
    EXPECT_NEAR(d.sigma1, 1.0, 1e-9);
    EXPECT_NEAR(d.sigma2, p.sigma2, 1e-6);
  }
}

TEST(Tripartite, ProductIsExactlyOneHalf) {
  auto mu = PartiteDistribution::product({1, 2, 3}, {{0.5, 0.5}, {0.2, 0.3, 0.5}, {1.0 / 3, 2.0 / 3}});
  auto g = tripartite_graph(mu, {1}, {2}, {3});
  EXPECT_NEAR(tripartite_second_singular(g), 0.5, 1e-9);
  EXPECT_NEAR(tripartite_second_singular(g, SpectralMethod::Power), 0.5, 1e-6);
}

TEST(Tripartite, SingleVertexPartsDegenerate) {
  // One vertex per part: the triangle K3 has eigenvalues {1, -1/2, -1/2}.
  auto mu = PartiteDistribution::product({1, 2, 3}, {{1.0}, {1.0}, {1.0}});
  EXPECT_NEAR(tripartite_second_singular(tripartite_graph(mu, {1}, {2}, {3})), 0.5, 1e-9);
}

TEST(Tripartite, TypeABuildingNearOneHalf) {
  auto g = tripartite_graph(sb_type_a(3, 5), {1}, {2}, {3});
  const double s = tripartite_second_singular(g);
  EXPECT_LE(s, 0.51);
  EXPECT_GE(s, 0.5 - 1e-9);
}

TEST(Audit, ProductIsZero) {
  auto mu = PartiteDistribution::product({1, 2, 3}, {{0.5, 0.5}, {0.2, 0.8}, {0.1, 0.4, 0.5}});
  EXPECT_NEAR(epsilon_product_audit(mu).epsilon, 0.0, 1e-9);
}

TEST(Audit, TypeADecreasingInQ) {
  const double a2 = epsilon_product_audit(sb_type_a(3, 2)).epsilon;
  const double a3 = epsilon_product_audit(sb_type_a(3, 3)).epsilon;
  EXPECT_GT(a2, 0);
  EXPECT_LT(a2, 0.8);
  EXPECT_GT(a2, a3);
}

TEST(Audit, ConditioningNeverIncreases) {
  auto mu = sb_type_a(3, 2);
  const double base = epsilon_product_audit(mu).epsilon;
  for (size_t i = 0; i < mu.size(); i += 37) {
    auto c = condition(mu, {2}, {mu.tuple(i)[1]});
    EXPECT_LE(epsilon_product_audit(c).epsilon, base + 1e-12);
  }
}

TEST(Audit, BipartiteSigmaBoundedByAuditedEpsilon) {
  // Single-pair conditionals are part of the audit, so each {i},{j} operator is at most epsilon.
  auto mu = sb_type_a(3, 3);
  const double eps = epsilon_product_audit(mu).epsilon;
  for (auto [i, j] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 3}})
    EXPECT_LE(second_singular_value(bipartite_graph(mu, {i}, {j})), eps + 1e-9);
}

TEST(Mixing, TrivialSets) {
  auto g = bipartite_graph(sb_type_a(2, 2), {1}, {2});
  const double lambda = second_singular_value(g);
  auto u = g.vertices_in_part(0), v = g.vertices_in_part(1);
  EXPECT_GE(mixing_check(g, u, {v[0], v[1]}, lambda), -1e-12);
  EXPECT_GE(mixing_check(g, {}, v, lambda), -1e-12);
}

TEST(Mixing, RandomSetsOnFano) {
  auto g = bipartite_graph(sb_type_a(2, 2), {1}, {2});
  const double lambda = second_singular_value(g);
  Rng rng = make_rng(1);
  double worst = 1;
  for (int t = 0; t < 100; ++t)
    worst = std::min(worst, mixing_check(g, random_subset(g.vertices_in_part(0), rng),
                                         random_subset(g.vertices_in_part(1), rng), lambda));
  EXPECT_GE(worst, -1e-9);
}

TEST(Sampling, TrivialSets) {
  auto g = bipartite_graph(sb_type_a(2, 2), {1}, {2});
  const double lambda = second_singular_value(g);
  EXPECT_EQ(sampling_check(g, {}, 0.1, lambda).measured, 0.0);
  EXPECT_NEAR(sampling_check(g, g.vertices_in_part(0), 0.1, lambda).measured, 0.0, 1e-12);
}

TEST(Sampling, RandomSetsOnFano) {
  auto g = bipartite_graph(sb_type_a(2, 2), {1}, {2});
  const double lambda = second_singular_value(g);
  Rng rng = make_rng(2);
  for (int t = 0; t < 50; ++t) {
    auto r = sampling_check(g, random_subset(g.vertices_in_part(0), rng), 0.2, lambda);
    EXPECT_LE(r.measured, r.bound + 1e-12);
  }
}

TEST(Trickling, FormulaProperties) {
  EXPECT_EQ(trickling_down_formula(0, 4), 0.0);
  double prev = 0;
  for (double l = 0.01; l < 0.3; l += 0.01) {
    const double b = trickling_down_formula(l, 4);
    EXPECT_GT(b, prev);
    prev = b;
  }
}

TEST(Trickling, SymplecticBuildingWithinBound) {
  auto x = SimplicialComplex::from_distribution(sb_type_c(2, 3));
  auto r = trickling_down_bound(x);
  EXPECT_LE(r.measured_gamma, r.bound + 1e-9);
  auto y = SimplicialComplex::from_distribution(sb_type_a(3, 2));
  auto s = trickling_down_bound(y);
  EXPECT_LE(s.measured_gamma, s.bound + 1e-9);
}

TEST(LocalAudit, CompleteComplexClosedForm) {
  // Every link is a complete graph K_m with walk eigenvalue -1/(m-1); the empty face's link,
  // K_n itself, gives the largest value.
  for (auto [n, d] : std::vector<std::pair<int, int>>{{12, 3}, {10, 4}, {15, 2}})
    EXPECT_NEAR(local_spectral_audit(complete_complex(n, d)), -1.0 / (n - 1), 1e-9);
}

TEST(LocalAudit, GraphComplexIsItsWalk) {
  // The 5-cycle as a complex of edges: lambda_2 = cos(2 pi / 5).
  std::vector<Face> faces;
  for (int i = 0; i < 5; ++i) {
    Face f{i, (i + 1) % 5};
    std::sort(f.begin(), f.end());
    faces.push_back(f);
  }
  auto x = SimplicialComplex::from_top_faces(5, faces, std::vector<double>(5, 1.0));
  EXPECT_NEAR(local_spectral_audit(x), std::cos(2 * M_PI / 5), 1e-9);
}

TEST(LocalAudit, TypeABuildingIsAGoodExpander) {
  auto x = SimplicialComplex::from_distribution(sb_type_a(3, 5));
  EXPECT_LE(local_spectral_audit(x), 0.5);
}

TEST(Operators, StochasticTopVector) {
  auto g = bipartite_graph(sb_type_c(2, 3), {1}, {2});
  std::vector<int> rows, cols;
  Eigen::MatrixXd m = normalized_bipartite_operator(g, 0, 1, &rows, &cols);
  Eigen::VectorXd a(rows.size()), b(cols.size());
  for (size_t i = 0; i < rows.size(); ++i) a(i) = std::sqrt(g.measure(rows[i]) * 2);
  for (size_t i = 0; i < cols.size(); ++i) b(i) = std::sqrt(g.measure(cols[i]) * 2);
  EXPECT_LT((m * b - a).norm(), 1e-9);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  EXPECT_NEAR(svd.singularValues()(0), 1.0, 1e-9);
}

TEST(Blowup, ZeroFunction) {
  auto mu = sb_type_a(3, 2);
  Rng rng = make_rng(3);
  auto r = restriction_blowup_estimate(mu, std::vector<bool>(mu.size(), false), 1, 0.1, 2000, rng);
  EXPECT_EQ(r.estimate, 0.0);
}

TEST(Blowup, CoordinateIndicatorPins) {
  auto mu = sb_type_a(3, 2);
  const Value v = mu.support(1)[0];
  for (Value x : mu.support(1)) {
    auto c = condition(mu, {1}, {x});
    double mass = 0;
    for (size_t i = 0; i < c.size(); ++i) mass += c.tuple(i)[0] == v ? c.weight(i) : 0;
    EXPECT_TRUE(std::abs(mass) < 1e-12 || std::abs(mass - 1) < 1e-12);
  }
}

TEST(Blowup, SparseFunctionWithinBoundScale) {
  // f marks one flag of SB^A_3(F_5). Only conditioning on its line lifts the mass above eta:
  // 1/36 of the flags through a line, versus 1/186 through a point or a plane.
  auto mu = sb_type_a(3, 5);
  std::vector<bool> f(mu.size(), false);
  f[0] = true;
  Rng rng = make_rng(4);
  auto r = restriction_blowup_estimate(mu, f, 1, 0.01, 20000, rng);
  EXPECT_NEAR(r.mean_f, 1.0 / 29016, 1e-12);
  EXPECT_LE(r.estimate, 5 * restriction_blowup_rhs(1, 3, r.mean_f, 0.01));
  EXPECT_GT(r.estimate, 0);
}
