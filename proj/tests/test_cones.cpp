#include <gtest/gtest.h>

#include <cmath>

#include "hdx/buildings.hpp"
#include "hdx/cones.hpp"

using namespace hdx;

namespace {

int first_in_part(const WeightedGraph& g, int part) { return g.vertices_in_part(part).front(); }

// Propagation under a transform labels the image path, so the images of good edges are satisfied.
void expect_good_edges_satisfied(const UGInstance& inst, const PathTable& pt, const Matrix& transform) {
  const auto& g = inst.graph();
  const Assignment a = propagate(inst, pt, transform);
  std::vector<int> image(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) image[v] = find_subspace_vertex(g, apply(transform, vertex_subspace(g, v)));
  for (size_t e = 0; e < g.edges().size(); ++e) {
    const auto& ed = g.edges()[e];
    if (pt.good_vertex[ed.u] && pt.good_vertex[ed.v] && pt.good_edge[e]) {
      const int moved = g.find_edge(image[ed.u], image[ed.v]);
      ASSERT_GE(moved, 0);
      EXPECT_TRUE(inst.satisfied(a, moved)) << "edge " << e;
    }
  }
}

}  // namespace

TEST(BlockDecomposition, BaseVertexIsGood) {
  auto g = grassmann_tripartite(4, 5, 1, 2, 3);
  Rng rng = make_rng(1);
  const int u = first_in_part(g, 2);
  auto b = build_block_decomposition_gr(g, u, rng);
  EXPECT_EQ(b.regime, 1);
  EXPECT_EQ(b.block, 1);
  EXPECT_EQ(b.num_blocks, 3);
  EXPECT_TRUE(b.good[u]);
  EXPECT_TRUE(vertex_good(b, b.base_blocks));
}

TEST(BlockDecomposition, GoodFractionsOnGr4F5) {
  auto g = grassmann_tripartite(4, 5, 1, 2, 3);
  Rng rng = make_rng(2);
  auto b = build_block_decomposition_gr(g, first_in_part(g, 2), rng);
  auto pt = build_paths_gr(g, b);
  EXPECT_GE(pt.good_vertex_fraction, 1.0 - 5.0 * b.num_blocks / 5);
  EXPECT_GE(pt.good_edge_fraction, 0.5);
}

TEST(BlockDecomposition, SecondRegimeUsesMiddleBase) {
  auto g = grassmann_tripartite(4, 3, 1, 2, 4);
  Rng rng = make_rng(3);
  auto b = build_block_decomposition_gr(g, first_in_part(g, 1), rng);
  EXPECT_EQ(b.regime, 2);
  EXPECT_EQ(b.target, 2);
  EXPECT_TRUE(b.good[b.base_vertex]);
}

TEST(BlockDecomposition, NonDivisibleLayoutRefused) {
  auto g = grassmann_tripartite(5, 2, 1, 3, 5);
  Rng rng = make_rng(4);
  EXPECT_ANY_THROW(build_block_decomposition_gr(g, first_in_part(g, 2), rng));
}

TEST(Paths, ShapeOnGr4F5) {
  auto g = grassmann_tripartite(4, 5, 1, 2, 3);
  Rng rng = make_rng(5);
  const int u = first_in_part(g, 2);
  auto b = build_block_decomposition_gr(g, u, rng);
  auto pt = build_paths_gr(g, b);
  const int t = b.num_blocks;
  ASSERT_FALSE(pt.vertex_paths[u].empty());
  EXPECT_EQ(pt.vertex_paths[u].front(), u);
  EXPECT_EQ(pt.vertex_paths[u].back(), u);
  for (int v = 0; v < g.num_vertices(); ++v) {
    const auto& path = pt.vertex_paths[v];
    if (!pt.good_vertex[v]) {
      EXPECT_TRUE(path.empty());
      continue;
    }
    const int edges = static_cast<int>(path.size()) - 1;
    EXPECT_TRUE(edges == 2 * t || edges == 2 * t + 1) << edges;
    EXPECT_EQ(path.front(), u);
    EXPECT_EQ(path.back(), v);
    for (int j = 0; j <= 2 * t; ++j) EXPECT_EQ(g.part_of(path[j]), j % 2 == 0 ? 2 : 1);
    for (size_t j = 1; j < path.size(); ++j)
      if (path[j] != path[j - 1]) EXPECT_GT(g.edges()[g.find_edge(path[j], path[j - 1])].w, 0);
  }
}

TEST(Paths, SymplecticIsotropicAndMiddleVerticesAreTheirOwnAssociate) {
  auto g = symplectic_tripartite(3, 2, 1, 2, 3);
  Rng rng = make_rng(6);
  auto b = build_block_decomposition_symp(g, first_in_part(g, 1), rng);
  auto pt = build_paths_symp(g, b);
  EXPECT_TRUE(b.good[b.base_vertex]);
  for (int v = 0; v < g.num_vertices(); ++v) {
    for (const auto& s : pt.paths[v]) EXPECT_TRUE(is_isotropic(s));
    if (b.good[v] && g.part_of(v) == 1) EXPECT_EQ(b.associated[v], vertex_subspace(g, v));
  }
  EXPECT_GT(pt.good_vertex_fraction, 0.0);
}

TEST(Propagate, GoodEdgesSatisfiedOnConsistentInstances) {
  Rng rng = make_rng(7);
  auto g = grassmann_tripartite(4, 3, 1, 2, 3);
  auto pt = build_paths_gr(g, build_block_decomposition_gr(g, first_in_part(g, 2), rng));
  for (int m : {2, 3}) {
    auto inst = plant(g, random_assignment(g.num_vertices(), m, rng), 0.0, rng);
    for (int trial = 0; trial < 3; ++trial)
      expect_good_edges_satisfied(inst, pt, random_gl(4, 3, rng));
  }
  auto s = symplectic_tripartite(3, 2, 1, 2, 3);
  auto spt = build_paths_symp(s, first_in_part(s, 1), rng);
  auto sinst = plant(s, random_assignment(s.num_vertices(), 3, rng), 0.0, rng);
  for (int trial = 0; trial < 3; ++trial) expect_good_edges_satisfied(sinst, spt, random_sp(3, 2, rng));
}

TEST(Propagate, IdentityRecoversPlantedUpToShift) {
  Rng rng = make_rng(8);
  auto g = grassmann_tripartite(4, 3, 1, 2, 3);
  const int u = first_in_part(g, 2);
  auto pt = build_paths_gr(g, build_block_decomposition_gr(g, u, rng));
  auto planted = random_assignment(g.num_vertices(), 3, rng);
  auto inst = plant(g, planted, 0.0, rng);
  auto a = propagate(inst, pt, Matrix::identity(4, 3));
  // f(U) = id, so f = planted * planted(U)^{-1} on good vertices.
  for (int v = 0; v < g.num_vertices(); ++v)
    if (pt.good_vertex[v]) EXPECT_EQ(a[v], planted[v] * planted[u].inverse());
}

TEST(Propagate, Deterministic) {
  Rng rng = make_rng(9);
  auto g = grassmann_tripartite(4, 3, 1, 2, 3);
  auto pt = build_paths_gr(g, build_block_decomposition_gr(g, first_in_part(g, 2), rng));
  auto inst = plant(g, random_assignment(g.num_vertices(), 3, rng), 0.05, rng);
  Matrix m = random_gl(4, 3, rng);
  EXPECT_EQ(propagate(inst, pt, m), propagate(inst, pt, m));
}

TEST(ConesSolve, NoBetterThanBruteForce) {
  Rng rng = make_rng(10);
  auto g = grassmann_tripartite(3, 2, 1, 2, 3);
  auto pt = build_paths_gr(g, build_block_decomposition_gr(g, first_in_part(g, 2), rng));
  for (int t = 0; t < 5; ++t) {
    auto inst = plant(g, random_assignment(g.num_vertices(), 2, rng), 0.2, rng);
    auto c = cones_solve(inst, pt, ConesFamily::Grassmann, 5, rng);
    EXPECT_GE(c.best_viol + 1e-12, 1 - brute_force_solve(inst).value);
    EXPECT_LE(c.best_viol, c.mean_viol + 1e-12);
  }
}

TEST(ConesSolve, ZeroNoiseBelowNotGoodMass) {
  Rng rng = make_rng(11);
  auto g = grassmann_tripartite(4, 5, 1, 2, 3);
  auto pt = build_paths_gr(g, build_block_decomposition_gr(g, first_in_part(g, 2), rng));
  double not_good = 0;
  for (size_t e = 0; e < g.edges().size(); ++e) {
    const auto& ed = g.edges()[e];
    if (!(pt.good_vertex[ed.u] && pt.good_vertex[ed.v] && pt.good_edge[e])) not_good += ed.w;
  }
  auto inst = plant(g, random_assignment(g.num_vertices(), 2, rng), 0.0, rng);
  auto c = cones_solve(inst, pt, ConesFamily::Grassmann, 5, rng);
  EXPECT_LE(c.mean_viol, not_good + 1e-12);
}

TEST(Johnson, ZeroNoiseIsPerfect) {
  Rng rng = make_rng(12);
  for (auto [n, k] : std::vector<std::pair<int, int>>{{8, 3}, {6, 2}, {4, 3}}) {
    auto g = johnson_graph(n, k);
    auto inst = plant(g, random_assignment(g.num_vertices(), 3, rng), 0.0, rng);
    EXPECT_EQ(viol(inst, johnson_propagate(inst, n, rng)), 0.0) << n << "," << k;
  }
}

TEST(Johnson, SmallNoiseLinearInK) {
  Rng rng = make_rng(13);
  auto g = johnson_graph(8, 3);
  double mean = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    auto inst = plant(g, random_assignment(g.num_vertices(), 3, rng), 0.02, rng);
    mean += viol(inst, johnson_propagate(inst, 8, rng)) / seeds;
  }
  EXPECT_LE(mean, 10 * 3 * 0.02);
}
