#pragma once

#include <memory>
#include <vector>

#include "hdx/complex.hpp"
#include "hdx/gf.hpp"
#include "hdx/partite.hpp"

namespace hdx {

inline constexpr double kDefaultBudget = 5e6;

// All k-dim subspaces of GF(p)^n, one per RREF pivot pattern assignment.
std::vector<Subspace> enumerate_subspaces(int n, int p, int k, double budget = kDefaultBudget);
// All isotropic k-dim subspaces of GF(p)^{two_d} under the standard form.
std::vector<Subspace> enumerate_isotropic(int two_d, int p, int k, double budget = kDefaultBudget);
// (k+1)-dim subspaces containing v; with `isotropic`, only those that stay isotropic.
std::vector<Subspace> superspaces(const Subspace& v, bool isotropic = false);

enum class BuildMode { Auto, Explicit, Sampler };

struct BuildOptions {
  double budget = kDefaultBudget;
  BuildMode mode = BuildMode::Auto;
  int word_len = 64;  // type C sampler
};

double flag_count_a(int d, int p);
double flag_count_c(int d, int p);

// Complete flags V_1 < ... < V_d in GF(p)^{d+1}, coordinates labelled 1..d.
PartiteDistribution sb_type_a(int d, int p, const BuildOptions& opts = {},
                              std::shared_ptr<VertexUniverse> universe = nullptr);
// Complete isotropic flags in GF(p)^{2d}, coordinates labelled 1..d.
PartiteDistribution sb_type_c(int d, int p, const BuildOptions& opts = {},
                              std::shared_ptr<VertexUniverse> universe = nullptr);

// Independent product; labels of `second` are shifted by `offset` (default: max label of `first`).
PartiteDistribution tensor(const PartiteDistribution& first, const PartiteDistribution& second, int offset = -1);

// Uniform chains of subspaces of GF(p)^n with the given increasing dims; labels are the dims.
PartiteDistribution grassmann_chains(int n, int p, const std::vector<int>& dims, double budget = kDefaultBudget,
                                     std::shared_ptr<VertexUniverse> universe = nullptr);
// Uniform isotropic chains in GF(p)^{2d}.
PartiteDistribution symplectic_chains(int d, int p, const std::vector<int>& dims, double budget = kDefaultBudget,
                                      std::shared_ptr<VertexUniverse> universe = nullptr);

// Gr_d(k1,k2,k3): parts are subspaces of each dim, triangles uniform chains.
WeightedGraph grassmann_tripartite(int d, int p, int k1, int k2, int k3, double budget = kDefaultBudget);
// S_d(k1,k2,k3): isotropic analog in GF(p)^{2d}.
WeightedGraph symplectic_tripartite(int d, int p, int k1, int k2, int k3, double budget = kDefaultBudget);

// J(n,k,k-1) with the uniform distribution over its triangles (common (k-1)-core or common (k+1)-hull).
WeightedGraph johnson_graph(int n, int k);
// All d-subsets of n vertices, uniform.
SimplicialComplex complete_complex(int n, int d);

}  // namespace hdx
