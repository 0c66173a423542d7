#pragma once

#include <string>
#include <vector>

#include "hdx/gf.hpp"
#include "hdx/partite.hpp"
#include "hdx/ug.hpp"

namespace hdx {

enum class ConesFamily { Grassmann, Symplectic };

// Base vertex U split into k-dim blocks, plus per-vertex blocks of the associated k_2- or
// k_3-dim vertex V'. Regime 1 (k3-k2 <= k2-k1): U in the top part, k = k3-k2, target k3.
// Regime 2 and the symplectic family: U in the middle part, k = k2-k1, target k2.
struct BlockDecomposition {
  ConesFamily family = ConesFamily::Grassmann;
  int ambient = 0;
  int p = 2;
  int dims[3] = {0, 0, 0};
  int regime = 1;
  int block = 1;     // k
  int num_blocks = 1;  // t
  int target = 0;      // dim of the flipped vertices (k3 or k2)
  int base_vertex = -1;
  std::vector<Subspace> base_blocks;
  std::vector<std::vector<Subspace>> blocks;  // per graph vertex
  std::vector<Subspace> associated;           // V' per vertex
  std::vector<char> good;
};

struct PathTable {
  int base_vertex = -1;
  std::vector<std::vector<Subspace>> paths;  // subspaces along P(U, V), empty when V is not good
  std::vector<std::vector<int>> vertex_paths;
  std::vector<char> good_vertex;
  std::vector<char> good_edge;
  double good_vertex_fraction = 0;  // by vertex measure
  double good_edge_fraction = 0;    // by edge weight
};

int part_dimension(const WeightedGraph& g, int part);
const Subspace& vertex_subspace(const WeightedGraph& g, int v);
// Graph vertex whose subspace is s, or -1.
int find_subspace_vertex(const WeightedGraph& g, const Subspace& s);

BlockDecomposition build_block_decomposition_gr(const WeightedGraph& g, int base_vertex, Rng& rng, int retries = 32);
BlockDecomposition build_block_decomposition_symp(const WeightedGraph& g, int base_vertex, Rng& rng,
                                                  int retries = 32);

bool vertex_good(const BlockDecomposition& b, const std::vector<Subspace>& blocks);
// (V, W) with W inside V; both must be good.
bool edge_good(const BlockDecomposition& b, int big, int small);

PathTable build_paths_gr(const WeightedGraph& g, const BlockDecomposition& b);
PathTable build_paths_symp(const WeightedGraph& g, const BlockDecomposition& b);
// Decomposition plus paths for the symplectic family.
PathTable build_paths_symp(const WeightedGraph& g, int base_vertex, Rng& rng, int retries = 32);

// f(g(U)) = id; for good V, f(g(V)) is the label propagated along g(P(U,V)); id elsewhere.
Assignment propagate(const UGInstance& inst, const PathTable& paths, const Matrix& transform);

struct ConesTrial {
  int trial = 0;
  double viol = 0;
};
struct ConesResult {
  Assignment best;
  double best_viol = 1;
  std::vector<ConesTrial> trials;
  double mean_viol = 0;
  double stddev_viol = 0;
};
// Random group element per trial: GL_d for Grassmann, Sp_2d for symplectic.
ConesResult cones_solve(const UGInstance& inst, const PathTable& paths, ConesFamily family, int trials, Rng& rng,
                        int word_len = 64);

// Appendix propagation on J(n,k,k-1); vertices are keyed by their sorted element lists.
Assignment johnson_propagate(const UGInstance& inst, int n, Rng& rng);

std::string family_name(ConesFamily f);

}  // namespace hdx
