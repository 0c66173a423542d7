#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hdx/partite.hpp"
#include "hdx/rng.hpp"

namespace hdx {

inline constexpr int kMaxAlphabet = 8;

// Bijection on {0..m-1}; (a * b)(x) = a(b(x)).
class Permutation {
 public:
  Permutation() = default;
  static Permutation identity(int m);
  static Permutation from_images(const std::vector<int>& images);
  // The index-th permutation of S_m in lexicographic order of image arrays.
  static Permutation unrank(int m, int index);
  static Permutation random(int m, Rng& rng);

  int size() const { return m_; }
  int operator()(int x) const { return img_[x]; }
  std::vector<int> images() const { return {img_.begin(), img_.begin() + m_}; }
  Permutation inverse() const;
  bool is_identity() const;
  int rank() const;  // inverse of unrank
  std::string str() const;

  Permutation operator*(const Permutation& o) const;
  bool operator==(const Permutation& o) const { return m_ == o.m_ && img_ == o.img_; }
  bool operator!=(const Permutation& o) const { return !(*this == o); }
  bool operator<(const Permutation& o) const { return rank() < o.rank(); }

 private:
  uint8_t m_ = 0;
  std::array<uint8_t, kMaxAlphabet> img_{};
};

int factorial(int m);
std::vector<Permutation> all_permutations(int m);

using Assignment = std::vector<Permutation>;

// Affine unique games over S_m on a weighted graph. The constraint of edge e reads
// A(e.u) = pi_e A(e.v); the reverse orientation uses pi_e^{-1}.
class UGInstance {
 public:
  UGInstance() = default;
  UGInstance(WeightedGraph graph, int m, std::vector<Permutation> constraints);

  const WeightedGraph& graph() const { return graph_; }
  int alphabet() const { return m_; }
  int num_vertices() const { return graph_.num_vertices(); }
  const std::vector<Permutation>& constraints() const { return pi_; }
  const Permutation& constraint(int edge) const { return pi_[edge]; }
  // pi_{u,v} for an existing edge; throws otherwise.
  Permutation constraint(int u, int v) const;
  bool satisfied(const Assignment& a, int edge) const;

 private:
  WeightedGraph graph_;
  int m_ = 1;
  std::vector<Permutation> pi_;
};

double value(const UGInstance& inst, const Assignment& a);
double viol(const UGInstance& inst, const Assignment& a);
// Mass of triangles whose constraint product around the cycle is not the identity.
double incons(const UGInstance& inst);
bool triangle_consistent(const UGInstance& inst, const Triangle& t);

// pi_{u,v} = g(u) g(v)^{-1}; each edge independently replaced by a uniform permutation with prob. delta.
UGInstance plant(const WeightedGraph& graph, const Assignment& g, double delta, Rng& rng);
Assignment random_assignment(int n, int m, Rng& rng);
Assignment identity_assignment(int n, int m);
// A(v) -> A(v) * pi for every v.
Assignment shift(const Assignment& a, const Permutation& pi);

struct BruteForceResult {
  Assignment assignment;
  double value = 0;
  double nodes = 0;
};
// Exact maximum, vertex 0 fixed to the identity; ties go to the lexicographically first assignment.
BruteForceResult brute_force_solve(const UGInstance& inst, double budget = 5e7);

struct ShiftResult {
  Permutation pi;
  double disagreement = 0;
};
// argmin_pi Pr_v[X(v) != Y(v) pi] over vertices in `mask` (all when empty), weighted by measure.
ShiftResult best_shift(const Assignment& x, const Assignment& y, const UGInstance& inst,
                       const std::vector<char>& mask = {});
// Same with explicit vertex weights.
ShiftResult best_shift_weighted(const Assignment& x, const Assignment& y, const std::vector<double>& weights, int m);

struct FailureWitness {
  int u = -1;
  int v = -1;
  std::vector<int> cycle;  // u ... v along the tree, closed by edge (u, v)
  Permutation holonomy;    // A(u)^{-1} pi_{u,v} A(v), non-identity
};

struct TreeResult {
  std::optional<Assignment> assignment;
  std::optional<FailureWitness> witness;
  int root = -1;
};
TreeResult tree_propagate_solve(const UGInstance& inst);
// Propagation along a BFS forest, rooted at the heaviest vertex of each component; ignores non-tree edges.
Assignment forest_propagate(const UGInstance& inst);

struct Restriction {
  UGInstance instance;
  std::vector<int> to_parent;  // new vertex -> old vertex
  std::vector<int> from_parent;  // old vertex -> new vertex or -1
};
Restriction restrict_instance(const UGInstance& inst, const std::function<bool(int)>& keep);

}  // namespace hdx
