#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hdx/partite.hpp"

namespace hdx {

using Face = std::vector<int>;  // sorted vertex ids

struct FaceHash {
  size_t operator()(const Face& f) const {
    uint64_t h = 1469598103934665603ULL;
    for (int v : f) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(v));
      h *= 1099511628211ULL;
    }
    return static_cast<size_t>(h ^ (h >> 31));
  }
};

// Pure complex given by weighted top faces; lower levels carry the induced measures.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;
  static SimplicialComplex from_top_faces(int num_vertices, std::vector<Face> faces, std::vector<double> weights);
  // Vertex per (coordinate, value); top faces are the support tuples.
  static SimplicialComplex from_distribution(const PartiteDistribution& mu);

  int dim() const { return d_; }  // top face size
  int num_vertices() const { return n_; }
  size_t num_top() const { return top_.size(); }
  const Face& top(size_t i) const { return top_[i]; }
  double top_weight(size_t i) const { return weights_[i]; }
  const std::vector<double>& top_weights() const { return weights_; }
  Face sample_top(Rng& rng) const;

  // Coordinate label of a vertex when built from a distribution, else -1.
  int vertex_coordinate(int v) const { return vertex_coord_.empty() ? -1 : vertex_coord_[v]; }
  Value vertex_value(int v) const { return vertex_value_.empty() ? v : vertex_value_[v]; }
  // Indices of top faces containing each vertex.
  const std::vector<std::vector<int>>& incidence() const { return incidence_; }

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<Face> top_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  std::vector<int> vertex_coord_;
  std::vector<Value> vertex_value_;
  std::vector<std::vector<int>> incidence_;
};

// X(i) with the measure mu_i obtained from mu_d by uniform sub-face sampling.
struct Level {
  int size = 0;
  std::vector<Face> faces;
  std::vector<double> measure;
  std::unordered_map<Face, int, FaceHash> index;
  int find(const Face& f) const {
    auto it = index.find(f);
    return it == index.end() ? -1 : it->second;
  }
};

Level level(const SimplicialComplex& x, int i);

// Link of a face: top faces containing it, with the face removed, conditional weights.
SimplicialComplex link(const SimplicialComplex& x, const Face& face);

// Vertices X(1), edges weighted by mu_2.
WeightedGraph one_skeleton(const SimplicialComplex& x);

// (U, D) with U : R^{X(k)} -> R^{X(j)} and D : R^{X(j)} -> R^{X(k)}, rows indexed by
// level(x, j) / level(x, k) order respectively.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> up_down_operators(const SimplicialComplex& x, int k, int j);

// Vertices X(r), edges u,v with u∪v in X(2r); triangles from mu_{3r} split uniformly.
WeightedGraph graph_G_r(const SimplicialComplex& x, int r);

double binomial(int n, int k);
// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> combinations(int n, int k);

}  // namespace hdx
