#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdx/gf.hpp"
#include "hdx/rng.hpp"

namespace hdx {

using Value = int32_t;
using Tuple = std::vector<Value>;

// Interns coordinate values. A value is either a subspace or an opaque label.
class VertexUniverse {
 public:
  Value intern(const Subspace& s);
  Value intern_label(const std::string& label);
  std::optional<Value> find(const Subspace& s) const;
  // nullptr for opaque labels.
  const Subspace* subspace(Value id) const;
  std::string label(Value id) const;
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::deque<std::optional<Subspace>> subspaces_;
  std::deque<std::string> labels_;
  std::unordered_map<Subspace, Value, SubspaceHash> by_subspace_;
  std::unordered_map<std::string, Value> by_label_;
};

struct TupleHash {
  size_t operator()(const Tuple& t) const {
    uint64_t h = 1469598103934665603ULL;
    for (Value v : t) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(v));
      h *= 1099511628211ULL;
    }
    return static_cast<size_t>(h ^ (h >> 29));
  }
};

// Distribution over prod_{i in I} X_i, coordinates labelled by integers.
class PartiteDistribution {
 public:
  using Sampler = std::function<Tuple(Rng&)>;

  PartiteDistribution() = default;
  // Merges duplicate tuples, drops zero weights and normalizes.
  static PartiteDistribution explicit_table(std::vector<int> labels, const std::vector<Tuple>& tuples,
                                            const std::vector<double>& weights,
                                            std::shared_ptr<VertexUniverse> universe = nullptr);
  static PartiteDistribution uniform(std::vector<int> labels, const std::vector<Tuple>& tuples,
                                     std::shared_ptr<VertexUniverse> universe = nullptr);
  static PartiteDistribution from_sampler(std::vector<int> labels, Sampler sampler,
                                          std::shared_ptr<VertexUniverse> universe = nullptr);
  // Independent coordinates with the given value weights; values are 0..len-1.
  static PartiteDistribution product(std::vector<int> labels, const std::vector<std::vector<double>>& factors);

  bool is_explicit() const { return !sampler_; }
  const std::vector<int>& labels() const { return labels_; }
  int arity() const { return static_cast<int>(labels_.size()); }
  int position(int label) const;
  std::vector<int> positions(const std::vector<int>& labels) const;

  size_t size() const { return weights_.size(); }
  std::span<const Value> tuple(size_t i) const {
    return {values_.data() + i * labels_.size(), labels_.size()};
  }
  Tuple tuple_copy(size_t i) const;
  double weight(size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::shared_ptr<VertexUniverse>& universe() const { return universe_; }

  Tuple sample(Rng& rng) const;
  // Sorted distinct values of one coordinate.
  std::vector<Value> support(int label) const;
  double probability(const Tuple& t) const;

 private:
  std::vector<int> labels_;
  std::vector<Value> values_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  Sampler sampler_;
  std::shared_ptr<VertexUniverse> universe_;
};

PartiteDistribution marginal(const PartiteDistribution& mu, const std::vector<int>& s);
PartiteDistribution condition(const PartiteDistribution& mu, const std::vector<int>& s, const Tuple& a);

struct VertexKey {
  int part = 0;
  Tuple values;
  bool operator==(const VertexKey& o) const { return part == o.part && values == o.values; }
};

struct VertexKeyHash {
  size_t operator()(const VertexKey& k) const { return TupleHash{}(k.values) * 31 + static_cast<size_t>(k.part); }
};

struct Edge {
  int u = 0;
  int v = 0;
  double w = 0;
};

struct Triangle {
  int a = 0;
  int b = 0;
  int c = 0;
  double w = 0;
};

// Multipartite weighted graph with an optional triangle distribution.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(std::vector<std::vector<int>> part_coords,
                         std::shared_ptr<VertexUniverse> universe = nullptr);

  int add_vertex(const VertexKey& key);
  void add_edge_weight(int u, int v, double w);
  void add_triangle_weight(int a, int b, int c, double w);
  // Normalizes weights; if triangles exist and edges were not given, edges are the
  // 1/3-mixture of the triangle projections. Computes vertex measure and adjacency.
  void finalize();

  int num_parts() const { return static_cast<int>(part_coords_.size()); }
  const std::vector<int>& part_coords(int part) const { return part_coords_[part]; }
  const std::vector<std::vector<int>>& all_part_coords() const { return part_coords_; }
  int num_vertices() const { return static_cast<int>(keys_.size()); }
  const VertexKey& key(int v) const { return keys_[v]; }
  int part_of(int v) const { return keys_[v].part; }
  int find_vertex(const VertexKey& key) const;
  std::vector<int> vertices_in_part(int part) const;

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  int find_edge(int u, int v) const;
  // Stationary measure: half the incident edge weight.
  double measure(int v) const { return measure_[v]; }
  const std::vector<double>& measures() const { return measure_; }
  // (neighbor, edge index) lists.
  const std::vector<std::pair<int, int>>& neighbors(int v) const { return adj_[v]; }

  const std::shared_ptr<VertexUniverse>& universe() const { return universe_; }
  // Text form of a vertex: part and value labels.
  std::string vertex_name(int v) const;

 private:
  static uint64_t pair_key(int u, int v) {
    if (u > v) std::swap(u, v);
    return (static_cast<uint64_t>(static_cast<uint32_t>(u)) << 32) | static_cast<uint32_t>(v);
  }

  std::vector<std::vector<int>> part_coords_;
  std::shared_ptr<VertexUniverse> universe_;
  std::vector<VertexKey> keys_;
  std::unordered_map<VertexKey, int, VertexKeyHash> key_index_;
  std::vector<Edge> edges_;
  std::unordered_map<uint64_t, int> edge_index_;
  std::vector<Triangle> triangles_;
  std::unordered_map<uint64_t, int> triangle_index_;
  std::vector<double> measure_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
};

WeightedGraph bipartite_graph(const PartiteDistribution& mu, const std::vector<int>& left,
                              const std::vector<int>& right);
WeightedGraph tripartite_graph(const PartiteDistribution& mu, const std::vector<int>& s1,
                               const std::vector<int>& s2, const std::vector<int>& s3);

// Vertices (S, x_S) for every r-subset S of the coordinates. sample_budget == 0 gives
// the exact triangle distribution; otherwise a sampled multiset of that many triangles.
WeightedGraph partite_graph_G_r(const PartiteDistribution& mu, int r, int sample_budget, Rng& rng);

}  // namespace hdx
