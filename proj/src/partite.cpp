#include "hdx/partite.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>

namespace hdx {

Value VertexUniverse::intern(const Subspace& s) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_subspace_.find(s);
  if (it != by_subspace_.end()) return it->second;
  Value id = static_cast<Value>(subspaces_.size());
  subspaces_.push_back(s);
  labels_.push_back(s.encode());
  by_subspace_.emplace(s, id);
  return id;
}

Value VertexUniverse::intern_label(const std::string& label) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_label_.find(label);
  if (it != by_label_.end()) return it->second;
  Value id = static_cast<Value>(subspaces_.size());
  subspaces_.push_back(std::nullopt);
  labels_.push_back(label);
  by_label_.emplace(label, id);
  return id;
}

std::optional<Value> VertexUniverse::find(const Subspace& s) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_subspace_.find(s);
  if (it == by_subspace_.end()) return std::nullopt;
  return it->second;
}

const Subspace* VertexUniverse::subspace(Value id) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (id < 0 || static_cast<size_t>(id) >= subspaces_.size() || !subspaces_[id]) return nullptr;
  return &*subspaces_[id];
}

std::string VertexUniverse::label(Value id) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (id < 0 || static_cast<size_t>(id) >= labels_.size()) return std::to_string(id);
  return labels_[id];
}

size_t VertexUniverse::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return subspaces_.size();
}

namespace {

void check_labels(const std::vector<int>& labels) {
  std::vector<int> s = labels;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw std::invalid_argument("duplicate coordinate label");
}

}  // namespace

PartiteDistribution PartiteDistribution::explicit_table(std::vector<int> labels, const std::vector<Tuple>& tuples,
                                                        const std::vector<double>& weights,
                                                        std::shared_ptr<VertexUniverse> universe) {
  check_labels(labels);
  if (tuples.size() != weights.size()) throw std::invalid_argument("explicit_table: size mismatch");
  std::unordered_map<Tuple, double, TupleHash> merged;
  merged.reserve(tuples.size());
  for (size_t i = 0; i < tuples.size(); ++i) {
    if (tuples[i].size() != labels.size()) throw std::invalid_argument("explicit_table: tuple arity mismatch");
    if (weights[i] < 0) throw std::invalid_argument("explicit_table: negative weight");
    if (weights[i] > 0) merged[tuples[i]] += weights[i];
  }
  if (merged.empty()) throw std::invalid_argument("explicit_table: empty support");
  std::vector<std::pair<Tuple, double>> rows(merged.begin(), merged.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0;
  for (auto& r : rows) total += r.second;

  PartiteDistribution d;
  d.labels_ = std::move(labels);
  d.universe_ = std::move(universe);
  d.values_.reserve(rows.size() * d.labels_.size());
  d.weights_.reserve(rows.size());
  d.cumulative_.reserve(rows.size());
  double acc = 0;
  for (auto& r : rows) {
    d.values_.insert(d.values_.end(), r.first.begin(), r.first.end());
    d.weights_.push_back(r.second / total);
    acc += r.second / total;
    d.cumulative_.push_back(acc);
  }
  return d;
}

PartiteDistribution PartiteDistribution::uniform(std::vector<int> labels, const std::vector<Tuple>& tuples,
                                                 std::shared_ptr<VertexUniverse> universe) {
  return explicit_table(std::move(labels), tuples, std::vector<double>(tuples.size(), 1.0), std::move(universe));
}

PartiteDistribution PartiteDistribution::from_sampler(std::vector<int> labels, Sampler sampler,
                                                      std::shared_ptr<VertexUniverse> universe) {
  check_labels(labels);
  PartiteDistribution d;
  d.labels_ = std::move(labels);
  d.sampler_ = std::move(sampler);
  d.universe_ = std::move(universe);
  return d;
}

PartiteDistribution PartiteDistribution::product(std::vector<int> labels, const std::vector<std::vector<double>>& factors) {
  if (labels.size() != factors.size()) throw std::invalid_argument("product: one factor per label");
  std::vector<Tuple> tuples{Tuple{}};
  std::vector<double> weights{1.0};
  for (const auto& f : factors) {
    std::vector<Tuple> nt;
    std::vector<double> nw;
    for (size_t i = 0; i < tuples.size(); ++i)
      for (size_t v = 0; v < f.size(); ++v) {
        if (f[v] <= 0) continue;
        Tuple t = tuples[i];
        t.push_back(static_cast<Value>(v));
        nt.push_back(std::move(t));
        nw.push_back(weights[i] * f[v]);
      }
    tuples = std::move(nt);
    weights = std::move(nw);
  }
  return explicit_table(std::move(labels), tuples, weights);
}

int PartiteDistribution::position(int label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

std::vector<int> PartiteDistribution::positions(const std::vector<int>& labels) const {
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    int p = position(l);
    if (p < 0) throw std::invalid_argument("coordinate " + std::to_string(l) + " not in index set");
    out.push_back(p);
  }
  return out;
}

Tuple PartiteDistribution::tuple_copy(size_t i) const {
  auto t = tuple(i);
  return Tuple(t.begin(), t.end());
}

Tuple PartiteDistribution::sample(Rng& rng) const {
  if (sampler_) return sampler_(rng);
  double u = uniform01(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  size_t i = std::min(static_cast<size_t>(it - cumulative_.begin()), weights_.size() - 1);
  return tuple_copy(i);
}

std::vector<Value> PartiteDistribution::support(int label) const {
  if (sampler_) throw std::invalid_argument("support: requires explicit backing");
  int p = position(label);
  if (p < 0) throw std::invalid_argument("support: unknown coordinate");
  std::vector<Value> vals;
  vals.reserve(size());
  for (size_t i = 0; i < size(); ++i) vals.push_back(tuple(i)[p]);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

double PartiteDistribution::probability(const Tuple& t) const {
  if (sampler_) throw std::invalid_argument("probability: requires explicit backing");
  double total = 0;
  for (size_t i = 0; i < size(); ++i) {
    auto row = tuple(i);
    if (std::equal(row.begin(), row.end(), t.begin(), t.end())) total += weights_[i];
  }
  return total;
}

PartiteDistribution marginal(const PartiteDistribution& mu, const std::vector<int>& s) {
  std::vector<int> labels = s;
  std::sort(labels.begin(), labels.end());
  auto pos = mu.positions(labels);
  if (!mu.is_explicit()) {
    return PartiteDistribution::from_sampler(
        labels,
        [mu, pos](Rng& rng) {
          Tuple full = mu.sample(rng);
          Tuple out;
          out.reserve(pos.size());
          for (int p : pos) out.push_back(full[p]);
          return out;
        },
        mu.universe());
  }
  std::vector<Tuple> tuples;
  tuples.reserve(mu.size());
  for (size_t i = 0; i < mu.size(); ++i) {
    Tuple t;
    t.reserve(pos.size());
    for (int p : pos) t.push_back(mu.tuple(i)[p]);
    tuples.push_back(std::move(t));
  }
  return PartiteDistribution::explicit_table(labels, tuples, mu.weights(), mu.universe());
}

PartiteDistribution condition(const PartiteDistribution& mu, const std::vector<int>& s, const Tuple& a) {
  if (!mu.is_explicit()) throw std::invalid_argument("condition: requires explicit backing");
  if (s.size() != a.size()) throw std::invalid_argument("condition: value arity mismatch");
  if (s.empty()) return mu;
  auto pos = mu.positions(s);
  std::vector<Tuple> tuples;
  std::vector<double> weights;
  for (size_t i = 0; i < mu.size(); ++i) {
    auto row = mu.tuple(i);
    bool ok = true;
    for (size_t j = 0; j < pos.size() && ok; ++j) ok = row[pos[j]] == a[j];
    if (!ok) continue;
    tuples.push_back(mu.tuple_copy(i));
    weights.push_back(mu.weight(i));
  }
  if (tuples.empty()) throw std::invalid_argument("condition: value outside the support");
  return PartiteDistribution::explicit_table(mu.labels(), tuples, weights, mu.universe());
}

WeightedGraph::WeightedGraph(std::vector<std::vector<int>> part_coords, std::shared_ptr<VertexUniverse> universe)
    : part_coords_(std::move(part_coords)), universe_(std::move(universe)) {}

int WeightedGraph::add_vertex(const VertexKey& key) {
  auto it = key_index_.find(key);
  if (it != key_index_.end()) return it->second;
  int id = static_cast<int>(keys_.size());
  keys_.push_back(key);
  key_index_.emplace(key, id);
  return id;
}

void WeightedGraph::add_edge_weight(int u, int v, double w) {
  if (u == v) throw std::invalid_argument("add_edge_weight: self loop");
  auto [it, inserted] = edge_index_.emplace(pair_key(u, v), static_cast<int>(edges_.size()));
  if (inserted)
    edges_.push_back({u, v, w});
  else
    edges_[it->second].w += w;
}

void WeightedGraph::add_triangle_weight(int a, int b, int c, double w) {
  int s[3] = {a, b, c};
  std::sort(s, s + 3);
  if (s[0] == s[1] || s[1] == s[2]) throw std::invalid_argument("add_triangle_weight: repeated vertex");
  uint64_t key = (static_cast<uint64_t>(s[0]) << 42) | (static_cast<uint64_t>(s[1]) << 21) | static_cast<uint64_t>(s[2]);
  auto [it, inserted] = triangle_index_.emplace(key, static_cast<int>(triangles_.size()));
  if (inserted)
    triangles_.push_back({a, b, c, w});
  else
    triangles_[it->second].w += w;
}

void WeightedGraph::finalize() {
  if (!triangles_.empty()) {
    double tw = 0;
    for (auto& t : triangles_) tw += t.w;
    for (auto& t : triangles_) t.w /= tw;
    if (edges_.empty())
      for (auto& t : triangles_) {
        add_edge_weight(t.a, t.b, t.w / 3);
        add_edge_weight(t.b, t.c, t.w / 3);
        add_edge_weight(t.a, t.c, t.w / 3);
      }
  }
  double ew = 0;
  for (auto& e : edges_) ew += e.w;
  if (ew > 0)
    for (auto& e : edges_) e.w /= ew;
  measure_.assign(keys_.size(), 0.0);
  adj_.assign(keys_.size(), {});
  for (size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    measure_[e.u] += e.w / 2;
    measure_[e.v] += e.w / 2;
    adj_[e.u].emplace_back(e.v, static_cast<int>(i));
    adj_[e.v].emplace_back(e.u, static_cast<int>(i));
  }
}

int WeightedGraph::find_vertex(const VertexKey& key) const {
  auto it = key_index_.find(key);
  return it == key_index_.end() ? -1 : it->second;
}

std::vector<int> WeightedGraph::vertices_in_part(int part) const {
  std::vector<int> out;
  for (int v = 0; v < num_vertices(); ++v)
    if (keys_[v].part == part) out.push_back(v);
  return out;
}

int WeightedGraph::find_edge(int u, int v) const {
  auto it = edge_index_.find(pair_key(u, v));
  return it == edge_index_.end() ? -1 : it->second;
}

std::string WeightedGraph::vertex_name(int v) const {
  const VertexKey& k = keys_[v];
  std::string s = std::to_string(k.part) + "|";
  for (size_t i = 0; i < k.values.size(); ++i) {
    if (i) s += ",";
    s += universe_ ? universe_->label(k.values[i]) : std::to_string(k.values[i]);
  }
  return s;
}

namespace {

void check_disjoint(const std::vector<std::vector<int>>& parts) {
  std::vector<int> all;
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw std::invalid_argument("coordinate sets must be pairwise disjoint");
}

Tuple project(std::span<const Value> row, const std::vector<int>& pos) {
  Tuple t;
  t.reserve(pos.size());
  for (int p : pos) t.push_back(row[p]);
  return t;
}

}  // namespace

WeightedGraph bipartite_graph(const PartiteDistribution& mu, const std::vector<int>& left, const std::vector<int>& right) {
  if (left.empty() || right.empty()) throw std::invalid_argument("bipartite_graph: parts must be nonempty");
  check_disjoint({left, right});
  if (!mu.is_explicit()) throw std::invalid_argument("bipartite_graph: requires explicit backing");
  auto lp = mu.positions(left), rp = mu.positions(right);
  WeightedGraph g({left, right}, mu.universe());
  for (size_t i = 0; i < mu.size(); ++i) {
    int u = g.add_vertex({0, project(mu.tuple(i), lp)});
    int v = g.add_vertex({1, project(mu.tuple(i), rp)});
    g.add_edge_weight(u, v, mu.weight(i));
  }
  g.finalize();
  return g;
}

WeightedGraph tripartite_graph(const PartiteDistribution& mu, const std::vector<int>& s1, const std::vector<int>& s2,
                               const std::vector<int>& s3) {
  check_disjoint({s1, s2, s3});
  if (!mu.is_explicit()) throw std::invalid_argument("tripartite_graph: requires explicit backing");
  std::vector<std::vector<int>> parts{s1, s2, s3};
  std::vector<std::vector<int>> pos;
  for (const auto& s : parts) pos.push_back(mu.positions(s));
  WeightedGraph g(parts, mu.universe());
  for (size_t i = 0; i < mu.size(); ++i) {
    int v[3];
    for (int p = 0; p < 3; ++p) v[p] = g.add_vertex({p, project(mu.tuple(i), pos[p])});
    g.add_triangle_weight(v[0], v[1], v[2], mu.weight(i));
  }
  g.finalize();
  return g;
}

namespace {

void subsets(const std::vector<int>& items, int r, size_t start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == r) {
    out.push_back(cur);
    return;
  }
  for (size_t i = start; i < items.size(); ++i) {
    cur.push_back(items[i]);
    subsets(items, r, i + 1, cur, out);
    cur.pop_back();
  }
}

bool disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) return false;
  return true;
}

}  // namespace

WeightedGraph partite_graph_G_r(const PartiteDistribution& mu, int r, int sample_budget, Rng& rng) {
  if (r < 1 || 3 * r > mu.arity()) throw std::invalid_argument("partite_graph_G_r: need 1 <= r <= |I|/3");
  std::vector<int> labels = mu.labels();
  std::sort(labels.begin(), labels.end());
  std::vector<std::vector<int>> parts;
  std::vector<int> cur;
  subsets(labels, r, 0, cur, parts);
  std::unordered_map<std::string, int> part_index;
  auto part_key = [](const std::vector<int>& s) {
    std::string k;
    for (int x : s) k += std::to_string(x) + ",";
    return k;
  };
  for (size_t i = 0; i < parts.size(); ++i) part_index[part_key(parts[i])] = static_cast<int>(i);
  WeightedGraph g(parts, mu.universe());
  std::vector<std::vector<int>> pos;
  for (const auto& s : parts) pos.push_back(mu.positions(s));

  auto add = [&](const int pi[3], std::span<const Value> row, double w) {
    int v[3];
    for (int j = 0; j < 3; ++j) v[j] = g.add_vertex({pi[j], project(row, pos[pi[j]])});
    g.add_triangle_weight(v[0], v[1], v[2], w);
  };

  if (sample_budget == 0) {
    if (!mu.is_explicit()) throw std::invalid_argument("partite_graph_G_r: exact mode requires explicit backing");
    std::vector<std::array<int, 3>> triples;
    for (size_t a = 0; a < parts.size(); ++a)
      for (size_t b = a + 1; b < parts.size(); ++b) {
        if (!disjoint(parts[a], parts[b])) continue;
        for (size_t c = b + 1; c < parts.size(); ++c)
          if (disjoint(parts[a], parts[c]) && disjoint(parts[b], parts[c]))
            triples.push_back({static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)});
      }
    for (const auto& t : triples)
      for (size_t i = 0; i < mu.size(); ++i) add(t.data(), mu.tuple(i), mu.weight(i) / static_cast<double>(triples.size()));
  } else {
    for (int s = 0; s < sample_budget; ++s) {
      std::vector<int> shuffled = labels;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      int pi[3];
      for (int j = 0; j < 3; ++j) {
        std::vector<int> part(shuffled.begin() + j * r, shuffled.begin() + (j + 1) * r);
        std::sort(part.begin(), part.end());
        pi[j] = part_index.at(part_key(part));
      }
      Tuple full = mu.sample(rng);
      add(pi, std::span<const Value>(full), 1.0);
    }
  }
  g.finalize();
  return g;
}

}  // namespace hdx
