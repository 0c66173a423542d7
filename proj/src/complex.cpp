#include "hdx/complex.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace hdx {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

SimplicialComplex SimplicialComplex::from_top_faces(int num_vertices, std::vector<Face> faces,
                                                    std::vector<double> weights) {
  if (faces.size() != weights.size()) throw std::invalid_argument("from_top_faces: size mismatch");
  if (faces.empty()) throw std::invalid_argument("from_top_faces: no faces");
  std::map<Face, double> merged;
  size_t d = faces.front().size();
  for (size_t i = 0; i < faces.size(); ++i) {
    Face f = faces[i];
    std::sort(f.begin(), f.end());
    if (f.size() != d) throw std::invalid_argument("from_top_faces: complex must be pure");
    if (std::adjacent_find(f.begin(), f.end()) != f.end()) throw std::invalid_argument("from_top_faces: repeated vertex");
    for (int v : f)
      if (v < 0 || v >= num_vertices) throw std::invalid_argument("from_top_faces: vertex out of range");
    if (weights[i] < 0) throw std::invalid_argument("from_top_faces: negative weight");
    if (weights[i] > 0) merged[f] += weights[i];
  }
  SimplicialComplex x;
  x.n_ = num_vertices;
  x.d_ = static_cast<int>(d);
  double total = 0;
  for (auto& [f, w] : merged) total += w;
  for (auto& [f, w] : merged) {
    x.top_.push_back(f);
    x.weights_.push_back(w / total);
  }
  double acc = 0;
  for (double w : x.weights_) x.cumulative_.push_back(acc += w);
  x.incidence_.assign(num_vertices, {});
  for (size_t i = 0; i < x.top_.size(); ++i)
    for (int v : x.top_[i]) x.incidence_[v].push_back(static_cast<int>(i));
  return x;
}

SimplicialComplex SimplicialComplex::from_distribution(const PartiteDistribution& mu) {
  if (!mu.is_explicit()) throw std::invalid_argument("from_distribution: requires explicit backing");
  std::map<std::pair<int, Value>, int> ids;
  std::vector<int> coord;
  std::vector<Value> value;
  std::vector<Face> faces;
  std::vector<double> weights;
  for (size_t i = 0; i < mu.size(); ++i) {
    auto row = mu.tuple(i);
    Face f;
    for (int j = 0; j < mu.arity(); ++j) {
      auto key = std::make_pair(mu.labels()[j], row[j]);
      auto [it, inserted] = ids.emplace(key, static_cast<int>(coord.size()));
      if (inserted) {
        coord.push_back(key.first);
        value.push_back(key.second);
      }
      f.push_back(it->second);
    }
    faces.push_back(std::move(f));
    weights.push_back(mu.weight(i));
  }
  SimplicialComplex x = from_top_faces(static_cast<int>(coord.size()), std::move(faces), std::move(weights));
  x.vertex_coord_ = std::move(coord);
  x.vertex_value_ = std::move(value);
  return x;
}

Face SimplicialComplex::sample_top(Rng& rng) const {
  double u = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  size_t i = std::min(static_cast<size_t>(it - cumulative_.begin()), top_.size() - 1);
  return top_[i];
}

Level level(const SimplicialComplex& x, int i) {
  if (i < 0 || i > x.dim()) throw std::invalid_argument("level: size out of range");
  Level lv;
  lv.size = i;
  auto subs = combinations(x.dim(), i);
  double share = 1.0 / binomial(x.dim(), i);
  Face key(i);
  for (size_t t = 0; t < x.num_top(); ++t) {
    const Face& top = x.top(t);
    double w = x.top_weight(t) * share;
    for (const auto& s : subs) {
      for (int j = 0; j < i; ++j) key[j] = top[s[j]];
      auto it = lv.index.find(key);
      if (it == lv.index.end()) {
        lv.index.emplace(key, static_cast<int>(lv.faces.size()));
        lv.faces.push_back(key);
        lv.measure.push_back(w);
      } else {
        lv.measure[it->second] += w;
      }
    }
  }
  return lv;
}

SimplicialComplex link(const SimplicialComplex& x, const Face& face) {
  Face f = face;
  std::sort(f.begin(), f.end());
  std::vector<Face> faces;
  std::vector<double> weights;
  for (size_t t = 0; t < x.num_top(); ++t) {
    const Face& top = x.top(t);
    if (!std::includes(top.begin(), top.end(), f.begin(), f.end())) continue;
    Face rest;
    std::set_difference(top.begin(), top.end(), f.begin(), f.end(), std::back_inserter(rest));
    faces.push_back(std::move(rest));
    weights.push_back(x.top_weight(t));
  }
  if (faces.empty()) throw std::invalid_argument("link: face not in complex");
  if (faces.front().empty()) throw std::invalid_argument("link: face is a top face");
  SimplicialComplex l = SimplicialComplex::from_top_faces(x.num_vertices(), std::move(faces), std::move(weights));
  return l;
}

WeightedGraph one_skeleton(const SimplicialComplex& x) {
  if (x.dim() < 2) throw std::invalid_argument("one_skeleton: needs faces of size >= 2");
  Level l1 = level(x, 1);
  Level l2 = level(x, 2);
  WeightedGraph g(std::vector<std::vector<int>>{{0}});
  for (const auto& f : l1.faces) g.add_vertex({0, {f[0]}});
  for (size_t e = 0; e < l2.faces.size(); ++e) {
    int u = g.find_vertex({0, {l2.faces[e][0]}});
    int v = g.find_vertex({0, {l2.faces[e][1]}});
    g.add_edge_weight(u, v, l2.measure[e]);
  }
  g.finalize();
  return g;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> up_down_operators(const SimplicialComplex& x, int k, int j) {
  if (!(0 < k && k < j && j <= x.dim())) throw std::invalid_argument("up_down_operators: need 0 < k < j <= d");
  Level lk = level(x, k);
  Level lj = level(x, j);
  const Eigen::Index nk = static_cast<Eigen::Index>(lk.faces.size());
  const Eigen::Index nj = static_cast<Eigen::Index>(lj.faces.size());
  Eigen::MatrixXd up = Eigen::MatrixXd::Zero(nj, nk);
  Eigen::MatrixXd down = Eigen::MatrixXd::Zero(nk, nj);
  auto subs = combinations(j, k);
  double c = binomial(j, k);
  Face key(k);
  for (Eigen::Index u = 0; u < nj; ++u) {
    const Face& big = lj.faces[u];
    for (const auto& s : subs) {
      for (int i = 0; i < k; ++i) key[i] = big[s[i]];
      Eigen::Index v = lk.find(key);
      // U averages over the k-subfaces of a j-face; D picks a j-face above with weight mu_j.
      up(u, v) = 1.0 / c;
      down(v, u) = lj.measure[u] / (c * lk.measure[v]);
    }
  }
  return {up, down};
}

WeightedGraph graph_G_r(const SimplicialComplex& x, int r) {
  if (r < 1 || 3 * r > x.dim()) throw std::invalid_argument("graph_G_r: need 3r <= d");
  Level l3 = level(x, 3 * r);
  WeightedGraph g(std::vector<std::vector<int>>{{0}});
  auto first = combinations(3 * r, r);
  double splits = binomial(3 * r, r) * binomial(2 * r, r);
  Face fu(r), fv(r), fw(r);
  for (size_t t = 0; t < l3.faces.size(); ++t) {
    const Face& f = l3.faces[t];
    for (const auto& a : first) {
      std::vector<int> rest;
      for (int i = 0, ai = 0; i < 3 * r; ++i) {
        if (ai < r && a[ai] == i) {
          ++ai;
          continue;
        }
        rest.push_back(i);
      }
      for (int i = 0; i < r; ++i) fu[i] = f[a[i]];
      for (const auto& b : combinations(2 * r, r)) {
        std::vector<bool> inb(2 * r, false);
        for (int i : b) inb[i] = true;
        int vi = 0, wi = 0;
        for (int i = 0; i < 2 * r; ++i) {
          if (inb[i])
            fv[vi++] = f[rest[i]];
          else
            fw[wi++] = f[rest[i]];
        }
        int u = g.add_vertex({0, Tuple(fu.begin(), fu.end())});
        int v = g.add_vertex({0, Tuple(fv.begin(), fv.end())});
        int w = g.add_vertex({0, Tuple(fw.begin(), fw.end())});
        g.add_triangle_weight(u, v, w, l3.measure[t] / splits);
      }
    }
  }
  g.finalize();
  return g;
}

}  // namespace hdx
