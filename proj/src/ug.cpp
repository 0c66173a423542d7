#include "hdx/ug.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "hdx/errors.hpp"

namespace hdx {

Permutation Permutation::identity(int m) {
  if (m < 1 || m > kMaxAlphabet) throw std::invalid_argument("Permutation: alphabet size out of range");
  Permutation p;
  p.m_ = static_cast<uint8_t>(m);
  for (int i = 0; i < m; ++i) p.img_[i] = static_cast<uint8_t>(i);
  return p;
}

Permutation Permutation::from_images(const std::vector<int>& images) {
  const int m = static_cast<int>(images.size());
  Permutation p = identity(m);
  std::array<bool, kMaxAlphabet> seen{};
  for (int i = 0; i < m; ++i) {
    if (images[i] < 0 || images[i] >= m || seen[images[i]]) throw std::invalid_argument("Permutation: not a bijection");
    seen[images[i]] = true;
    p.img_[i] = static_cast<uint8_t>(images[i]);
  }
  return p;
}

int factorial(int m) {
  int f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

Permutation Permutation::unrank(int m, int index) {
  if (index < 0 || index >= factorial(m)) throw std::invalid_argument("Permutation::unrank: index out of range");
  std::vector<int> pool(m);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> img;
  for (int i = m; i >= 1; --i) {
    int f = factorial(i - 1);
    int q = index / f;
    index %= f;
    img.push_back(pool[q]);
    pool.erase(pool.begin() + q);
  }
  return from_images(img);
}

Permutation Permutation::random(int m, Rng& rng) { return unrank(m, uniform_int(rng, factorial(m))); }

Permutation Permutation::inverse() const {
  Permutation p = *this;
  for (int i = 0; i < m_; ++i) p.img_[img_[i]] = static_cast<uint8_t>(i);
  return p;
}

bool Permutation::is_identity() const {
  for (int i = 0; i < m_; ++i)
    if (img_[i] != i) return false;
  return true;
}

int Permutation::rank() const {
  int r = 0;
  for (int i = 0; i < m_; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < m_; ++j)
      if (img_[j] < img_[i]) ++smaller;
    r += smaller * factorial(m_ - 1 - i);
  }
  return r;
}

std::string Permutation::str() const {
  std::string s = "[";
  for (int i = 0; i < m_; ++i) {
    if (i) s += ",";
    s += std::to_string(img_[i]);
  }
  return s + "]";
}

Permutation Permutation::operator*(const Permutation& o) const {
  if (m_ != o.m_) throw std::invalid_argument("Permutation: alphabet mismatch");
  Permutation p = *this;
  for (int i = 0; i < m_; ++i) p.img_[i] = img_[o.img_[i]];
  return p;
}

std::vector<Permutation> all_permutations(int m) {
  std::vector<Permutation> out;
  for (int i = 0; i < factorial(m); ++i) out.push_back(Permutation::unrank(m, i));
  return out;
}

UGInstance::UGInstance(WeightedGraph graph, int m, std::vector<Permutation> constraints)
    : graph_(std::move(graph)), m_(m), pi_(std::move(constraints)) {
  if (pi_.size() != graph_.edges().size()) throw std::invalid_argument("UGInstance: one constraint per edge required");
  for (const auto& p : pi_)
    if (p.size() != m_) throw std::invalid_argument("UGInstance: constraint alphabet mismatch");
}

Permutation UGInstance::constraint(int u, int v) const {
  int e = graph_.find_edge(u, v);
  if (e < 0) throw std::invalid_argument("UGInstance::constraint: no such edge");
  return graph_.edges()[e].u == u ? pi_[e] : pi_[e].inverse();
}

bool UGInstance::satisfied(const Assignment& a, int edge) const {
  const Edge& e = graph_.edges()[edge];
  return a[e.u] == pi_[edge] * a[e.v];
}

namespace {

void check_total(const UGInstance& inst, const Assignment& a) {
  if (static_cast<int>(a.size()) != inst.num_vertices()) throw std::invalid_argument("assignment is not total");
}

}  // namespace

double value(const UGInstance& inst, const Assignment& a) {
  check_total(inst, a);
  double total = 0, good = 0;
  const auto& edges = inst.graph().edges();
  for (size_t i = 0; i < edges.size(); ++i) {
    total += edges[i].w;
    if (inst.satisfied(a, static_cast<int>(i))) good += edges[i].w;
  }
  return total > 0 ? good / total : 1.0;
}

double viol(const UGInstance& inst, const Assignment& a) { return 1.0 - value(inst, a); }

bool triangle_consistent(const UGInstance& inst, const Triangle& t) {
  Permutation cyc = inst.constraint(t.a, t.b) * inst.constraint(t.b, t.c) * inst.constraint(t.c, t.a);
  return cyc.is_identity();
}

double incons(const UGInstance& inst) {
  const auto& tris = inst.graph().triangles();
  if (tris.empty()) throw std::invalid_argument("incons: instance has no triangles");
  double total = 0, bad = 0;
  for (const auto& t : tris) {
    total += t.w;
    if (!triangle_consistent(inst, t)) bad += t.w;
  }
  return bad / total;
}

UGInstance plant(const WeightedGraph& graph, const Assignment& g, double delta, Rng& rng) {
  if (static_cast<int>(g.size()) != graph.num_vertices()) throw std::invalid_argument("plant: assignment not total");
  if (graph.edges().empty()) throw std::invalid_argument("plant: graph has no edges");
  const int m = g.empty() ? 1 : g.front().size();
  std::vector<Permutation> pi;
  pi.reserve(graph.edges().size());
  for (const auto& e : graph.edges()) {
    Permutation c = g[e.u] * g[e.v].inverse();
    if (uniform01(rng) < delta) c = Permutation::random(m, rng);
    pi.push_back(c);
  }
  return UGInstance(graph, m, std::move(pi));
}

Assignment random_assignment(int n, int m, Rng& rng) {
  Assignment a;
  a.reserve(n);
  for (int i = 0; i < n; ++i) a.push_back(Permutation::random(m, rng));
  return a;
}

Assignment identity_assignment(int n, int m) { return Assignment(n, Permutation::identity(m)); }

Assignment shift(const Assignment& a, const Permutation& pi) {
  Assignment out;
  out.reserve(a.size());
  for (const auto& x : a) out.push_back(x * pi);
  return out;
}

BruteForceResult brute_force_solve(const UGInstance& inst, double budget) {
  const int n = inst.num_vertices(), m = inst.alphabet();
  BruteForceResult r;
  r.assignment = identity_assignment(n, m);
  if (n == 0) {
    r.value = 1;
    return r;
  }
  double space = std::pow(static_cast<double>(factorial(m)), n - 1);
  if (space > budget) throw BudgetExceeded("brute_force_solve: search space " + std::to_string(space) + " over budget");
  const auto& edges = inst.graph().edges();
  double total = 0;
  for (const auto& e : edges) total += e.w;
  if (total <= 0) {
    r.value = 1;
    return r;
  }
  // Edges closed when their later endpoint is assigned.
  std::vector<std::vector<int>> closing(n);
  std::vector<double> closes_weight(n, 0.0);
  for (size_t i = 0; i < edges.size(); ++i) {
    int later = std::max(edges[i].u, edges[i].v);
    closing[later].push_back(static_cast<int>(i));
    closes_weight[later] += edges[i].w;
  }
  std::vector<double> remaining(n + 1, 0.0);
  for (int v = n - 1; v >= 0; --v) remaining[v] = remaining[v + 1] + closes_weight[v];

  const auto perms = all_permutations(m);
  Assignment cur = identity_assignment(n, m);
  double best = -1;
  Assignment best_a = cur;
  std::function<void(int, double)> dfs = [&](int v, double sat) {
    r.nodes += 1;
    if (v == n) {
      if (sat > best + 1e-12) {
        best = sat;
        best_a = cur;
      }
      return;
    }
    if (sat + remaining[v] <= best + 1e-12) return;
    for (const auto& p : perms) {
      cur[v] = p;
      double add = 0;
      for (int e : closing[v])
        if (inst.satisfied(cur, e)) add += edges[e].w;
      dfs(v + 1, sat + add);
    }
  };
  dfs(1, 0.0);
  r.assignment = best_a;
  r.value = best / total;
  return r;
}

ShiftResult best_shift_weighted(const Assignment& x, const Assignment& y, const std::vector<double>& weights, int m) {
  if (x.size() != y.size() || x.size() != weights.size()) throw std::invalid_argument("best_shift: size mismatch");
  std::vector<double> hist(factorial(m), 0.0);
  double total = 0;
  for (size_t v = 0; v < x.size(); ++v) {
    if (weights[v] <= 0) continue;
    hist[(y[v].inverse() * x[v]).rank()] += weights[v];
    total += weights[v];
  }
  ShiftResult r;
  r.pi = Permutation::identity(m);
  if (total <= 0) return r;
  int best = static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
  r.pi = Permutation::unrank(m, best);
  r.disagreement = std::max(0.0, 1.0 - hist[best] / total);
  return r;
}

ShiftResult best_shift(const Assignment& x, const Assignment& y, const UGInstance& inst, const std::vector<char>& mask) {
  check_total(inst, x);
  check_total(inst, y);
  std::vector<double> w(x.size());
  for (size_t v = 0; v < x.size(); ++v)
    w[v] = (mask.empty() || mask[v]) ? inst.graph().measure(static_cast<int>(v)) : 0.0;
  return best_shift_weighted(x, y, w, inst.alphabet());
}

namespace {

// BFS from root; returns parents (-2 = unvisited) and parent-edge ids.
void bfs(const UGInstance& inst, int root, Assignment& a, std::vector<int>& parent, std::vector<int>& parent_edge) {
  const auto& g = inst.graph();
  std::deque<int> queue{root};
  parent[root] = -1;
  a[root] = Permutation::identity(inst.alphabet());
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (auto [v, e] : g.neighbors(u)) {
      if (parent[v] != -2) continue;
      parent[v] = u;
      parent_edge[v] = e;
      a[v] = inst.constraint(v, u) * a[u];
      queue.push_back(v);
    }
  }
}

int heaviest(const WeightedGraph& g, const std::vector<int>& parent) {
  int best = -1;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (parent[v] == -2 && (best < 0 || g.measure(v) > g.measure(best))) best = v;
  return best;
}

}  // namespace

TreeResult tree_propagate_solve(const UGInstance& inst) {
  const auto& g = inst.graph();
  const int n = g.num_vertices();
  TreeResult r;
  if (n == 0) {
    r.assignment = Assignment{};
    return r;
  }
  std::vector<int> parent(n, -2), parent_edge(n, -1);
  Assignment a = identity_assignment(n, inst.alphabet());
  r.root = heaviest(g, parent);
  bfs(inst, r.root, a, parent, parent_edge);
  for (int v = 0; v < n; ++v)
    if (parent[v] == -2) throw std::invalid_argument("tree_propagate_solve: graph is disconnected");
  for (size_t i = 0; i < g.edges().size(); ++i) {
    if (inst.satisfied(a, static_cast<int>(i))) continue;
    const Edge& e = g.edges()[i];
    FailureWitness w;
    w.u = e.u;
    w.v = e.v;
    // Tree paths to the root, joined at the lowest common ancestor.
    std::vector<int> pu, pv;
    for (int x = e.u; x != -1; x = parent[x]) pu.push_back(x);
    for (int x = e.v; x != -1; x = parent[x]) pv.push_back(x);
    while (pu.size() > 1 && pv.size() > 1 && pu[pu.size() - 2] == pv[pv.size() - 2]) {
      pu.pop_back();
      pv.pop_back();
    }
    w.cycle = pu;
    for (size_t j = pv.size() - 1; j-- > 0;) w.cycle.push_back(pv[j]);
    w.holonomy = a[e.u].inverse() * inst.constraint(i) * a[e.v];
    r.witness = w;
    return r;
  }
  r.assignment = std::move(a);
  return r;
}

Assignment forest_propagate(const UGInstance& inst) {
  const auto& g = inst.graph();
  const int n = g.num_vertices();
  std::vector<int> parent(n, -2), parent_edge(n, -1);
  Assignment a = identity_assignment(n, inst.alphabet());
  for (int root = heaviest(g, parent); root >= 0; root = heaviest(g, parent)) bfs(inst, root, a, parent, parent_edge);
  return a;
}

Restriction restrict_instance(const UGInstance& inst, const std::function<bool(int)>& keep) {
  const auto& g = inst.graph();
  Restriction r;
  r.from_parent.assign(g.num_vertices(), -1);
  WeightedGraph h(g.all_part_coords(), g.universe());
  for (int v = 0; v < g.num_vertices(); ++v)
    if (keep(v)) {
      r.from_parent[v] = h.add_vertex(g.key(v));
      r.to_parent.push_back(v);
    }
  std::vector<Permutation> pi;
  double mass = 0;
  for (size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    int u = r.from_parent[e.u], v = r.from_parent[e.v];
    if (u < 0 || v < 0 || e.w <= 0) continue;
    h.add_edge_weight(u, v, e.w);
    pi.push_back(inst.constraint(static_cast<int>(i)));
    mass += e.w;
  }
  if (mass <= 0) throw std::invalid_argument("restrict_instance: restriction has no edge weight");
  for (const auto& t : g.triangles()) {
    int a = r.from_parent[t.a], b = r.from_parent[t.b], c = r.from_parent[t.c];
    if (a >= 0 && b >= 0 && c >= 0 && t.w > 0) h.add_triangle_weight(a, b, c, t.w);
  }
  h.finalize();
  r.instance = UGInstance(std::move(h), inst.alphabet(), std::move(pi));
  return r;
}

}  // namespace hdx
