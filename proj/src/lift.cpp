#include "hdx/lift.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hdx/errors.hpp"

namespace hdx {

std::string lift_mode_name(LiftMode m) { return m == LiftMode::Easy ? "easy" : "exp"; }

Assignment SolutionList::at(const Permutation& pi) const {
  Assignment out(base.size());
  for (size_t v = 0; v < base.size(); ++v) out[v] = base[v] * pi;
  return out;
}

std::string PivotChoice::describe(const std::array<std::vector<int>, 3>& labels) const {
  std::ostringstream os;
  for (int i = 0; i < 3; ++i) {
    os << (i ? " " : "") << "S" << i + 1 << "={";
    for (size_t j = 0; j < sets[i].size(); ++j)
      os << (j ? "," : "") << labels[sets[i][j].first][sets[i][j].second];
    os << "}";
  }
  return os.str();
}

PivotChoice choose_pivots(const std::array<std::vector<int>, 3>& labels,
                          const std::array<std::vector<int>, 3>& free_positions, LiftMode mode, int k) {
  PivotChoice pc;
  if (mode == LiftMode::Exp && k >= 1) {
    struct Item {
      int label, part, pos;
    };
    std::vector<Item> items;
    for (int p = 0; p < 3; ++p)
      for (int pos : free_positions[p]) items.push_back({labels[p][pos], p, pos});
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.label < b.label; });
    size_t idx = 0;
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      int counts[3] = {0, 0, 0};
      while (idx < items.size() && (counts[0] < k || counts[1] < k || counts[2] < k)) {
        const Item& it = items[idx++];
        if (counts[it.part] < k) {
          pc.sets[i].push_back({it.part, it.pos});
          ++counts[it.part];
        }
      }
      ok = counts[0] == k && counts[1] == k && counts[2] == k;
    }
    if (ok) {
      pc.mode = LiftMode::Exp;
      return pc;
    }
    pc = PivotChoice{};
  }
  pc.mode = LiftMode::Easy;
  for (int p = 0; p < 3; ++p) {
    if (free_positions[p].empty()) continue;
    int best = free_positions[p][0];
    for (int pos : free_positions[p])
      if (labels[p][pos] < labels[p][best]) best = pos;
    pc.sets[p].push_back({p, best});
  }
  return pc;
}

namespace {

constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};

int pair_index(int i, int k) {
  if (i > k) std::swap(i, k);
  return i == 0 ? (k == 1 ? 0 : 1) : 2;
}

// Triangles of a tripartite instance, vertices ordered by slot.
struct TriSystem {
  const UGInstance* inst = nullptr;
  std::array<std::vector<int>, 3> labels;
  std::vector<std::array<int, 3>> tv;
  std::vector<double> tw;
  std::vector<std::array<Permutation, 3>> tpi;  // A(v_i) = pi A(v_j) for kPairs[p]

  const Tuple& values(int v) const { return inst->graph().key(v).values; }
  // pi with A(v_i) = pi A(v_j) in triangle t.
  Permutation rel(int t, int i, int j) const {
    const Permutation& p = tpi[t][pair_index(i, j)];
    return i < j ? p : p.inverse();
  }
};

TriSystem make_system(const UGInstance& inst, const std::array<int, 3>& parts,
                      const std::vector<int>* triangle_subset = nullptr) {
  const WeightedGraph& g = inst.graph();
  TriSystem sys;
  sys.inst = &inst;
  for (int i = 0; i < 3; ++i) sys.labels[i] = g.part_coords(parts[i]);
  auto add = [&](const Triangle& t) {
    std::array<int, 3> v{-1, -1, -1};
    for (int x : {t.a, t.b, t.c}) {
      int p = g.part_of(x);
      for (int i = 0; i < 3; ++i)
        if (parts[i] == p) v[i] = x;
    }
    if (v[0] < 0 || v[1] < 0 || v[2] < 0 || t.w <= 0) return;
    std::array<Permutation, 3> pi;
    for (int p = 0; p < 3; ++p) pi[p] = inst.constraint(v[kPairs[p][0]], v[kPairs[p][1]]);
    sys.tv.push_back(v);
    sys.tw.push_back(t.w);
    sys.tpi.push_back(pi);
  };
  if (triangle_subset) {
    for (int i : *triangle_subset) add(g.triangles()[i]);
  } else {
    for (const auto& t : g.triangles()) add(t);
  }
  if (sys.tv.empty()) throw std::invalid_argument("lift: instance has no triangles across the three parts");
  return sys;
}

struct Sol {
  std::vector<int> verts;  // sorted root ids
  std::vector<Permutation> lab;

  int find(int v) const {
    auto it = std::lower_bound(verts.begin(), verts.end(), v);
    return it != verts.end() && *it == v ? static_cast<int>(it - verts.begin()) : -1;
  }
  const Permutation& at(int v) const {
    int i = find(v);
    if (i < 0) throw std::logic_error("lift: vertex outside a restricted solution");
    return lab[i];
  }
};

struct Node {
  std::vector<int> tris;
  std::array<std::vector<int>, 3> free;
};

// Small weighted histogram over permutations.
struct PermHistogram {
  std::vector<std::pair<Permutation, double>> bins;
  void add(const Permutation& p, double w) {
    for (auto& b : bins)
      if (b.first == p) {
        b.second += w;
        return;
      }
    bins.push_back({p, w});
  }
  // Heaviest bin; ties go to the smaller rank.
  std::pair<Permutation, double> best() const {
    std::pair<Permutation, double> out = bins.front();
    for (const auto& b : bins)
      if (b.second > out.second + 1e-15 || (std::abs(b.second - out.second) <= 1e-15 && b.first < out.first)) out = b;
    return out;
  }
  double total() const {
    double s = 0;
    for (const auto& b : bins) s += b.second;
    return s;
  }
};

void polish(const UGInstance& h, Assignment& a, int rounds) {
  const WeightedGraph& g = h.graph();
  double best = viol(h, a);
  Assignment best_a = a;
  for (int r = 0; r < rounds && best > 0; ++r) {
    bool changed = false;
    for (int v = 0; v < g.num_vertices(); ++v) {
      PermHistogram hist;
      for (auto [w, e] : g.neighbors(v)) {
        const Edge& ed = g.edges()[e];
        Permutation c = ed.u == v ? h.constraint(e) : h.constraint(e).inverse();
        hist.add(c * a[w], ed.w);
      }
      if (hist.bins.empty()) continue;
      auto [p, wt] = hist.best();
      double cur = 0;
      for (const auto& b : hist.bins)
        if (b.first == a[v]) cur = b.second;
      if (p != a[v] && wt > cur + 1e-15) {
        a[v] = p;
        changed = true;
      }
    }
    double now = viol(h, a);
    if (now < best) {
      best = now;
      best_a = a;
    }
    if (!changed) break;
  }
  a = std::move(best_a);
}

enum class BaseKind { Brute, Callback, Propagation };

struct Solver {
  const TriSystem& sys;
  const LiftParams& params;
  int m;
  std::vector<LevelReport> levels;
  EventStats top_events;
  bool top_recursive = false;
  LiftMode top_mode = LiftMode::Easy;
  long nodes = 0;

  LevelReport& level(int depth) {
    while (static_cast<int>(levels.size()) <= depth) {
      levels.emplace_back();
      levels.back().depth = static_cast<int>(levels.size()) - 1;
    }
    return levels[depth];
  }

  std::vector<int> node_vertices(const Node& node) const {
    std::vector<int> vs;
    vs.reserve(node.tris.size() * 3);
    for (int t : node.tris)
      for (int v : sys.tv[t]) vs.push_back(v);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
  }

  double node_viol(const Node& node, const Sol& x) const {
    double bad = 0, total = 0;
    for (int t : node.tris) {
      total += sys.tw[t];
      for (int p = 0; p < 3; ++p) {
        int i = kPairs[p][0], j = kPairs[p][1];
        if (x.at(sys.tv[t][i]) != sys.tpi[t][p] * x.at(sys.tv[t][j])) bad += sys.tw[t] / 3;
      }
    }
    return total > 0 ? bad / total : 0;
  }

  UGInstance node_instance(const Node& node, const std::vector<int>& verts) const {
    WeightedGraph g(std::vector<std::vector<int>>(sys.labels.begin(), sys.labels.end()), sys.inst->graph().universe());
    std::vector<int> slot_of(verts.size(), -1);
    for (int t : node.tris)
      for (int i = 0; i < 3; ++i) {
        int li = static_cast<int>(std::lower_bound(verts.begin(), verts.end(), sys.tv[t][i]) - verts.begin());
        slot_of[li] = i;
      }
    for (size_t i = 0; i < verts.size(); ++i) g.add_vertex({slot_of[i], sys.values(verts[i])});
    auto local = [&](int v) {
      return static_cast<int>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
    };
    for (int t : node.tris) g.add_triangle_weight(local(sys.tv[t][0]), local(sys.tv[t][1]), local(sys.tv[t][2]), sys.tw[t]);
    g.finalize();
    std::vector<Permutation> pi;
    pi.reserve(g.edges().size());
    for (const auto& e : g.edges()) pi.push_back(sys.inst->constraint(verts[e.u], verts[e.v]));
    return UGInstance(std::move(g), m, std::move(pi));
  }

  Assignment base_solve(const UGInstance& h, BaseKind* kind) const {
    if (h.num_vertices() <= params.base_threshold && m <= params.base_max_m) {
      try {
        if (kind) *kind = BaseKind::Brute;
        return brute_force_solve(h, params.brute_budget).assignment;
      } catch (const BudgetExceeded&) {
      }
    }
    if (params.base_solver) {
      if (auto a = params.base_solver(h)) {
        if (kind) *kind = BaseKind::Callback;
        return *a;
      }
    }
    if (kind) *kind = BaseKind::Propagation;
    Assignment a = forest_propagate(h);
    polish(h, a, params.polish_rounds);
    return a;
  }

  Sol apex(const Node& node, int slot) const {
    Sol s;
    s.verts = node_vertices(node);
    s.lab.assign(s.verts.size(), Permutation::identity(m));
    int top = sys.tv[node.tris.front()][slot];
    for (int t : node.tris) {
      if (sys.tv[t][slot] != top) throw std::logic_error("lift: apex part is not a single vertex");
      for (int j = 0; j < 3; ++j)
        if (j != slot) s.lab[s.find(sys.tv[t][j])] = sys.rel(t, j, slot);
    }
    return s;
  }

  Sol solve(const Node& node, int depth, Rng& rng) {
    if (depth > params.max_depth) throw BudgetExceeded("lift: recursion depth exceeded");
    if (node.tris.empty()) throw std::invalid_argument("lift: empty conditional support");
    ++nodes;
    LevelReport& lr = level(depth);
    ++lr.nodes;
    for (int i = 0; i < 3; ++i)
      if (node.free[i].empty()) {
        ++lr.apex_cases;
        return apex(node, i);
      }
    std::vector<int> verts = node_vertices(node);
    auto from_local = [&](const Assignment& a) {
      Sol s;
      s.verts = verts;
      s.lab = a;
      return s;
    };
    if (static_cast<int>(verts.size()) <= params.base_threshold && m <= params.base_max_m) {
      try {
        UGInstance h = node_instance(node, verts);
        Sol s = from_local(brute_force_solve(h, params.brute_budget).assignment);
        ++lr.brute_cases;
        return s;
      } catch (const BudgetExceeded&) {
      }
    }
    PivotChoice pc = choose_pivots(sys.labels, node.free, params.mode, params.block_k);
    size_t pivot_total = 0, free_total = 0;
    for (int i = 0; i < 3; ++i) {
      pivot_total += pc.sets[i].size();
      free_total += node.free[i].size();
    }
    if (pivot_total >= free_total) {
      ++lr.base_cases;
      return from_local(base_solve(node_instance(node, verts), nullptr));
    }
    ++lr.recursive_cases;
    if (lr.pivots.empty()) lr.pivots = pc.describe(sys.labels);
    if (depth == 0) {
      top_recursive = true;
      top_mode = pc.mode;
    }
    return recurse(node, pc, depth, rng, verts);
  }

  Sol recurse(const Node& node, const PivotChoice& pc, int depth, Rng& rng, const std::vector<int>& verts) {
    const size_t nt = node.tris.size();
    // Restriction index of each node triangle under each pivot set.
    std::array<std::vector<int>, 3> tkey;
    std::array<std::vector<Tuple>, 3> rkeys;
    std::array<std::vector<std::vector<int>>, 3> groups;
    std::array<std::vector<double>, 3> rmass;
    double total = 0;
    for (int t : node.tris) total += sys.tw[t];
    for (int i = 0; i < 3; ++i) {
      std::map<Tuple, int> ids;
      tkey[i].resize(nt);
      Tuple key(pc.sets[i].size());
      for (size_t a = 0; a < nt; ++a) {
        int t = node.tris[a];
        for (size_t c = 0; c < pc.sets[i].size(); ++c) {
          auto [part, pos] = pc.sets[i][c];
          key[c] = sys.values(sys.tv[t][part])[pos];
        }
        auto [it, fresh] = ids.emplace(key, static_cast<int>(rkeys[i].size()));
        if (fresh) {
          rkeys[i].push_back(key);
          groups[i].emplace_back();
          rmass[i].push_back(0);
        }
        tkey[i][a] = it->second;
        groups[i][it->second].push_back(t);
        rmass[i][it->second] += sys.tw[t];
      }
    }

    // Restricted solves.
    std::array<std::vector<Sol>, 3> x;
    double sub_viol = 0;
    long restrictions = 0;
    for (int i = 0; i < 3; ++i) {
      std::array<std::vector<int>, 3> child_free = node.free;
      for (auto [part, pos] : pc.sets[i]) {
        auto& f = child_free[part];
        f.erase(std::remove(f.begin(), f.end(), pos), f.end());
      }
      for (size_t r = 0; r < groups[i].size(); ++r) {
        Node child{groups[i][r], child_free};
        Rng child_rng = split(rng);
        x[i].push_back(solve(child, depth + 1, child_rng));
        sub_viol += rmass[i][r] * node_viol(child, x[i].back());
        ++restrictions;
      }
    }
    sub_viol /= 3 * total;

    // Shifts pi_{a,b} with X_a(v) ~ X_b(v) pi_{a,b} on G_{a,b}.
    std::array<std::map<std::pair<int, int>, PermHistogram>, 3> hist;
    for (size_t a = 0; a < nt; ++a) {
      int t = node.tris[a];
      for (int p = 0; p < 3; ++p) {
        int i = kPairs[p][0], k = kPairs[p][1];
        auto& h = hist[p][{tkey[i][a], tkey[k][a]}];
        const Sol& xa = x[i][tkey[i][a]];
        const Sol& xb = x[k][tkey[k][a]];
        for (int v : sys.tv[t]) h.add(xb.at(v).inverse() * xa.at(v), sys.tw[t] / 3);
      }
    }
    std::array<std::map<std::pair<int, int>, Permutation>, 3> align;
    double disagreement = 0, align_mass = 0;
    for (int p = 0; p < 3; ++p)
      for (auto& [key, h] : hist[p]) {
        auto [pi, w] = h.best();
        double tot = h.total();
        align[p][key] = pi;
        disagreement += tot - w;
        align_mass += tot;
      }

    // Restriction instance H with constraints pi_{a,b}^{-1}.
    std::vector<std::vector<int>> hparts(3);
    for (int i = 0; i < 3; ++i)
      for (auto [part, pos] : pc.sets[i]) hparts[i].push_back(sys.labels[part][pos]);
    WeightedGraph hg(hparts);
    std::array<std::vector<int>, 3> hid;
    std::vector<std::pair<int, int>> hback;
    for (int i = 0; i < 3; ++i)
      for (size_t r = 0; r < rkeys[i].size(); ++r) {
        hid[i].push_back(hg.add_vertex({i, rkeys[i][r]}));
        hback.push_back({i, static_cast<int>(r)});
      }
    for (size_t a = 0; a < nt; ++a)
      hg.add_triangle_weight(hid[0][tkey[0][a]], hid[1][tkey[1][a]], hid[2][tkey[2][a]], sys.tw[node.tris[a]]);
    hg.finalize();
    std::vector<Permutation> hpi;
    for (const auto& e : hg.edges()) {
      auto [iu, ru] = hback[e.u];
      auto [iv, rv] = hback[e.v];
      if (iu < iv)
        hpi.push_back(align[pair_index(iu, iv)].at({ru, rv}).inverse());
      else
        hpi.push_back(align[pair_index(iu, iv)].at({rv, ru}));
    }
    UGInstance h(std::move(hg), m, std::move(hpi));
    const double h_incons = incons(h);

    // Not-bad restriction triangles must be consistent.
    long not_bad = 0, not_bad_inconsistent = 0;
    {
      std::map<std::array<int, 3>, std::vector<size_t>> by_triple;
      for (size_t a = 0; a < nt; ++a) by_triple[{tkey[0][a], tkey[1][a], tkey[2][a]}].push_back(a);
      for (const auto& [r, members] : by_triple) {
        double mass = 0, bad[3] = {0, 0, 0};
        for (size_t a : members) {
          int t = node.tris[a];
          mass += sys.tw[t];
          for (int p = 0; p < 3; ++p) {
            int i = kPairs[p][0], k = kPairs[p][1];
            const Permutation& pi = align[p].at({r[i], r[k]});
            for (int v : sys.tv[t])
              if (x[i][r[i]].at(v) != x[k][r[k]].at(v) * pi) bad[p] += sys.tw[t] / 3;
          }
        }
        if (bad[0] > 0.01 * mass || bad[1] > 0.01 * mass || bad[2] > 0.01 * mass) continue;
        ++not_bad;
        Permutation p12 = align[0].at({r[0], r[1]});
        Permutation p13 = align[1].at({r[0], r[2]});
        Permutation p23 = align[2].at({r[1], r[2]});
        if (!(p23 * p12 * p13.inverse()).is_identity()) ++not_bad_inconsistent;
      }
    }

    Assignment a_local = base_solve(h, nullptr);
    const double h_viol = viol(h, a_local);
    auto a_of = [&](int i, int r) -> const Permutation& { return a_local[hid[i][r]]; };

    // Lift.
    Sol b;
    b.verts = verts;
    b.lab.assign(verts.size(), Permutation::identity(m));
    const bool easy = pc.mode == LiftMode::Easy;
    if (easy) {
      for (size_t a = 0; a < nt; ++a)
        for (int j = 0; j < 3; ++j) {
          int v = sys.tv[node.tris[a]][j];
          int li = b.find(v);
          b.lab[li] = x[j][tkey[j][a]].at(v) * a_of(j, tkey[j][a]);
        }
    } else {
      std::vector<std::vector<std::pair<int, double>>> dist(verts.size());
      for (size_t a = 0; a < nt; ++a)
        for (int v : sys.tv[node.tris[a]]) {
          auto& d = dist[b.find(v)];
          int r = tkey[0][a];
          auto it = std::find_if(d.begin(), d.end(), [&](const auto& e) { return e.first == r; });
          if (it == d.end())
            d.push_back({r, sys.tw[node.tris[a]]});
          else
            it->second += sys.tw[node.tris[a]];
        }
      for (size_t li = 0; li < verts.size(); ++li) {
        const auto& d = dist[li];
        std::vector<double> w;
        for (const auto& e : d) w.push_back(e.second);
        const int samples = d.size() == 1 ? 1 : std::max(1, params.lift_samples);
        std::vector<std::pair<Permutation, int>> votes;
        for (int s = 0; s < samples; ++s) {
          int r = d[d.size() == 1 ? 0 : sample_index(rng, w)].first;
          Permutation g = x[0][r].at(verts[li]) * a_of(0, r);
          auto it = std::find_if(votes.begin(), votes.end(), [&](const auto& e) { return e.first == g; });
          if (it == votes.end())
            votes.push_back({g, 1});
          else
            ++it->second;
        }
        size_t win = 0;
        for (size_t c = 1; c < votes.size(); ++c)
          if (votes[c].second > votes[win].second) win = c;
        b.lab[li] = votes[win].first;
      }
    }

    // Events (1), (2), (3) per edge occurrence.
    EventStats ev;
    for (size_t a = 0; a < nt; ++a) {
      int t = node.tris[a];
      const double w = sys.tw[t] / 3;
      for (int p = 0; p < 3; ++p) {
        int i = kPairs[p][0], k = kPairs[p][1];
        int ui = sys.tv[t][i], uk = sys.tv[t][k];
        const Permutation& pt = sys.tpi[t][p];
        if (b.at(ui) != pt * b.at(uk)) ev.lifted_viol += w;
        if (easy) {
          int si = tkey[i][a], sk = tkey[k][a];
          const Permutation& pab = align[p].at({si, sk});
          const Sol& xi = x[i][si];
          if (a_of(i, si) != pab.inverse() * a_of(k, sk)) ev.event1 += w;
          if (xi.at(ui) != pt * xi.at(uk)) ev.event2 += w;
          if (xi.at(uk) != x[k][sk].at(uk) * pab) ev.event3 += w;
        } else {
          int s = tkey[0][a];
          const Sol& xs = x[0][s];
          if (b.at(ui) != xs.at(ui) * a_of(0, s)) ev.event1 += w;
          if (b.at(uk) != xs.at(uk) * a_of(0, s)) ev.event2 += w;
          if (xs.at(ui) != pt * xs.at(uk)) ev.event3 += w;
        }
      }
    }
    ev.event1 /= total;
    ev.event2 /= total;
    ev.event3 /= total;
    ev.lifted_viol /= total;
    if (depth == 0) top_events = ev;

    LevelReport& lr = level(depth);
    lr.restrictions += restrictions;
    lr.mean_sub_viol += sub_viol;
    lr.mean_alignment_disagreement += align_mass > 0 ? disagreement / align_mass : 0;
    lr.mean_h_incons += h_incons;
    lr.mean_h_viol += h_viol;
    lr.mean_lifted_viol += ev.lifted_viol;
    lr.mean_events.event1 += ev.event1;
    lr.mean_events.event2 += ev.event2;
    lr.mean_events.event3 += ev.event3;
    lr.mean_events.lifted_viol += ev.lifted_viol;
    lr.not_bad_triangles += not_bad;
    lr.not_bad_inconsistent += not_bad_inconsistent;
    return b;
  }

  void finish_levels() {
    for (auto& lr : levels) {
      if (lr.recursive_cases == 0) continue;
      const double n = lr.recursive_cases;
      lr.mean_sub_viol /= n;
      lr.mean_alignment_disagreement /= n;
      lr.mean_h_incons /= n;
      lr.mean_h_viol /= n;
      lr.mean_lifted_viol /= n;
      lr.mean_events.event1 /= n;
      lr.mean_events.event2 /= n;
      lr.mean_events.event3 /= n;
      lr.mean_events.lifted_viol /= n;
    }
  }
};

Node root_node(const TriSystem& sys) {
  Node n;
  n.tris.resize(sys.tv.size());
  std::iota(n.tris.begin(), n.tris.end(), 0);
  for (int i = 0; i < 3; ++i) {
    n.free[i].resize(sys.labels[i].size());
    std::iota(n.free[i].begin(), n.free[i].end(), 0);
  }
  return n;
}

// Runs the recursion on sys and returns the solution on the vertices of its triangles.
Sol run(const TriSystem& sys, const LiftParams& params, Rng& rng, LiftReport& report) {
  Solver solver{sys, params, sys.inst->alphabet(), {}, {}, false, LiftMode::Easy, 0};
  Sol s = solver.solve(root_node(sys), 0, rng);
  solver.finish_levels();
  report.levels = std::move(solver.levels);
  report.top_events = solver.top_events;
  report.top_recursive = solver.top_recursive;
  report.mode_used = solver.top_mode;
  report.nodes = solver.nodes;
  return s;
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -INFINITY;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

LiftResult solve_tripartite(const UGInstance& inst, const LiftParams& params, Rng& rng) {
  if (inst.graph().num_parts() != 3) throw std::invalid_argument("solve_tripartite: graph must be tripartite");
  TriSystem sys = make_system(inst, {0, 1, 2});
  LiftResult out;
  Sol s = run(sys, params, rng, out.report);
  out.assignment = identity_assignment(inst.num_vertices(), inst.alphabet());
  for (size_t i = 0; i < s.verts.size(); ++i) out.assignment[s.verts[i]] = s.lab[i];
  out.viol = viol(inst, out.assignment);
  out.report.viol = out.viol;
  return out;
}

LiftResult solve_partite(const UGInstance& inst, const LiftParams& params, Rng& rng) {
  const WeightedGraph& g = inst.graph();
  if (g.triangles().empty()) throw std::invalid_argument("solve_partite: instance has no triangles");
  const int r = static_cast<int>(g.part_coords(0).size());
  std::vector<int> labels;
  std::map<std::vector<int>, int> part_by_coords;
  for (int p = 0; p < g.num_parts(); ++p) {
    part_by_coords[g.part_coords(p)] = p;
    for (int c : g.part_coords(p)) labels.push_back(c);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  const int d = static_cast<int>(labels.size());
  if (3 * r > d) throw std::invalid_argument("solve_partite: need 3r <= |I|");
  std::map<std::array<int, 3>, std::vector<int>> by_parts;
  for (size_t i = 0; i < g.triangles().size(); ++i) {
    const Triangle& t = g.triangles()[i];
    std::array<int, 3> key{g.part_of(t.a), g.part_of(t.b), g.part_of(t.c)};
    std::sort(key.begin(), key.end());
    by_parts[key].push_back(static_cast<int>(i));
  }
  const int gap = params.separation_gap > 0 ? params.separation_gap : std::max(1, d / (9 * r * r));
  const int interval = params.interval_len > 0 ? params.interval_len : d;

  LiftResult out;
  std::array<int, 3> chosen{-1, -1, -1};
  double chosen_incons = 2;
  for (int trial = 0; trial < params.triples_tried; ++trial) {
    ++out.report.triples_sampled;
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> positions(order.begin(), order.begin() + 3 * r);
    if (!separation_check(positions, gap)) continue;
    if (params.spread_slack >= 0 && !well_spread_check(positions, d, interval, params.spread_slack)) continue;
    std::array<int, 3> parts;
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      std::vector<int> s;
      for (int j = 0; j < r; ++j) s.push_back(labels[order[i * r + j]]);
      std::sort(s.begin(), s.end());
      auto it = part_by_coords.find(s);
      ok = it != part_by_coords.end();
      if (ok) parts[i] = it->second;
    }
    if (!ok) continue;
    std::array<int, 3> key = parts;
    std::sort(key.begin(), key.end());
    auto it = by_parts.find(key);
    if (it == by_parts.end()) continue;
    ++out.report.triples_accepted;
    double bad = 0, mass = 0;
    for (int ti : it->second) {
      const Triangle& t = g.triangles()[ti];
      mass += t.w;
      if (!triangle_consistent(inst, t)) bad += t.w;
    }
    double inc = mass > 0 ? bad / mass : 0;
    if (inc < chosen_incons) {
      chosen_incons = inc;
      chosen = key;
    }
  }
  if (chosen[0] < 0) throw BudgetExceeded("solve_partite: no separated triple found");
  out.report.chosen_h_incons = chosen_incons;
  for (int p : chosen) out.report.chosen_triple.push_back(g.part_coords(p));

  TriSystem sys = make_system(inst, chosen, &by_parts.at(chosen));
  Sol a = run(sys, params, rng, out.report);

  const int n = g.num_vertices(), m = inst.alphabet();
  Assignment b = identity_assignment(n, m);
  std::vector<char> assigned(n, 0);
  std::vector<char> in_h(n, 0);
  for (size_t i = 0; i < a.verts.size(); ++i) {
    b[a.verts[i]] = a.lab[i];
    assigned[a.verts[i]] = 1;
    in_h[a.verts[i]] = 1;
  }
  auto disjoint = [&](int p, int q) {
    const auto& x = g.part_coords(p);
    const auto& y = g.part_coords(q);
    for (int c : x)
      if (std::find(y.begin(), y.end(), c) != y.end()) return false;
    return true;
  };
  // g_s(u) = pi(u, s) A(s), plurality over sampled s from the first disjoint pivot part.
  for (int u = 0; u < n; ++u) {
    if (in_h[u]) continue;
    int pu = g.part_of(u);
    for (int j = 0; j < 3; ++j) {
      if (!disjoint(pu, chosen[j])) continue;
      std::vector<std::pair<int, int>> cand;
      std::vector<double> w;
      for (auto [s, e] : g.neighbors(u))
        if (g.part_of(s) == chosen[j] && in_h[s]) {
          cand.push_back({s, e});
          w.push_back(g.edges()[e].w);
        }
      if (cand.empty()) continue;
      PermHistogram votes;
      const int samples = cand.size() == 1 ? 1 : std::max(1, params.lift_samples);
      for (int k = 0; k < samples; ++k) {
        auto [s, e] = cand[cand.size() == 1 ? 0 : sample_index(rng, w)];
        votes.add(inst.constraint(u, s) * b[s], 1.0);
      }
      b[u] = votes.best().first;
      assigned[u] = 1;
      break;
    }
  }
  // Vertices meeting every pivot part: plurality over assigned neighbours until stable.
  for (bool progress = true; progress;) {
    progress = false;
    for (int u = 0; u < n; ++u) {
      if (assigned[u]) continue;
      PermHistogram votes;
      for (auto [w, e] : g.neighbors(u))
        if (assigned[w]) votes.add(inst.constraint(u, w) * b[w], g.edges()[e].w);
      if (votes.bins.empty()) continue;
      b[u] = votes.best().first;
      assigned[u] = 1;
      progress = true;
    }
  }

  // Events with a certificate restriction s' from a pivot part forming a triangle with the edge.
  std::map<std::pair<int, int>, std::vector<std::pair<int, double>>> third;
  for (const auto& t : g.triangles()) {
    int v[3] = {t.a, t.b, t.c};
    for (int x = 0; x < 3; ++x) {
      int s = v[x], p = v[(x + 1) % 3], q = v[(x + 2) % 3];
      if (!in_h[s]) continue;
      third[{std::min(p, q), std::max(p, q)}].push_back({s, t.w});
    }
  }
  EventStats ev;
  double total = 0;
  for (const auto& e : g.edges()) total += e.w;
  for (const auto& e : g.edges()) {
    const double frac = e.w / total;
    int u = e.u, v = e.v;
    const Permutation& puv = inst.constraint(u, v);
    if (b[u] != puv * b[v]) ev.lifted_viol += frac;
    auto it = third.find({std::min(u, v), std::max(u, v)});
    if (it == third.end()) {
      ev.uncovered += frac;
      continue;
    }
    std::vector<double> w;
    for (const auto& c : it->second) w.push_back(c.second);
    int s = it->second[it->second.size() == 1 ? 0 : sample_index(rng, w)].first;
    Permutation pus = inst.constraint(u, s), pvs = inst.constraint(v, s);
    if (b[u] != pus * b[s]) ev.event1 += frac;
    if (b[v] != pvs * b[s]) ev.event2 += frac;
    if (pus != puv * pvs) ev.event3 += frac;
  }
  out.report.top_events = ev;
  out.assignment = std::move(b);
  out.viol = viol(inst, out.assignment);
  out.report.viol = out.viol;
  return out;
}

AlignResult align_restrictions(const Assignment& xa, const Assignment& xb, const UGInstance& inst,
                               const std::vector<char>& overlap) {
  if (overlap.size() != static_cast<size_t>(inst.num_vertices()))
    throw std::invalid_argument("align_restrictions: overlap mask size mismatch");
  double mass = 0;
  for (int v = 0; v < inst.num_vertices(); ++v)
    if (overlap[v]) mass += inst.graph().measure(v);
  if (mass <= 0) throw std::invalid_argument("align_restrictions: empty overlap");
  ShiftResult s = best_shift(xa, xb, inst, overlap);
  AlignResult r{s.pi, s.disagreement, {}};
  for (int v = 0; v < inst.num_vertices(); ++v)
    if (overlap[v] && xa[v] != xb[v] * s.pi) r.bad.push_back(v);
  return r;
}

bool separation_check(std::vector<int> indices, int threshold) {
  std::sort(indices.begin(), indices.end());
  for (size_t i = 1; i < indices.size(); ++i)
    if (indices[i] - indices[i - 1] < threshold) return false;
  return true;
}

bool well_spread_check(const std::vector<int>& set, int d, int interval_len, double slack) {
  if (d <= 0 || interval_len <= 0) throw std::invalid_argument("well_spread_check: positive sizes required");
  for (int lo = 0; lo < d; lo += interval_len) {
    int hi = std::min(d, lo + interval_len);
    int count = 0;
    for (int x : set)
      if (x >= lo && x < hi) ++count;
    double expected = static_cast<double>(set.size()) * (hi - lo) / d;
    if (std::abs(count - expected) > slack) return false;
  }
  return true;
}

double separation_probability(int d, int n, int gap) {
  if (n <= 1) return 1.0;
  int free_len = d - (n - 1) * (gap - 1);
  if (free_len < n) return 0.0;
  return std::exp(log_binomial(free_len, n) - log_binomial(d, n));
}

}  // namespace hdx
