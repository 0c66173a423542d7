#include "hdx/cones.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace hdx {

std::string family_name(ConesFamily f) { return f == ConesFamily::Grassmann ? "grassmann" : "symplectic"; }

int part_dimension(const WeightedGraph& g, int part) {
  for (int v = 0; v < g.num_vertices(); ++v)
    if (g.part_of(v) == part) return vertex_subspace(g, v).dim();
  throw std::invalid_argument("part_dimension: empty part");
}

const Subspace& vertex_subspace(const WeightedGraph& g, int v) {
  const Subspace* s = g.universe() && g.key(v).values.size() == 1 ? g.universe()->subspace(g.key(v).values[0]) : nullptr;
  if (!s) throw std::invalid_argument("vertex is not a subspace");
  return *s;
}

int find_subspace_vertex(const WeightedGraph& g, const Subspace& s) {
  auto id = g.universe()->find(s);
  if (!id) return -1;
  for (int part = 0; part < g.num_parts(); ++part) {
    int v = g.find_vertex({part, {*id}});
    if (v >= 0) return v;
  }
  return -1;
}

namespace {

Subspace sum_of(const std::vector<Subspace>& parts, int ambient, int p) {
  Subspace s = Subspace::zero(ambient, p);
  for (const auto& x : parts) s = subspace_sum(s, x);
  return s;
}

// span(blocks[lo..hi)) for 0-based block indices.
Subspace block_span(const std::vector<Subspace>& blocks, int lo, int hi, int ambient, int p) {
  Subspace s = Subspace::zero(ambient, p);
  for (int i = std::max(lo, 0); i < std::min<int>(hi, static_cast<int>(blocks.size())); ++i) s = subspace_sum(s, blocks[i]);
  return s;
}

// Consecutive k-dim blocks of a random basis of s.
std::vector<Subspace> random_block_flag(const Subspace& s, int k, Rng& rng) {
  const int dim = s.dim();
  Matrix basis = random_gl(dim, s.modulus(), rng) * s.basis();
  std::vector<Subspace> out;
  for (int r = 0; r + k <= dim; r += k) out.push_back(Subspace::span(basis.row_block(r, r + k)));
  return out;
}

void init_common(BlockDecomposition& b, const WeightedGraph& g, int base_vertex) {
  if (g.num_parts() != 3) throw std::invalid_argument("cones: tripartite graph required");
  for (int p = 0; p < 3; ++p) b.dims[p] = part_dimension(g, p);
  if (!(b.dims[0] < b.dims[1] && b.dims[1] < b.dims[2])) throw std::invalid_argument("cones: parts must have increasing dims");
  const Subspace& any = vertex_subspace(g, 0);
  b.ambient = any.ambient();
  b.p = any.modulus();
  b.base_vertex = base_vertex;
  const int n = g.num_vertices();
  b.blocks.assign(n, {});
  b.associated.assign(n, Subspace());
  b.good.assign(n, 0);
}

void set_base_blocks(BlockDecomposition& b, const Subspace& u) {
  b.base_blocks.clear();
  for (int r = 0; r < b.num_blocks; ++r) b.base_blocks.push_back(Subspace::span(u.basis().row_block(r * b.block, (r + 1) * b.block)));
}

}  // namespace

bool vertex_good(const BlockDecomposition& b, const std::vector<Subspace>& blocks) {
  if (static_cast<int>(blocks.size()) != b.num_blocks) return false;
  for (int i = 1; i <= b.num_blocks; ++i) {
    Subspace s = subspace_sum(block_span(blocks, 0, i, b.ambient, b.p), block_span(b.base_blocks, i, b.num_blocks, b.ambient, b.p));
    if (s.dim() != b.target) return false;
  }
  return true;
}

bool edge_good(const BlockDecomposition& b, int big, int small) {
  if (!b.good[big] || !b.good[small]) return false;
  if (b.family == ConesFamily::Symplectic) return true;
  const auto& vb = b.blocks[big];
  const auto& wb = b.blocks[small];
  for (int i = 1; i <= b.num_blocks; ++i)
    for (int j = 0; j < i; ++j) {
      Subspace s = block_span(vb, 0, j, b.ambient, b.p);
      s = subspace_sum(s, block_span(wb, j, i, b.ambient, b.p));
      s = subspace_sum(s, block_span(b.base_blocks, i, b.num_blocks, b.ambient, b.p));
      if (s.dim() != b.target) return false;
    }
  return true;
}

BlockDecomposition build_block_decomposition_gr(const WeightedGraph& g, int base_vertex, Rng& rng, int retries) {
  BlockDecomposition b;
  b.family = ConesFamily::Grassmann;
  init_common(b, g, base_vertex);
  const int k1 = b.dims[0], k2 = b.dims[1], k3 = b.dims[2];
  b.regime = (k3 - k2 <= k2 - k1) ? 1 : 2;
  if (b.regime == 1) {
    b.block = k3 - k2;
    b.target = k3;
    if (k1 % b.block || k2 % b.block || k3 % b.block)
      throw std::invalid_argument("cones: block size must divide k1, k2, k3");
    b.num_blocks = k3 / b.block;
  } else {
    b.block = k2 - k1;
    b.target = k2;
    if (k1 % b.block || k2 % b.block) throw std::invalid_argument("cones: block size must divide k1, k2");
    b.num_blocks = k2 / b.block;
  }
  const int base_part = b.regime == 1 ? 2 : 1;
  if (g.part_of(base_vertex) != base_part) throw std::invalid_argument("cones: base vertex in the wrong part");
  const Subspace& u = vertex_subspace(g, base_vertex);
  set_base_blocks(b, u);
  const int k = b.block, t = b.num_blocks;

  for (int v = 0; v < g.num_vertices(); ++v) {
    const Subspace& s = vertex_subspace(g, v);
    const int part = g.part_of(v);
    if (v == base_vertex) {
      b.blocks[v] = b.base_blocks;
      b.associated[v] = s;
      b.good[v] = 1;
      continue;
    }
    for (int attempt = 0; attempt < std::max(1, retries); ++attempt) {
      std::vector<Subspace> blocks;
      Subspace assoc = s;
      if (b.regime == 1) {
        int own = s.dim() / k;
        blocks.assign(b.base_blocks.begin(), b.base_blocks.begin() + (t - own));
        for (auto& x : random_block_flag(s, k, rng)) blocks.push_back(std::move(x));
      } else if (part == 1) {
        blocks = random_block_flag(s, k, rng);
      } else if (part == 0) {
        blocks.push_back(b.base_blocks[0]);
        for (auto& x : random_block_flag(s, k, rng)) blocks.push_back(std::move(x));
      } else {
        assoc = random_subspace_of(s, k2, rng);
        blocks = random_block_flag(assoc, k, rng);
      }
      if (vertex_good(b, blocks)) {
        if (b.regime == 1 || part == 0) assoc = sum_of(blocks, b.ambient, b.p);
        b.blocks[v] = std::move(blocks);
        b.associated[v] = assoc;
        b.good[v] = 1;
        break;
      }
    }
  }
  return b;
}

namespace {

// Random isotropic k-dim subspace of z avoiding `avoid` (intersection zero); nullopt on failure.
std::optional<Subspace> random_isotropic_in(const Subspace& z, int k, Rng& rng) {
  const int n = z.ambient(), p = z.modulus();
  Subspace w = Subspace::zero(n, p);
  for (int step = 0; step < k; ++step) {
    Subspace room = subspace_intersect(z, symplectic_complement(w));
    if (room.dim() <= w.dim()) return std::nullopt;
    for (int tries = 0; tries < 64; ++tries) {
      Subspace line = random_subspace_of(room, 1, rng);
      if (!w.contains(line)) {
        w = subspace_sum(w, line);
        break;
      }
    }
    if (w.dim() != step + 1) return std::nullopt;
  }
  return w;
}

// Blocks first..t-1 (0-based) inside vp, each keeping (V_<=i, U_>i) isotropic of dim k2.
bool fill_symp_blocks(const BlockDecomposition& b, const Subspace& vp, int first, std::vector<Subspace>& blocks,
                      Rng& rng, int retries) {
  const int k = b.block, t = b.num_blocks;
  for (int i = first; i < t; ++i) {
    Subspace before = block_span(blocks, 0, i, b.ambient, b.p);
    Subspace rest = block_span(b.base_blocks, i + 1, t, b.ambient, b.p);
    Subspace room = subspace_intersect(vp, symplectic_complement(rest));
    if (room.dim() < k) return false;
    bool ok = false;
    for (int attempt = 0; attempt < std::max(1, retries) && !ok; ++attempt) {
      Subspace w = random_subspace_of(room, k, rng);
      if (subspace_sum(subspace_sum(before, w), rest).dim() == b.dims[1]) {
        blocks.push_back(w);
        ok = true;
      }
    }
    if (!ok) return false;
  }
  return true;
}

bool symp_predicate(const BlockDecomposition& b, const Subspace& v, int part) {
  const int k = b.block, t = b.num_blocks, k1 = b.dims[0], k2 = b.dims[1], k3 = b.dims[2];
  const Subspace u = sum_of(b.base_blocks, b.ambient, b.p);
  if (subspace_intersect(v, u).dim() != 0) return false;
  if (part == 2) return subspace_intersect(v, symplectic_complement(u)).dim() == k3 - k2;
  for (int i = 1; i <= t - 1; ++i) {
    Subspace symp_tail = symplectic_complement(block_span(b.base_blocks, i, t, b.ambient, b.p));
    int cap = subspace_intersect(v, symp_tail).dim();
    if (part == 1 && cap != i * k) return false;
    if (part == 0) {
      if (cap != (i - 1) * k) return false;
      if (subspace_intersect(symplectic_complement(v), symp_tail).dim() != b.ambient - k1 - k2 + i * k) return false;
    }
  }
  return true;
}

}  // namespace

BlockDecomposition build_block_decomposition_symp(const WeightedGraph& g, int base_vertex, Rng& rng, int retries) {
  BlockDecomposition b;
  b.family = ConesFamily::Symplectic;
  init_common(b, g, base_vertex);
  const int k1 = b.dims[0], k2 = b.dims[1];
  b.regime = 2;
  b.block = k2 - k1;
  b.target = k2;
  if (k2 % b.block || k1 < b.block) throw std::invalid_argument("cones: symplectic blocks need k2 - k1 | k2 and k1 >= k2 - k1");
  b.num_blocks = k2 / b.block;
  if (g.part_of(base_vertex) != 1) throw std::invalid_argument("cones: base vertex must be in the middle part");
  const Subspace& u = vertex_subspace(g, base_vertex);
  set_base_blocks(b, u);
  const int k = b.block, t = b.num_blocks;
  const Subspace u_tail = block_span(b.base_blocks, 1, t, b.ambient, b.p);
  const Subspace symp_u = symplectic_complement(u);
  const Subspace symp_u1 = symplectic_complement(b.base_blocks[0]);

  for (int v = 0; v < g.num_vertices(); ++v) {
    const Subspace& s = vertex_subspace(g, v);
    const int part = g.part_of(v);
    if (v == base_vertex) {
      b.blocks[v] = b.base_blocks;
      b.associated[v] = s;
      b.good[v] = 1;
      continue;
    }
    if (!symp_predicate(b, s, part)) continue;
    for (int attempt = 0; attempt < std::max(1, retries); ++attempt) {
      std::vector<Subspace> blocks;
      Subspace vp = s;
      bool ok = true;
      if (part == 2) {
        vp = random_subspace_of(s, k2, rng);
        ok = subspace_intersect(vp, symp_u).dim() == 0;
      } else if (part == 0) {
        Subspace room = subspace_intersect(symplectic_complement(u_tail), symplectic_complement(s));
        auto first = random_isotropic_in(room, k, rng);
        ok = first && subspace_intersect(*first, symp_u1).dim() == 0 && subspace_sum(*first, s).dim() == k2 &&
             subspace_sum(*first, u_tail).dim() == k2;
        if (ok) {
          blocks.push_back(*first);
          vp = subspace_sum(*first, s);
        }
      }
      if (ok) ok = fill_symp_blocks(b, vp, static_cast<int>(blocks.size()), blocks, rng, retries);
      if (ok && vertex_good(b, blocks) && is_isotropic(vp)) {
        b.blocks[v] = std::move(blocks);
        b.associated[v] = vp;
        b.good[v] = 1;
        break;
      }
    }
  }
  return b;
}

namespace {

PathTable build_paths(const WeightedGraph& g, const BlockDecomposition& b) {
  PathTable pt;
  pt.base_vertex = b.base_vertex;
  const int n = g.num_vertices(), t = b.num_blocks;
  pt.paths.assign(n, {});
  pt.vertex_paths.assign(n, {});
  pt.good_vertex = b.good;
  double vmass = 0, vgood = 0;
  for (int v = 0; v < n; ++v) {
    vmass += g.measure(v);
    if (!b.good[v]) continue;
    vgood += g.measure(v);
    const auto& vb = b.blocks[v];
    std::vector<Subspace> path{sum_of(b.base_blocks, b.ambient, b.p)};
    for (int i = 0; i < t; ++i) {
      Subspace head = block_span(vb, 0, i, b.ambient, b.p);
      Subspace tail = block_span(b.base_blocks, i + 1, t, b.ambient, b.p);
      path.push_back(subspace_sum(head, tail));
      path.push_back(subspace_sum(subspace_sum(head, vb[i]), tail));
    }
    const Subspace& self = vertex_subspace(g, v);
    if (path.back() != self) path.push_back(self);
    std::vector<int> ids;
    for (const auto& s : path) {
      int id = find_subspace_vertex(g, s);
      if (id < 0) throw std::logic_error("cones path leaves the graph: " + s.encode());
      if (!ids.empty() && id != ids.back()) {
        int e = g.find_edge(id, ids.back());
        if (e < 0 || g.edges()[e].w <= 0) throw std::logic_error("cones path uses a non-edge");
      }
      ids.push_back(id);
    }
    pt.paths[v] = std::move(path);
    pt.vertex_paths[v] = std::move(ids);
  }
  pt.good_edge.assign(g.edges().size(), 0);
  double emass = 0, egood = 0;
  for (size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    emass += e.w;
    int big = e.u, small = e.v;
    if (vertex_subspace(g, big).dim() < vertex_subspace(g, small).dim()) std::swap(big, small);
    if (edge_good(b, big, small)) {
      pt.good_edge[i] = 1;
      egood += e.w;
    }
  }
  pt.good_vertex_fraction = vmass > 0 ? vgood / vmass : 0;
  pt.good_edge_fraction = emass > 0 ? egood / emass : 0;
  return pt;
}

}  // namespace

PathTable build_paths_gr(const WeightedGraph& g, const BlockDecomposition& b) {
  if (b.family != ConesFamily::Grassmann) throw std::invalid_argument("build_paths_gr: Grassmann decomposition required");
  return build_paths(g, b);
}

PathTable build_paths_symp(const WeightedGraph& g, const BlockDecomposition& b) {
  if (b.family != ConesFamily::Symplectic) throw std::invalid_argument("build_paths_symp: symplectic decomposition required");
  return build_paths(g, b);
}

PathTable build_paths_symp(const WeightedGraph& g, int base_vertex, Rng& rng, int retries) {
  return build_paths(g, build_block_decomposition_symp(g, base_vertex, rng, retries));
}

Assignment propagate(const UGInstance& inst, const PathTable& paths, const Matrix& transform) {
  const WeightedGraph& g = inst.graph();
  const int n = g.num_vertices(), m = inst.alphabet();
  Assignment f = identity_assignment(n, m);
  std::unordered_map<Subspace, int, SubspaceHash> image;
  auto locate = [&](const Subspace& s) {
    auto it = image.find(s);
    if (it != image.end()) return it->second;
    int id = find_subspace_vertex(g, apply(transform, s));
    if (id < 0) throw std::logic_error("propagate: group element does not preserve the vertex set");
    image.emplace(s, id);
    return id;
  };
  for (int v = 0; v < n; ++v) {
    if (!paths.good_vertex[v] || paths.paths[v].empty()) continue;
    const auto& path = paths.paths[v];
    int cur = locate(path[0]);
    Permutation label = Permutation::identity(m);
    for (size_t j = 1; j < path.size(); ++j) {
      int next = locate(path[j]);
      if (next != cur) label = inst.constraint(next, cur) * label;
      cur = next;
    }
    f[cur] = label;
  }
  return f;
}

ConesResult cones_solve(const UGInstance& inst, const PathTable& paths, ConesFamily family, int trials, Rng& rng,
                        int word_len) {
  if (trials < 1) throw std::invalid_argument("cones_solve: trials must be positive");
  const Subspace& any = vertex_subspace(inst.graph(), 0);
  ConesResult r;
  double sum = 0, sq = 0;
  for (int i = 0; i < trials; ++i) {
    Rng local = split(rng);
    Matrix g = family == ConesFamily::Grassmann ? random_gl(any.ambient(), any.modulus(), local)
                                                : random_sp(any.ambient() / 2, any.modulus(), local, word_len);
    Assignment a = propagate(inst, paths, g);
    double v = viol(inst, a);
    r.trials.push_back({i, v});
    sum += v;
    sq += v * v;
    if (i == 0 || v < r.best_viol) {
      r.best_viol = v;
      r.best = std::move(a);
    }
  }
  r.mean_viol = sum / trials;
  r.stddev_viol = trials > 1 ? std::sqrt(std::max(0.0, (sq - trials * r.mean_viol * r.mean_viol) / (trials - 1))) : 0.0;
  return r;
}

Assignment johnson_propagate(const UGInstance& inst, int n, Rng& rng) {
  const WeightedGraph& g = inst.graph();
  const int nv = g.num_vertices(), m = inst.alphabet();
  Assignment f = identity_assignment(nv, m);
  if (nv == 0) return f;
  int root = uniform_int(rng, nv);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) rank[order[i]] = i;
  auto by_rank = [&](int a, int b) { return rank[a] < rank[b]; };
  const Tuple& u0 = g.key(root).values;
  for (int v = 0; v < nv; ++v) {
    const Tuple& target = g.key(v).values;
    std::vector<int> out, in;
    for (Value x : u0)
      if (std::find(target.begin(), target.end(), x) == target.end()) out.push_back(x);
    for (Value x : target)
      if (std::find(u0.begin(), u0.end(), x) == u0.end()) in.push_back(x);
    std::sort(out.begin(), out.end(), by_rank);
    std::sort(in.begin(), in.end(), by_rank);
    Tuple cur_set = u0;
    int cur = root;
    Permutation label = Permutation::identity(m);
    for (size_t i = 0; i < out.size(); ++i) {
      *std::find(cur_set.begin(), cur_set.end(), out[i]) = in[i];
      Tuple key = cur_set;
      std::sort(key.begin(), key.end());
      int next = g.find_vertex({0, key});
      if (next < 0) throw std::invalid_argument("johnson_propagate: vertex missing from the graph");
      label = inst.constraint(next, cur) * label;
      cur = next;
    }
    f[v] = label;
  }
  return f;
}

}  // namespace hdx
