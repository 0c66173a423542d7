#include "hdx/dpt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <stdexcept>

namespace hdx {

namespace {

DPTable empty_table(std::shared_ptr<const SimplicialComplex> x, std::shared_ptr<const Level> faces, int k) {
  DPTable t;
  t.complex = std::move(x);
  t.faces = std::move(faces);
  t.k = k;
  t.bits.assign(t.faces->faces.size(), 0);
  return t;
}

uint64_t encode_face(const std::vector<int>& f, const Face& face) {
  uint64_t b = 0;
  for (size_t i = 0; i < face.size(); ++i)
    if (f[face[i]]) b |= uint64_t{1} << i;
  return b;
}

void check_function(const std::vector<int>& f, const SimplicialComplex& x) {
  if (static_cast<int>(f.size()) != x.num_vertices()) throw std::invalid_argument("encode: f must be total on X(1)");
  for (int v : f)
    if (v != 0 && v != 1) throw std::invalid_argument("encode: f must be 0/1 valued");
}

}  // namespace

DPTable encode(const std::vector<int>& f, std::shared_ptr<const SimplicialComplex> x, int k) {
  if (!x) throw std::invalid_argument("encode: null complex");
  if (k < 1 || k > x->dim() || k > 64) throw std::invalid_argument("encode: need 1 <= k <= min(d, 64)");
  check_function(f, *x);
  auto faces = std::make_shared<const Level>(level(*x, k));
  DPTable t = empty_table(x, faces, k);
  for (size_t i = 0; i < faces->faces.size(); ++i) t.bits[i] = encode_face(f, faces->faces[i]);
  return t;
}

DPTable encode_like(const std::vector<int>& f, const DPTable& like) {
  check_function(f, *like.complex);
  DPTable t = empty_table(like.complex, like.faces, like.k);
  for (size_t i = 0; i < t.faces->faces.size(); ++i) t.bits[i] = encode_face(f, t.faces->faces[i]);
  return t;
}

std::string corruption_name(CorruptionModel m) {
  switch (m) {
    case CorruptionModel::IidBitFlip:
      return "iid-bit-flip";
    case CorruptionModel::FaceResample:
      return "face-resample";
    case CorruptionModel::AdversarialBlock:
      return "adversarial-block";
  }
  return "?";
}

CorruptionModel parse_corruption(const std::string& s) {
  if (s == "iid-bit-flip") return CorruptionModel::IidBitFlip;
  if (s == "face-resample") return CorruptionModel::FaceResample;
  if (s == "adversarial-block") return CorruptionModel::AdversarialBlock;
  throw std::invalid_argument("unknown corruption model: " + s);
}

DPTable corrupt(const DPTable& table, CorruptionModel model, double rate, Rng& rng) {
  if (!(rate >= 0 && rate <= 1)) throw std::invalid_argument("corrupt: rate must lie in [0, 1]");
  DPTable out = table;
  const uint64_t full = table.k == 64 ? ~uint64_t{0} : (uint64_t{1} << table.k) - 1;
  std::bernoulli_distribution coin(rate);
  switch (model) {
    case CorruptionModel::IidBitFlip:
      for (auto& b : out.bits)
        for (int i = 0; i < table.k; ++i)
          if (coin(rng)) b ^= uint64_t{1} << i;
      break;
    case CorruptionModel::FaceResample:
      for (auto& b : out.bits)
        if (coin(rng)) b = rng() & full;
      break;
    case CorruptionModel::AdversarialBlock: {
      std::vector<int> h(table.complex->num_vertices());
      for (auto& v : h) v = static_cast<int>(rng() & 1);
      for (size_t i = 0; i < out.bits.size(); ++i)
        if (coin(rng)) out.bits[i] = encode_face(h, table.faces->faces[i]);
      break;
    }
  }
  return out;
}

int default_query_size(int k) {
  int t = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
  while (t * t < k) ++t;
  while (t > 0 && (t - 1) * (t - 1) >= k) --t;
  return t;
}

namespace {

// Bits of F[A] moved to the positions of A inside D.
uint64_t to_top_frame(uint64_t bits, const std::vector<int>& positions) {
  uint64_t out = 0;
  for (size_t i = 0; i < positions.size(); ++i)
    if (bits >> i & 1) out |= uint64_t{1} << positions[i];
  return out;
}

uint64_t mask_of(const std::vector<int>& positions) {
  uint64_t m = 0;
  for (int p : positions) m |= uint64_t{1} << p;
  return m;
}

TesterResult exact_tester(const DPTable& table, int t) {
  const SimplicialComplex& x = *table.complex;
  const int d = x.dim(), k = table.k;
  if (d > 63) throw std::invalid_argument("run_tester: exact mode needs d <= 63");
  const auto subsets_k = combinations(d, k);
  const auto subsets_t = combinations(d, t);
  std::vector<uint64_t> kmask(subsets_k.size());
  for (size_t a = 0; a < subsets_k.size(); ++a) kmask[a] = mask_of(subsets_k[a]);
  // For each I, the k-subsets containing it.
  std::vector<uint64_t> tmask(subsets_t.size());
  std::vector<std::vector<int>> above(subsets_t.size());
  for (size_t i = 0; i < subsets_t.size(); ++i) {
    tmask[i] = mask_of(subsets_t[i]);
    for (size_t a = 0; a < subsets_k.size(); ++a)
      if ((kmask[a] & tmask[i]) == tmask[i]) above[i].push_back(static_cast<int>(a));
  }
  const double per_i = static_cast<double>(above.empty() ? 0 : above[0].size());
  const double pairs_per_top = static_cast<double>(subsets_t.size()) * per_i * per_i;

  std::vector<uint64_t> frame(subsets_k.size());
  std::vector<uint64_t> patterns;
  // Direct-indexed pattern counts when D is small enough.
  std::vector<uint64_t> counts(d <= 20 ? (size_t{1} << d) : 0, 0);
  Face key(k);
  double num = 0, den = 0;
  for (size_t top = 0; top < x.num_top(); ++top) {
    const Face& f = x.top(top);
    for (size_t a = 0; a < subsets_k.size(); ++a) {
      for (int j = 0; j < k; ++j) key[j] = f[subsets_k[a][j]];
      int id = table.faces->find(key);
      if (id < 0) throw std::logic_error("run_tester: k-face missing from table");
      frame[a] = to_top_frame(table.bits[id], subsets_k[a]);
    }
    // Integer count of agreeing (I, A, A') triples in this top face.
    uint64_t agree = 0;
    for (size_t i = 0; i < subsets_t.size(); ++i) {
      if (!counts.empty()) {
        const uint64_t tm = tmask[i];
        for (int a : above[i]) ++counts[frame[a] & tm];
        for (int a : above[i]) {
          uint64_t& c = counts[frame[a] & tm];
          agree += c * c;
          c = 0;
        }
        continue;
      }
      patterns.clear();
      for (int a : above[i]) patterns.push_back(frame[a] & tmask[i]);
      std::sort(patterns.begin(), patterns.end());
      for (size_t s = 0; s < patterns.size();) {
        size_t e = s;
        while (e < patterns.size() && patterns[e] == patterns[s]) ++e;
        agree += static_cast<uint64_t>(e - s) * (e - s);
        s = e;
      }
    }
    const double w = x.top_weight(top);
    num += w * (static_cast<double>(agree) / pairs_per_top);
    den += w;
  }
  TesterResult r;
  r.acceptance = num / den;
  r.exact = true;
  r.t = t;
  r.samples = static_cast<long>(x.num_top());
  return r;
}

// Uniform s-subset of {0..n-1} as positions.
std::vector<int> random_subset(int n, int s, Rng& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < s; ++i) std::swap(idx[i], idx[i + uniform_int(rng, n - i)]);
  idx.resize(s);
  return idx;
}

long mc_chunk(const DPTable& table, int t, long samples, Rng rng) {
  const SimplicialComplex& x = *table.complex;
  const int d = x.dim(), k = table.k;
  long agree = 0;
  Face a(k), b(k);
  for (long s = 0; s < samples; ++s) {
    Face top = x.sample_top(rng);
    // Shuffle D's positions: the first t are I, then draw the rest of A and A' from the remainder.
    std::vector<int> order = random_subset(d, d, rng);
    std::vector<int> rest(order.begin() + t, order.end());
    auto pick = [&](Face& out) {
      std::vector<int> extra = random_subset(d - t, k - t, rng);
      for (int i = 0; i < t; ++i) out[i] = top[order[i]];
      for (int i = 0; i < k - t; ++i) out[t + i] = top[rest[extra[i]]];
      std::sort(out.begin(), out.end());
    };
    pick(a);
    pick(b);
    int ia = table.faces->find(a), ib = table.faces->find(b);
    if (ia < 0 || ib < 0) throw std::logic_error("run_tester: k-face missing from table");
    bool ok = true;
    for (int i = 0; i < t && ok; ++i) {
      int v = top[order[i]];
      int pa = static_cast<int>(std::lower_bound(a.begin(), a.end(), v) - a.begin());
      int pb = static_cast<int>(std::lower_bound(b.begin(), b.end(), v) - b.begin());
      ok = ((table.bits[ia] >> pa) & 1) == ((table.bits[ib] >> pb) & 1);
    }
    agree += ok;
  }
  return agree;
}

}  // namespace

TesterResult run_tester(const DPTable& table, int t, long samples, Rng& rng, TesterMode mode, int jobs) {
  if (!table.complex || !table.faces) throw std::invalid_argument("run_tester: empty table");
  const int d = table.complex->dim(), k = table.k;
  if (t < 0 || t > k || k > d) throw std::invalid_argument("run_tester: need 0 <= t <= k <= d");
  if (t == 0) return TesterResult{1.0, 0.0, 0, true, 0};
  if (mode == TesterMode::Auto) {
    double n = binomial(d - t, k - t);
    double tuples = static_cast<double>(table.complex->num_top()) * binomial(d, t) * n * n;
    mode = tuples <= kExactTupleLimit ? TesterMode::Exact : TesterMode::MonteCarlo;
  }
  if (mode == TesterMode::Exact) return exact_tester(table, t);
  if (samples < 1) throw std::invalid_argument("run_tester: samples must be positive");
  constexpr int kChunks = 16;
  std::vector<Rng> streams;
  std::vector<long> sizes;
  for (int c = 0; c < kChunks; ++c) {
    streams.push_back(split(rng));
    sizes.push_back(samples / kChunks + (c < samples % kChunks ? 1 : 0));
  }
  long agree = 0;
  if (jobs <= 1) {
    for (int c = 0; c < kChunks; ++c) agree += mc_chunk(table, t, sizes[c], streams[c]);
  } else {
    std::vector<long> results(kChunks, 0);
    for (int start = 0; start < kChunks; start += jobs) {
      std::vector<std::future<long>> fs;
      for (int c = start; c < std::min(kChunks, start + jobs); ++c)
        fs.push_back(std::async(std::launch::async, mc_chunk, std::cref(table), t, sizes[c], streams[c]));
      for (size_t i = 0; i < fs.size(); ++i) results[start + i] = fs[i].get();
    }
    for (long r : results) agree += r;
  }
  TesterResult r;
  r.samples = samples;
  r.acceptance = static_cast<double>(agree) / samples;
  r.stderr_ = std::sqrt(std::max(0.0, r.acceptance * (1 - r.acceptance) / samples));
  r.t = t;
  return r;
}

DecodeResult decode_majority(const DPTable& table, double eps) {
  const int n = table.complex->num_vertices();
  std::vector<double> ones(n, 0), zeros(n, 0);
  const auto& faces = table.faces->faces;
  const auto& mu = table.faces->measure;
  for (size_t i = 0; i < faces.size(); ++i)
    for (int j = 0; j < table.k; ++j) ((table.bits[i] >> j & 1) ? ones : zeros)[faces[i][j]] += mu[i];
  DecodeResult r;
  r.f.assign(n, 0);
  for (int v = 0; v < n; ++v) r.f[v] = ones[v] > zeros[v] ? 1 : 0;
  double good = 0, total = 0;
  for (size_t i = 0; i < faces.size(); ++i) {
    int dist = std::popcount(table.bits[i] ^ encode_face(r.f, faces[i]));
    total += mu[i];
    if (dist <= eps * table.k + 1e-12) good += mu[i];
  }
  r.eta = total > 0 ? good / total : 0;
  return r;
}

double binomial_cdf(int n, double p, double x) {
  double s = 0;
  for (int i = 0; i <= n && i <= std::floor(x + 1e-12); ++i)
    s += binomial(n, i) * std::pow(p, i) * std::pow(1 - p, n - i);
  return std::min(1.0, s);
}

}  // namespace hdx
