#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hdx/complex.hpp"

namespace hdx {

// F : X(k) -> {0,1}^k, bit i of a face is its i-th smallest vertex.
struct DPTable {
  std::shared_ptr<const SimplicialComplex> complex;
  std::shared_ptr<const Level> faces;
  int k = 0;
  std::vector<uint64_t> bits;
};

// f[v] in {0, 1} for every vertex.
DPTable encode(const std::vector<int>& f, std::shared_ptr<const SimplicialComplex> x, int k);
// Shares the face level of `like`.
DPTable encode_like(const std::vector<int>& f, const DPTable& like);

enum class CorruptionModel { IidBitFlip, FaceResample, AdversarialBlock };
std::string corruption_name(CorruptionModel m);
CorruptionModel parse_corruption(const std::string& s);

// IidBitFlip: each bit flips with prob. rate. FaceResample: each face becomes uniform with prob. rate.
// AdversarialBlock: a rate-fraction of faces answers with the encoding of a second random function.
DPTable corrupt(const DPTable& table, CorruptionModel model, double rate, Rng& rng);

enum class TesterMode { Auto, Exact, MonteCarlo };

inline constexpr double kExactTupleLimit = 1e7;

struct TesterResult {
  double acceptance = 0;
  double stderr_ = 0;  // Monte Carlo standard error; 0 when exact
  long samples = 0;
  bool exact = false;
  int t = 0;
};

int default_query_size(int k);  // ceil(sqrt(k))

// Pr[F[A]|_I = F[A']|_I] over D ~ mu_d, I of size t in D, A, A' of size k with I in A, A' in D.
// Auto picks exact enumeration when #top * C(d,t) * C(d-t,k-t)^2 <= kExactTupleLimit.
// Monte Carlo runs in fixed chunks with split streams, so the result does not depend on `jobs`.
TesterResult run_tester(const DPTable& table, int t, long samples, Rng& rng, TesterMode mode = TesterMode::Auto,
                        int jobs = 1);

struct DecodeResult {
  std::vector<int> f;
  double eta = 0;
};
// mu_k-weighted majority per vertex, ties to 0; eta = mu_k(faces within Hamming eps*k of f).
DecodeResult decode_majority(const DPTable& table, double eps);

// Pr[Binomial(n, p) <= floor(x)].
double binomial_cdf(int n, double p, double x);

}  // namespace hdx
