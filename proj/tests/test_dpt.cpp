#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "hdx/buildings.hpp"
#include "hdx/dpt.hpp"

using namespace hdx;

namespace {

std::shared_ptr<const SimplicialComplex> complete(int n, int d) {
  return std::make_shared<SimplicialComplex>(complete_complex(n, d));
}

std::vector<int> random_bits(int n, Rng& rng) {
  std::vector<int> f(n);
  for (auto& b : f) b = uniform_int(rng, 2);
  return f;
}

double direct_binomial_cdf(int n, double p, int x) {
  double s = 0;
  for (int i = 0; i <= x; ++i) s += std::tgamma(n + 1.0) / (std::tgamma(i + 1.0) * std::tgamma(n - i + 1.0)) *
                                   std::pow(p, i) * std::pow(1 - p, n - i);
  return s;
}

}  // namespace

TEST(Encode, ZeroFunctionGivesZeroTable) {
  auto t = encode(std::vector<int>(10, 0), complete(10, 5), 3);
  EXPECT_EQ(t.bits.size(), 120u);
  for (auto b : t.bits) EXPECT_EQ(b, 0u);
}

TEST(Encode, BitsFollowSortedVertices) {
  Rng rng = make_rng(1);
  auto f = random_bits(9, rng);
  auto t = encode(f, complete(9, 5), 4);
  for (size_t i = 0; i < t.bits.size(); ++i) {
    const auto& face = t.faces->faces[i];
    for (int j = 0; j < 4; ++j) EXPECT_EQ(static_cast<int>((t.bits[i] >> j) & 1), f[face[j]]);
  }
}

TEST(Decode, RecoversEncodedFunction) {
  Rng rng = make_rng(2);
  auto f = random_bits(12, rng);
  auto t = encode(f, complete(12, 7), 5);
  for (double eps : {0.0, 0.1, 0.3}) {
    auto d = decode_majority(t, eps);
    EXPECT_EQ(d.f, f);
    EXPECT_EQ(d.eta, 1.0);
  }
}

TEST(Decode, TiesGoToZero) {
  // Two vertices, one face per bit pattern weight: vertex 0 sees 1 and 0 equally often.
  auto x = std::make_shared<SimplicialComplex>(
      SimplicialComplex::from_top_faces(3, {{0, 1}, {0, 2}}, {1.0, 1.0}));
  DPTable t = encode({0, 0, 0}, x, 2);
  t.bits[0] = 1;  // face {0,1}: vertex 0 -> 1
  auto d = decode_majority(t, 0.0);
  EXPECT_EQ(d.f[0], 0);
}

TEST(Corrupt, RateZeroIsIdentity) {
  Rng rng = make_rng(3);
  auto t = encode(random_bits(10, rng), complete(10, 6), 4);
  for (auto m : {CorruptionModel::IidBitFlip, CorruptionModel::FaceResample, CorruptionModel::AdversarialBlock})
    EXPECT_EQ(corrupt(t, m, 0.0, rng).bits, t.bits);
}

TEST(Corrupt, FullResampleIsUniform) {
  Rng rng = make_rng(4);
  auto t = encode(std::vector<int>(14, 0), complete(14, 7), 6);
  auto u = corrupt(t, CorruptionModel::FaceResample, 1.0, rng);
  std::vector<double> ones(6, 0);
  for (auto b : u.bits)
    for (int j = 0; j < 6; ++j) ones[j] += (b >> j) & 1;
  const double n = static_cast<double>(u.bits.size());
  for (double o : ones) EXPECT_NEAR(o / n, 0.5, 4 * std::sqrt(0.25 / n));
}

TEST(Corrupt, IidFlipHammingMean) {
  Rng rng = make_rng(5);
  const int k = 6;
  auto t = encode(random_bits(14, rng), complete(14, 7), k);
  const double rho = 0.15;
  auto c = corrupt(t, CorruptionModel::IidBitFlip, rho, rng);
  double dist = 0;
  for (size_t i = 0; i < t.bits.size(); ++i) dist += std::popcount(t.bits[i] ^ c.bits[i]);
  const double n = static_cast<double>(t.bits.size());
  EXPECT_NEAR(dist / n, rho * k, 4 * std::sqrt(k * rho * (1 - rho) / n));
}

TEST(Corrupt, NamesRoundTrip) {
  for (auto m : {CorruptionModel::IidBitFlip, CorruptionModel::FaceResample, CorruptionModel::AdversarialBlock})
    EXPECT_EQ(parse_corruption(corruption_name(m)), m);
  EXPECT_THROW(parse_corruption("nope"), std::invalid_argument);
}

TEST(Tester, CompletenessIsExact) {
  Rng rng = make_rng(6);
  auto t = encode(random_bits(12, rng), complete(12, 8), 5);
  auto r = run_tester(t, 2, 0, rng, TesterMode::Exact);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.acceptance, 1.0);
  auto mc = run_tester(t, 2, 5000, rng, TesterMode::MonteCarlo);
  EXPECT_EQ(mc.acceptance, 1.0);
}

TEST(Tester, EmptyQueryAlwaysAccepts) {
  Rng rng = make_rng(7);
  auto t = corrupt(encode(random_bits(10, rng), complete(10, 6), 4), CorruptionModel::FaceResample, 1.0, rng);
  EXPECT_EQ(run_tester(t, 0, 1000, rng).acceptance, 1.0);
}

TEST(Tester, RandomTableAgreementRate) {
  // A and A' coincide with prob 1 / C(d-t, k-t); otherwise t independent fair bits must match.
  Rng rng = make_rng(8);
  const int n = 12, d = 8, k = 5, t = 2;
  auto table = corrupt(encode(std::vector<int>(n, 0), complete(n, d), k), CorruptionModel::FaceResample, 1.0, rng);
  const double same = 1.0 / binomial(d - t, k - t);
  const double oracle = same + (1 - same) * std::pow(2.0, -t);
  auto exact = run_tester(table, t, 0, rng, TesterMode::Exact);
  // The table itself is one random draw; its spread is at most that of a mean over its faces.
  const double faces = static_cast<double>(table.bits.size());
  EXPECT_NEAR(exact.acceptance, oracle, 4 * std::sqrt(oracle * (1 - oracle) / faces));
  auto mc = run_tester(table, t, 40000, rng, TesterMode::MonteCarlo);
  EXPECT_NEAR(mc.acceptance, exact.acceptance, 4 * mc.stderr_ + 1e-9);
}

TEST(Tester, ParallelChunksMatchSerial) {
  Rng a = make_rng(9), b = make_rng(9);
  Rng rng = make_rng(10);
  auto table = corrupt(encode(random_bits(14, rng), complete(14, 8), 5), CorruptionModel::IidBitFlip, 0.1, rng);
  auto r1 = run_tester(table, 2, 20000, a, TesterMode::MonteCarlo, 1);
  auto r3 = run_tester(table, 2, 20000, b, TesterMode::MonteCarlo, 3);
  EXPECT_EQ(r1.acceptance, r3.acceptance);
}

TEST(Tester, MonotoneInIidRate) {
  Rng rng = make_rng(11);
  auto base = encode(random_bits(14, rng), complete(14, 8), 5);
  double prev = 1.0, prev_se = 0;
  for (double rate : {0.0, 0.05, 0.1, 0.2}) {
    double acc = 0, var = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
      auto r = run_tester(corrupt(base, CorruptionModel::IidBitFlip, rate, rng), 2, 4000, rng, TesterMode::MonteCarlo);
      acc += r.acceptance / seeds;
      var += r.stderr_ * r.stderr_ / (seeds * seeds);
    }
    const double se = std::sqrt(var);
    EXPECT_LE(acc, prev + 3 * (se + prev_se));
    prev = acc;
    prev_se = se;
  }
}

TEST(Tester, SeedSymmetry) {
  Rng rng = make_rng(12);
  auto table = corrupt(encode(random_bits(12, rng), complete(12, 8), 5), CorruptionModel::IidBitFlip, 0.1, rng);
  Rng a = make_rng(1), b = make_rng(2);
  auto ea = run_tester(table, 2, 0, a, TesterMode::Exact), eb = run_tester(table, 2, 0, b, TesterMode::Exact);
  EXPECT_EQ(ea.acceptance, eb.acceptance);
  auto ma = run_tester(table, 2, 20000, a, TesterMode::MonteCarlo);
  EXPECT_NEAR(ma.acceptance, ea.acceptance, 4 * ma.stderr_);
}

TEST(Decode, IidNoiseBinomialTail) {
  Rng rng = make_rng(13);
  const int k = 9;
  auto f = random_bits(20, rng);
  auto t = corrupt(encode(f, complete(20, 9), k), CorruptionModel::IidBitFlip, 0.1, rng);
  auto d = decode_majority(t, 0.3);
  EXPECT_EQ(d.f, f);
  // Faces within distance floor(0.3 * 9) = 2 of f.
  const double tail = direct_binomial_cdf(k, 0.1, 2);
  EXPECT_NEAR(binomial_cdf(k, 0.1, 0.3 * k), tail, 1e-12);
  EXPECT_GE(tail, 0.9);
  const double n = static_cast<double>(t.bits.size());
  EXPECT_NEAR(d.eta, tail, 5 * std::sqrt(tail * (1 - tail) / n));
  EXPECT_GE(d.eta, 0.9);
}

TEST(Decode, RandomTableTail) {
  Rng rng = make_rng(14);
  const int k = 9;
  auto t = corrupt(encode(std::vector<int>(20, 0), complete(20, 9), k), CorruptionModel::FaceResample, 1.0, rng);
  auto d = decode_majority(t, 0.3);
  EXPECT_NEAR(d.eta, direct_binomial_cdf(k, 0.5, 2), 0.01);
}

TEST(Binomial, CdfEdges) {
  EXPECT_NEAR(binomial_cdf(10, 0.3, 10), 1.0, 1e-12);
  EXPECT_NEAR(binomial_cdf(10, 0.3, -1), 0.0, 1e-12);
  EXPECT_NEAR(binomial_cdf(7, 0.5, 3), 0.5, 1e-12);
}
