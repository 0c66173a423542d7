#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdx/complex.hpp"
#include "hdx/partite.hpp"

namespace hdx {

enum class SpectralMethod { Auto, Dense, Power };

struct SpectralReport {
  std::string op;
  double sigma1 = 0;
  double sigma2 = 0;
  double gap = 0;
  std::string method;
  double tolerance = 0;
};

inline constexpr int kDenseCutoff = 4000;
inline constexpr double kPowerTolerance = 1e-8;
inline constexpr int kPowerMaxIterations = 10000;

// Averaging operator between two parts, normalized to D_a^{-1/2} P D_b^{-1/2}.
Eigen::MatrixXd normalized_bipartite_operator(const WeightedGraph& g, int part_a, int part_b,
                                              std::vector<int>* rows = nullptr, std::vector<int>* cols = nullptr);

SpectralReport bipartite_spectrum(const WeightedGraph& g, int part_a = 0, int part_b = 1,
                                  SpectralMethod method = SpectralMethod::Auto);
double second_singular_value(const WeightedGraph& g, int part_a = 0, int part_b = 1,
                             SpectralMethod method = SpectralMethod::Auto);

// Second largest |eigenvalue| of D^{-1/2} W D^{-1/2} on the whole graph.
double tripartite_second_singular(const WeightedGraph& g, SpectralMethod method = SpectralMethod::Auto);

// Signed second largest eigenvalue of the random walk on g (1 when disconnected).
double walk_second_eigenvalue(const WeightedGraph& g, SpectralMethod method = SpectralMethod::Auto);

struct AuditResult {
  double epsilon = 0;
  std::vector<int> condition_labels;  // argmax S
  Tuple condition_value;              // argmax X_S
  int label_i = -1;
  int label_j = -1;
  size_t conditionals = 0;  // (S, value) pairs visited
};

// Max over |S| <= |I|-2, values a, and coordinate pairs of sigma_2 of mu|X_S=a on {i},{j}.
AuditResult epsilon_product_audit(const PartiteDistribution& mu, double budget = 5e6);

// RHS - |LHS| of the expander mixing lemma for A in part 0 and B in part 1.
double mixing_check(const WeightedGraph& g, const std::vector<int>& a, const std::vector<int>& b, double lambda);

struct SamplingResult {
  double measured = 0;  // Pr[T]
  double bound = 0;     // lambda^2 Pr[B] / eps^2
};
// B inside part 0, T inside part 1.
SamplingResult sampling_check(const WeightedGraph& g, const std::vector<int>& b, double eps, double lambda);

struct TricklingReport {
  double link_lambda = 0;   // max over faces of size d-2
  double bound = 0;         // link_lambda / (1 - (d-1) link_lambda)
  double measured_gamma = 0;
};
double trickling_down_formula(double lambda, int d);
TricklingReport trickling_down_bound(const SimplicialComplex& x);

// Max over faces of size <= d-2 (empty face included) of the link 1-skeleton walk's second eigenvalue.
double local_spectral_audit(const SimplicialComplex& x, double budget = 5e6);

struct BlowupReport {
  double estimate = 0;
  double rhs = 0;
  double mean_f = 0;
  int samples = 0;
};
// Pr_{S, x ~ mu^S}[Pr(f | X_S = x) >= eta]; f is indexed by table row.
BlowupReport restriction_blowup_estimate(const PartiteDistribution& mu, const std::vector<bool>& f, int k, double eta,
                                         int samples, Rng& rng);
double restriction_blowup_rhs(int k, int d, double mean_f, double eta);

}  // namespace hdx
