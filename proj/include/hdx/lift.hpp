#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hdx/ug.hpp"

namespace hdx {

enum class LiftMode { Easy, Exp };

std::string lift_mode_name(LiftMode m);

// Implicit list L[pi] = X o pi: only the base solution is stored.
struct SolutionList {
  Assignment base;
  Assignment at(const Permutation& pi) const;
};

struct LiftParams {
  LiftMode mode = LiftMode::Easy;
  int block_k = 1;          // pivot blocks per part in exp mode
  int base_threshold = 12;  // brute force when the vertex count is at most this ...
  int base_max_m = 3;       // ... and the alphabet is at most this
  double brute_budget = 5e7;
  int max_depth = 64;
  int triples_tried = 64;
  int lift_samples = 8;
  int polish_rounds = 10;
  int separation_gap = 0;  // 0: max(1, d / (3r)^2)
  int interval_len = 0;    // 0: one interval covering all coordinates
  double spread_slack = -1;  // < 0: no well-spread filter
  // Optional solver for restriction instances too large to brute force (e.g. cones on a
  // recognized building graph). Returning nullopt falls back to propagation plus polishing.
  std::function<std::optional<Assignment>(const UGInstance&)> base_solver;
};

struct EventStats {
  double event1 = 0;  // mass of edges failing lifting event (1)
  double event2 = 0;
  double event3 = 0;
  double uncovered = 0;  // edges with no certificate restriction (partite lift only)
  double lifted_viol = 0;
  double sum() const { return event1 + event2 + event3 + uncovered; }
};

// Per recursion depth, summed over nodes at that depth.
struct LevelReport {
  int depth = 0;
  int nodes = 0;
  int apex_cases = 0;
  int brute_cases = 0;
  int base_cases = 0;
  int recursive_cases = 0;
  long restrictions = 0;
  double mean_sub_viol = 0;
  double mean_alignment_disagreement = 0;
  double mean_h_incons = 0;
  double mean_h_viol = 0;
  double mean_lifted_viol = 0;
  EventStats mean_events;
  long not_bad_triangles = 0;
  long not_bad_inconsistent = 0;
  std::string pivots;  // pivot description of the first recursive node at this depth
};

struct LiftReport {
  LiftMode mode_used = LiftMode::Easy;
  std::vector<LevelReport> levels;
  EventStats top_events;
  bool top_recursive = false;
  double viol = 0;
  long nodes = 0;
  // Partite solve only.
  std::vector<std::vector<int>> chosen_triple;
  int triples_sampled = 0;
  int triples_accepted = 0;
  double chosen_h_incons = 0;
};

struct LiftResult {
  Assignment assignment;
  double viol = 0;
  LiftReport report;
};

struct PivotChoice {
  LiftMode mode = LiftMode::Easy;
  // sets[i] lists (part, position) pairs; positions index the part's coordinate list.
  std::array<std::vector<std::pair<int, int>>, 3> sets;
  std::string describe(const std::array<std::vector<int>, 3>& labels) const;
};

// free_positions[p] are positions into labels[p]. Exp mode draws 3k-sized well-ordered sets
// from three increasing label intervals, k from each part; infeasible -> easy mode.
PivotChoice choose_pivots(const std::array<std::vector<int>, 3>& labels,
                          const std::array<std::vector<int>, 3>& free_positions, LiftMode mode, int k);

// Tripartite instance on T(R1, R2, R3; mu): graph parts carry the coordinate sets.
LiftResult solve_tripartite(const UGInstance& inst, const LiftParams& params, Rng& rng);

// Instance on G_r(D) built by partite_graph_G_r.
LiftResult solve_partite(const UGInstance& inst, const LiftParams& params, Rng& rng);

struct AlignResult {
  Permutation pi;
  double disagreement = 0;
  std::vector<int> bad;  // overlap vertices with X_a(v) != X_b(v) pi
};
// best_shift on the overlap mask; throws on an empty overlap.
AlignResult align_restrictions(const Assignment& xa, const Assignment& xb, const UGInstance& inst,
                               const std::vector<char>& overlap);

// Minimum pairwise gap of the sorted indices is at least `threshold`.
bool separation_check(std::vector<int> indices, int threshold);
// Every interval [j*len, (j+1)*len) of [0, d) holds |R| * |interval| / d elements up to `slack`.
bool well_spread_check(const std::vector<int>& set, int d, int interval_len, double slack);
// Pr[a uniform n-subset of [d] has all gaps >= gap] = C(d - (n-1)(gap-1), n) / C(d, n).
double separation_probability(int d, int n, int gap);

}  // namespace hdx
