#pragma once

#include <cstdint>
#include <vector>

#include "ruleforge/rules.hpp"
#include "ruleforge/tree.hpp"

namespace ruleforge {

struct RcbParams {
  int max_rmp_calls = 100;
  TreeParams tree_params;  // tree_params.criterion drives impurities throughout
  std::uint64_t seed = 0;
};

struct RcbIteration {
  int t = 0;                  // 1-based RMP call index
  double objective = 0.0;     // Phi(J_t), the RMP optimum before admission
  int pool_size = 0;          // |J_t| at the time of the solve
  int candidates = 0;         // rules extracted from the candidate tree
  int negative = 0;           // candidates with reduced cost < 0
  int admitted = 0;           // actually added (negative minus dedup collisions)
  double min_reduced_cost = 0.0;
  std::vector<double> admitted_reduced_costs;  // one per admitted rule, all < 0
  std::vector<double> duals;                   // lambda^t, for audit/recomputation
};

struct RcbTrace {
  std::vector<RcbIteration> iterations;
  bool converged = false;  // stopped because no candidate had negative reduced cost
  bool stalled = false;    // stopped because every negative candidate was already pooled
  int rmp_calls = 0;
  // Reduced costs of the final candidate tree's rules when converged; all >= 0.
  std::vector<double> final_candidate_reduced_costs;
};

struct RcbResult {
  RulePool pool;  // J*
  RcbTrace trace;
  TreeNode initial_tree;  // the iniDT baseline
};

// Column-generation boosting: the pool starts from a decision tree fit with
// unit weights, then each iteration solves the covering LP over the pool,
// accumulates the duals into the sample weights, grows a candidate tree under
// those weights, and admits the candidate rules with negative reduced cost
// under the current-iteration duals.
RcbResult run_rcboost(const Dataset& train, const RcbParams& params);

// Majority voting over satisfied rules, fallback disabled; never misses
// because the initial tree's leaves partition the feature space.
int rcb_predict(const RulePool& pool, std::span<const double> x);

}  // namespace ruleforge
