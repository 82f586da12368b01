#pragma once

#include <vector>

namespace ruleforge {

// Weighted set covering instance: items are samples 0..m-1, sets are rules
// with costs c_j = 1 + w_j.
struct CoverProblem {
  int m = 0;
  std::vector<double> costs;               // per rule, >= 1
  std::vector<std::vector<int>> covers;    // rule -> covered sample ids, ascending
  std::vector<std::vector<int>> covered_by;  // sample -> covering rule ids, ascending

  std::size_t n_rules() const { return costs.size(); }

  // Rebuilds covered_by from covers and checks the invariants (every sample
  // covered, costs >= 1). Throws std::runtime_error naming the first
  // uncovered sample.
  void finalize();
};

struct CoverSolution {
  std::vector<int> selected;  // ascending rule ids
  double total_cost = 0.0;
};

// Chvatal's greedy heuristic: repeatedly select the rule minimizing
// cost / newly-covered-count (ties -> lower rule id), then remove redundant
// rules. The result is always feasible.
CoverSolution greedy_cover(const CoverProblem& problem);

// Drops selected rules from highest cost to lowest (cost ties -> higher rule
// id examined first) whenever the remainder still covers all samples. Never
// increases cost, never breaks feasibility.
CoverSolution remove_redundant(const CoverSolution& solution, const CoverProblem& problem);

// Exhaustive exact optimum for instances with at most 20 rules; ties ->
// lexicographically smallest selected-id set. Refuses larger instances.
CoverSolution exact_cover(const CoverProblem& problem);

}  // namespace ruleforge
