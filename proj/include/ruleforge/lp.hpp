#pragma once

#include <span>
#include <vector>

#include "ruleforge/cover.hpp"

namespace ruleforge {

struct LPSolution {
  std::vector<double> primal;  // z_j >= 0 per rule
  std::vector<double> duals;   // lambda_i >= 0 per sample
  double objective = 0.0;      // sum_j c_j z_j at the optimum
  int iterations = 0;          // simplex pivots
};

// Solves the covering LP relaxation
//   min sum c_j z_j  s.t.  sum_{j covering i} z_j >= 1,  z >= 0
// to optimality and returns primal and dual values. The solve works on the
// dual (max sum lambda_i s.t. sum_{i in I(j)} lambda_i <= c_j, lambda >= 0)
// by primal simplex from the slack basis, so no phase-1 is needed; z is
// recovered from the optimal basis multipliers. Dantzig pricing switches to
// Bland's rule after 2(m+n) pivots; the pivot limit is 50(m+n).
//
// Every returned solution satisfies, and is checked against, the certificate
// triple: primal/dual feasibility within 1e-7, duality gap and complementary
// slackness within 1e-6. Violations throw internal_error.
LPSolution solve_covering_lp(const CoverProblem& problem);

// Reduced cost of a rule under the current-iteration duals:
// cost - sum_{i in covered} duals[i].
double reduced_cost(double cost, std::span<const int> covered,
                    std::span<const double> duals);

}  // namespace ruleforge
