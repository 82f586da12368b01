#pragma once

#include "ruleforge/cover.hpp"
#include "ruleforge/dataset.hpp"
#include "ruleforge/lp.hpp"

namespace ruleforge {

// Residuals of an LP optimality check, computed directly from definitions.
// This is an independent verifier: it shares no code with the lp module.
struct Certificate {
  double primal_residual = 0.0;  // max constraint/bound violation of z
  double dual_residual = 0.0;    // max constraint/bound violation of lambda
  double gap = 0.0;              // |sum c_j z_j - sum lambda_i|
  double comp_slack_max = 0.0;

  bool pass(double eps_feas = 1e-7, double eps_gap = 1e-6) const {
    return primal_residual <= eps_feas && dual_residual <= eps_feas &&
           gap <= eps_gap && comp_slack_max <= eps_gap;
  }
};

Certificate check_lp_certificate(const CoverProblem& problem, const LPSolution& solution);

// Best achievable training accuracy over all axis-aligned trees of depth at
// most max_depth (<= 2), splitting only at midpoints of adjacent distinct
// values. Exhaustive; refuses instances with m > 50, p > 4 or max_depth > 2.
double enumerate_small_trees(const Dataset& data, int max_depth);

}  // namespace ruleforge
