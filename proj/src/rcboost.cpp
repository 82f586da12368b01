#include "ruleforge/rcboost.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <unordered_set>

#include "ruleforge/errors.hpp"
#include "ruleforge/lp.hpp"
#include "ruleforge/rng.hpp"

namespace ruleforge {

namespace {

std::string interval_key(const Rule& rule) {
  std::string key;
  key.reserve(rule.intervals.size() * 20);
  for (const auto& fi : rule.intervals) {
    key.append(reinterpret_cast<const char*>(&fi.feature), sizeof(fi.feature));
    key.append(reinterpret_cast<const char*>(&fi.interval.lower), sizeof(double));
    key.append(reinterpret_cast<const char*>(&fi.interval.upper), sizeof(double));
  }
  return key;
}

}  // namespace

RcbResult run_rcboost(const Dataset& train, const RcbParams& params) {
  if (params.max_rmp_calls < 1)
    throw std::invalid_argument("run_rcboost: max_rmp_calls must be >= 1");
  const Criterion criterion = params.tree_params.criterion;

  RcbResult result;
  result.pool.criterion = criterion;
  result.pool.p = train.p;
  result.pool.K = train.K;

  // Accumulated duals, initialized to all ones; these are the sample weights
  // for every tree fit.
  std::vector<double> lambda_bar(train.m, 1.0);

  TreeParams tp = params.tree_params;
  tp.seed = mix_seed(params.seed, 0);
  result.initial_tree = fit_tree(train, lambda_bar, tp);

  std::unordered_set<std::string> pooled;
  for (Rule& rule : extract_rules(result.initial_tree, train, criterion, -1, 0)) {
    pooled.insert(interval_key(rule));
    result.pool.rules.push_back(std::move(rule));
  }

  for (int t = 1; t <= params.max_rmp_calls; ++t) {
    const CoverProblem rmp = build_coverage(result.pool, train);
    LPSolution sol;
    try {
      sol = solve_covering_lp(rmp);
    } catch (const std::exception& e) {
      throw internal_error("run_rcboost: RMP solve failed at iteration " + std::to_string(t) +
                           ": " + e.what());
    }
    result.trace.rmp_calls = t;

    for (std::size_t i = 0; i < train.m; ++i) lambda_bar[i] += sol.duals[i];

    TreeParams cand_tp = params.tree_params;
    cand_tp.seed = mix_seed(params.seed, static_cast<std::uint64_t>(t));
    const TreeNode candidate_tree = fit_tree(train, lambda_bar, cand_tp);
    // Candidate impurities are the unweighted training-set values; the
    // accumulated duals only drive tree growth.
    std::vector<Rule> candidates = extract_rules(candidate_tree, train, criterion, -1, t);

    RcbIteration rec;
    rec.t = t;
    rec.objective = sol.objective;
    rec.pool_size = static_cast<int>(result.pool.rules.size());
    rec.candidates = static_cast<int>(candidates.size());
    rec.duals = sol.duals;
    rec.min_reduced_cost = std::numeric_limits<double>::infinity();

    std::vector<std::pair<Rule, double>> negative;
    std::vector<double> candidate_costs;
    for (Rule& rule : candidates) {
      const double rc = reduced_cost(1.0 + rule.impurity, rule.covered_ids, sol.duals);
      candidate_costs.push_back(rc);
      rec.min_reduced_cost = std::min(rec.min_reduced_cost, rc);
      if (rc < 0.0) negative.emplace_back(std::move(rule), rc);
    }
    rec.negative = static_cast<int>(negative.size());

    if (negative.empty()) {
      result.trace.converged = true;
      result.trace.final_candidate_reduced_costs = std::move(candidate_costs);
      result.trace.iterations.push_back(std::move(rec));
      break;
    }

    int admitted = 0;
    for (auto& [rule, rc] : negative) {
      if (!pooled.insert(interval_key(rule)).second) continue;  // already in J*
      rec.admitted_reduced_costs.push_back(rc);
      result.pool.rules.push_back(std::move(rule));
      ++admitted;
    }
    rec.admitted = admitted;
    result.trace.iterations.push_back(std::move(rec));

    if (admitted == 0) {
      // Every negative candidate is already pooled; admitting nothing would
      // loop on an identical RMP forever.
      result.trace.stalled = true;
      break;
    }
  }
  return result;
}

int rcb_predict(const RulePool& pool, std::span<const double> x) {
  try {
    return predict(pool, x, false).cls;
  } catch (const std::exception& e) {
    throw internal_error(std::string("rcb_predict: initial-tree partition violated: ") + e.what());
  }
}

}  // namespace ruleforge
