#include "ruleforge/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ruleforge {

Certificate check_lp_certificate(const CoverProblem& problem, const LPSolution& solution) {
  if (solution.primal.size() != problem.n_rules() ||
      solution.duals.size() != static_cast<std::size_t>(problem.m))
    throw std::invalid_argument("check_lp_certificate: dimension mismatch");

  Certificate cert;
  double primal_obj = 0.0;
  double dual_obj = 0.0;

  for (std::size_t j = 0; j < problem.n_rules(); ++j) {
    const double zj = solution.primal[j];
    cert.primal_residual = std::max(cert.primal_residual, -zj);
    primal_obj += problem.costs[j] * zj;

    double dual_sum = 0.0;
    for (int i : problem.covers[j]) dual_sum += solution.duals[static_cast<std::size_t>(i)];
    cert.dual_residual = std::max(cert.dual_residual, dual_sum - problem.costs[j]);
    cert.comp_slack_max =
        std::max(cert.comp_slack_max, std::fabs(zj * (problem.costs[j] - dual_sum)));
  }

  for (int i = 0; i < problem.m; ++i) {
    const double li = solution.duals[static_cast<std::size_t>(i)];
    cert.dual_residual = std::max(cert.dual_residual, -li);
    dual_obj += li;

    double row_sum = 0.0;
    for (int j : problem.covered_by[static_cast<std::size_t>(i)])
      row_sum += solution.primal[static_cast<std::size_t>(j)];
    cert.primal_residual = std::max(cert.primal_residual, 1.0 - row_sum);
    cert.comp_slack_max = std::max(cert.comp_slack_max, std::fabs(li * (row_sum - 1.0)));
  }

  cert.gap = std::fabs(primal_obj - dual_obj);
  return cert;
}

namespace {

// Majority-vote accuracy count over a sample subset.
int majority_hits(const Dataset& data, const std::vector<int>& ids) {
  std::vector<int> counts(data.K, 0);
  for (int id : ids) ++counts[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(id)])];
  return *std::max_element(counts.begin(), counts.end());
}

std::vector<double> split_points(const Dataset& data, const std::vector<int>& ids, int f) {
  std::vector<double> values;
  values.reserve(ids.size());
  for (int id : ids) values.push_back(data.at(static_cast<std::size_t>(id), static_cast<std::size_t>(f)));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<double> mids;
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    mids.push_back(values[i] + (values[i + 1] - values[i]) / 2.0);
  return mids;
}

// Most training hits achievable on `ids` by any axis-aligned tree of the
// given depth. Left/right subproblems are independent, so the exhaustive
// optimum decomposes over the root split.
int best_hits(const Dataset& data, const std::vector<int>& ids, int depth) {
  const int base = majority_hits(data, ids);
  if (depth == 0 || ids.empty()) return base;
  int best = base;
  for (std::size_t f = 0; f < data.p; ++f) {
    for (double thr : split_points(data, ids, static_cast<int>(f))) {
      std::vector<int> left, right;
      for (int id : ids) {
        if (data.at(static_cast<std::size_t>(id), f) <= thr) left.push_back(id);
        else right.push_back(id);
      }
      best = std::max(best, best_hits(data, left, depth - 1) + best_hits(data, right, depth - 1));
    }
  }
  return best;
}

}  // namespace

double enumerate_small_trees(const Dataset& data, int max_depth) {
  if (data.m > 50 || data.p > 4 || max_depth > 2 || max_depth < 0)
    throw std::runtime_error("enumerate_small_trees: instance beyond oracle bounds (m<=50, p<=4, depth<=2)");
  std::vector<int> ids(data.m);
  for (std::size_t i = 0; i < data.m; ++i) ids[i] = static_cast<int>(i);
  return static_cast<double>(best_hits(data, ids, max_depth)) / static_cast<double>(data.m);
}

}  // namespace ruleforge
