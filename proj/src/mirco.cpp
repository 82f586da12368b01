#include "ruleforge/mirco.hpp"

#include "ruleforge/cover.hpp"
#include "ruleforge/errors.hpp"

namespace ruleforge {

MircoResult run_mirco(const Dataset& train, const ForestParams& forest_params,
                      Criterion criterion) {
  ForestParams fp = forest_params;
  fp.tree_params.criterion = criterion;
  const Forest forest = fit_forest(train, fp);

  // Rules from every tree, with impurities and coverage evaluated on the full
  // training set rather than the bootstrap samples.
  std::vector<Rule> raw;
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    auto rules = extract_rules(forest.trees[t], train, criterion, static_cast<int>(t));
    raw.insert(raw.end(), std::make_move_iterator(rules.begin()),
               std::make_move_iterator(rules.end()));
  }
  RulePool pool = dedup(std::move(raw), criterion, train.p, train.K);

  const CoverProblem problem = build_coverage(pool, train);
  const CoverSolution cover = greedy_cover(problem);

  MircoResult result;
  result.n_rules_forest = static_cast<int>(pool.rules.size());
  result.selected_pool.criterion = criterion;
  result.selected_pool.p = train.p;
  result.selected_pool.K = train.K;
  for (int j : cover.selected)
    result.selected_pool.rules.push_back(pool.rules[static_cast<std::size_t>(j)]);
  result.n_rules_selected = static_cast<int>(result.selected_pool.rules.size());

  // Coverage guarantee: the selected rules must cover every training sample.
  std::vector<char> covered(train.m, 0);
  for (const Rule& rule : result.selected_pool.rules)
    for (int i : rule.covered_ids) covered[static_cast<std::size_t>(i)] = 1;
  for (std::size_t i = 0; i < train.m; ++i)
    if (!covered[i])
      throw internal_error("run_mirco: selected rules leave training sample " +
                           std::to_string(i) + " uncovered");

  // Baseline decision tree at the same depth, for the rule-count comparison.
  TreeParams dt = fp.tree_params;
  dt.feature_subsample = 0;
  const std::vector<double> ones(train.m, 1.0);
  result.n_rules_dt = leaf_count(fit_tree(train, ones, dt));

  const EvalMetrics train_metrics = evaluate_pool(result.selected_pool, train, true);
  result.accuracy = train_metrics.accuracy;
  result.missed_fraction = train_metrics.missed_fraction;
  return result;
}

EvalMetrics evaluate_mirco(const MircoResult& result, const Dataset& test) {
  return evaluate_pool(result.selected_pool, test, true);
}

}  // namespace ruleforge
