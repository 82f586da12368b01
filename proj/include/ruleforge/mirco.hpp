#pragma once

#include "ruleforge/forest.hpp"
#include "ruleforge/rules.hpp"

namespace ruleforge {

struct MircoResult {
  RulePool selected_pool;    // J-hat, covers all training samples
  int n_rules_selected = 0;
  int n_rules_forest = 0;    // deduplicated forest rule count
  int n_rules_dt = 0;        // leaf count of a baseline tree at the same depth
  double accuracy = 0.0;     // training accuracy of the selected pool
  double missed_fraction = 0.0;  // on training data, always 0 by construction
};

// Forest -> rule pool -> impurities on the full training set -> coverage ->
// greedy cover. The returned pool covers every training sample.
MircoResult run_mirco(const Dataset& train, const ForestParams& forest_params,
                      Criterion criterion);

// Test-set metrics with fallback prediction enabled, so every sample receives
// a class; missed_fraction counts samples no selected rule satisfied.
EvalMetrics evaluate_mirco(const MircoResult& result, const Dataset& test);

}  // namespace ruleforge
