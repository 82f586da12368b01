#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ruleforge/cover.hpp"
#include "ruleforge/dataset.hpp"
#include "ruleforge/tree.hpp"

#include "json.hpp"

namespace ruleforge {

// One threshold clause of a root-to-leaf path.
struct Clause {
  int feature = 0;
  bool upper = true;  // true: x[feature] <= threshold, false: x[feature] > threshold
  double threshold = 0.0;
};

// Canonical half-open interval lower < x <= upper (either side may be
// unbounded). A path's clauses per feature intersect to one interval.
struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lower && x <= upper; }
  bool has_lower() const { return lower != -std::numeric_limits<double>::infinity(); }
  bool has_upper() const { return upper != std::numeric_limits<double>::infinity(); }
};

struct FeatureInterval {
  int feature = 0;
  Interval interval;
};

// A rule: conjunction of canonical intervals plus statistics evaluated on the
// full training set. Equality/dedup are exact on the interval thresholds.
struct Rule {
  std::vector<FeatureInterval> intervals;  // ascending feature index
  std::vector<int> class_counts;           // n_jk on the training set
  double impurity = 0.0;                   // w_j
  std::vector<int> covered_ids;            // I(j), ascending
  int provenance_tree = -1;
  int provenance_iteration = -1;

  int n_covered() const { return static_cast<int>(covered_ids.size()); }
  // Clause count of the canonical form: one clause per finite bound.
  int n_clauses() const;
  int majority_class() const;  // ties -> lowest class index
};

bool satisfies(const Rule& rule, std::span<const double> x);

struct RulePool {
  std::vector<Rule> rules;
  Criterion criterion = Criterion::gini;
  std::size_t p = 0;  // feature count of the originating dataset
  std::size_t K = 0;
};

// One rule per leaf reachable by at least one training sample; counts,
// impurity and I(j) are evaluated on `data` (the full training set, not a
// bootstrap sample).
std::vector<Rule> extract_rules(const TreeNode& tree, const Dataset& data,
                                Criterion criterion, int provenance_tree = -1,
                                int provenance_iteration = -1);

// Collapses rules with identical canonical intervals (first provenance kept).
RulePool dedup(std::vector<Rule> rules, Criterion criterion, std::size_t p, std::size_t K);

// Incidence + costs c_j = 1 + w_j. Throws naming the first uncovered sample.
CoverProblem build_coverage(const RulePool& pool, const Dataset& data);

struct PredictOutcome {
  int cls = 0;
  bool was_missed = false;
};

// Majority vote of satisfied rules (sum of n_jk); if none satisfied and
// fallback is on, rules are scored by the fraction of satisfied clauses and
// the max-scoring rules vote jointly. All argmax ties -> lowest class index.
// Throws when no rule is satisfied and fallback is off.
PredictOutcome predict(const RulePool& pool, std::span<const double> x, bool fallback);

struct EvalMetrics {
  double accuracy = 0.0;
  double missed_fraction = 0.0;
  int n_missed = 0;
  int n = 0;
};

EvalMetrics evaluate_pool(const RulePool& pool, const Dataset& test, bool fallback);

// Fixed-format text line, 6 decimals:
//   IF x0 > 1.500000 AND x2 <= 0.250000 THEN class=1 counts=[12,3] impurity=0.320000
// An unconstrained rule renders as  IF TRUE THEN ...
std::string format_rule(const Rule& rule);

nlohmann::json pool_to_json(const RulePool& pool);
RulePool pool_from_json(const nlohmann::json& j);

}  // namespace ruleforge
