#include "ruleforge/rules.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

#include "ruleforge/errors.hpp"

namespace ruleforge {

int Rule::n_clauses() const {
  int n = 0;
  for (const auto& fi : intervals) {
    if (fi.interval.has_lower()) ++n;
    if (fi.interval.has_upper()) ++n;
  }
  return n;
}

int Rule::majority_class() const {
  int best = 0;
  for (std::size_t k = 1; k < class_counts.size(); ++k)
    if (class_counts[k] > class_counts[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  return best;
}

bool satisfies(const Rule& rule, std::span<const double> x) {
  for (const auto& fi : rule.intervals)
    if (!fi.interval.contains(x[static_cast<std::size_t>(fi.feature)])) return false;
  return true;
}

namespace {

void evaluate_rule(Rule& rule, const std::vector<int>& covered, const Dataset& data,
                   Criterion criterion) {
  rule.covered_ids = covered;
  rule.class_counts.assign(data.K, 0);
  for (int id : covered)
    rule.class_counts[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(id)])] += 1;
  std::vector<double> totals(data.K);
  for (std::size_t k = 0; k < data.K; ++k) totals[k] = static_cast<double>(rule.class_counts[k]);
  rule.impurity = weighted_impurity(totals, criterion);
}

void collect(const TreeNode& node, std::vector<FeatureInterval>& path,
             std::vector<int>& routed, const Dataset& data, Criterion criterion,
             int tree_id, int iter_id, std::vector<Rule>& out) {
  if (node.is_leaf()) {
    if (routed.empty()) return;  // unreachable on this dataset
    Rule rule;
    rule.intervals = path;
    std::sort(rule.intervals.begin(), rule.intervals.end(),
              [](const FeatureInterval& a, const FeatureInterval& b) { return a.feature < b.feature; });
    rule.provenance_tree = tree_id;
    rule.provenance_iteration = iter_id;
    evaluate_rule(rule, routed, data, criterion);
    out.push_back(std::move(rule));
    return;
  }

  const auto f = node.feature_index;
  const double thr = node.threshold;
  auto tighten = [&](bool left) {
    // Returns (index of f in path, previous interval) after tightening.
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (path[i].feature == f) {
        const Interval prev = path[i].interval;
        if (left)
          path[i].interval.upper = std::min(path[i].interval.upper, thr);
        else
          path[i].interval.lower = std::max(path[i].interval.lower, thr);
        return std::pair<std::size_t, Interval>(i, prev);
      }
    }
    Interval iv;
    if (left) iv.upper = thr; else iv.lower = thr;
    path.push_back(FeatureInterval{f, iv});
    return std::pair<std::size_t, Interval>(path.size() - 1, Interval{});
  };

  std::vector<int> left_ids, right_ids;
  for (int id : routed) {
    if (data.at(static_cast<std::size_t>(id), static_cast<std::size_t>(f)) <= thr)
      left_ids.push_back(id);
    else
      right_ids.push_back(id);
  }

  {
    const std::size_t before = path.size();
    auto [idx, prev] = tighten(true);
    collect(*node.left, path, left_ids, data, criterion, tree_id, iter_id, out);
    if (path.size() > before) path.pop_back(); else path[idx].interval = prev;
  }
  {
    const std::size_t before = path.size();
    auto [idx, prev] = tighten(false);
    collect(*node.right, path, right_ids, data, criterion, tree_id, iter_id, out);
    if (path.size() > before) path.pop_back(); else path[idx].interval = prev;
  }
}

std::string interval_key(const Rule& rule) {
  // Exact bitwise thresholds: identical splits produce identical doubles, so
  // no epsilon merging.
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

std::vector<Rule> extract_rules(const TreeNode& tree, const Dataset& data,
                                Criterion criterion, int provenance_tree,
                                int provenance_iteration) {
  std::vector<Rule> rules;
  std::vector<FeatureInterval> path;
  std::vector<int> all(data.m);
  for (std::size_t i = 0; i < data.m; ++i) all[i] = static_cast<int>(i);
  collect(tree, path, all, data, criterion, provenance_tree, provenance_iteration, rules);
  return rules;
}

RulePool dedup(std::vector<Rule> rules, Criterion criterion, std::size_t p, std::size_t K) {
  RulePool pool;
  pool.criterion = criterion;
  pool.p = p;
  pool.K = K;
  std::unordered_map<std::string, std::size_t> seen;
  for (auto& rule : rules) {
    const std::string key = interval_key(rule);
    if (seen.emplace(key, pool.rules.size()).second) pool.rules.push_back(std::move(rule));
  }
  return pool;
}

CoverProblem build_coverage(const RulePool& pool, const Dataset& data) {
  CoverProblem problem;
  problem.m = static_cast<int>(data.m);
  problem.costs.reserve(pool.rules.size());
  problem.covers.reserve(pool.rules.size());
  for (const Rule& rule : pool.rules) {
    problem.costs.push_back(1.0 + rule.impurity);
    problem.covers.push_back(rule.covered_ids);
  }
  problem.finalize();  // throws naming the first uncovered sample
  return problem;
}

PredictOutcome predict(const RulePool& pool, std::span<const double> x, bool fallback) {
  if (pool.rules.empty()) throw std::runtime_error("predict: empty rule pool");
  std::vector<long long> votes(pool.K, 0);
  bool hit = false;
  for (const Rule& rule : pool.rules) {
    if (!satisfies(rule, x)) continue;
    hit = true;
    for (std::size_t k = 0; k < votes.size(); ++k) votes[k] += rule.class_counts[k];
  }
  if (!hit) {
    if (!fallback)
      throw std::runtime_error("predict: no rule satisfied and fallback is disabled");
    // Score rules by the fraction of satisfied clauses; the max-scoring rules
    // vote jointly.
    double best_frac = -1.0;
    std::vector<const Rule*> top;
    for (const Rule& rule : pool.rules) {
      int sat = 0;
      for (const auto& fi : rule.intervals) {
        const double v = x[static_cast<std::size_t>(fi.feature)];
        if (fi.interval.has_lower() && v > fi.interval.lower) ++sat;
        if (fi.interval.has_upper() && v <= fi.interval.upper) ++sat;
      }
      const int total = rule.n_clauses();
      const double frac = total == 0 ? 1.0 : static_cast<double>(sat) / total;
      if (frac > best_frac) {
        best_frac = frac;
        top.clear();
        top.push_back(&rule);
      } else if (frac == best_frac) {
        top.push_back(&rule);
      }
    }
    for (const Rule* rule : top)
      for (std::size_t k = 0; k < votes.size(); ++k) votes[k] += rule->class_counts[k];
  }
  int best = 0;
  for (std::size_t k = 1; k < votes.size(); ++k)
    if (votes[k] > votes[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  return PredictOutcome{best, !hit};
}

EvalMetrics evaluate_pool(const RulePool& pool, const Dataset& test, bool fallback) {
  EvalMetrics metrics;
  metrics.n = static_cast<int>(test.m);
  int correct = 0;
  for (std::size_t i = 0; i < test.m; ++i) {
    const PredictOutcome out = predict(pool, test.row(i), fallback);
    if (out.cls == test.labels[i]) ++correct;
    if (out.was_missed) ++metrics.n_missed;
  }
  metrics.accuracy = static_cast<double>(correct) / static_cast<double>(test.m);
  metrics.missed_fraction = static_cast<double>(metrics.n_missed) / static_cast<double>(test.m);
  return metrics;
}

std::string format_rule(const Rule& rule) {
  char buf[64];
  std::string line = "IF ";
  bool first = true;
  auto clause = [&](int feature, const char* op, double value) {
    if (!first) line += " AND ";
    first = false;
    std::snprintf(buf, sizeof(buf), "x%d %s %.6f", feature, op, value);
    line += buf;
  };
  for (const auto& fi : rule.intervals) {
    if (fi.interval.has_lower()) clause(fi.feature, ">", fi.interval.lower);
    if (fi.interval.has_upper()) clause(fi.feature, "<=", fi.interval.upper);
  }
  if (first) line += "TRUE";
  line += " THEN class=" + std::to_string(rule.majority_class()) + " counts=[";
  for (std::size_t k = 0; k < rule.class_counts.size(); ++k) {
    if (k) line += ",";
    line += std::to_string(rule.class_counts[k]);
  }
  std::snprintf(buf, sizeof(buf), "] impurity=%.6f", rule.impurity);
  line += buf;
  return line;
}

nlohmann::json pool_to_json(const RulePool& pool) {
  nlohmann::json j;
  j["schema"] = 1;
  j["kind"] = "rule_pool";
  j["criterion"] = to_string(pool.criterion);
  j["p"] = pool.p;
  j["K"] = pool.K;
  nlohmann::json rules = nlohmann::json::array();
  for (const Rule& rule : pool.rules) {
    nlohmann::json r;
    nlohmann::json intervals = nlohmann::json::array();
    for (const auto& fi : rule.intervals) {
      nlohmann::json iv;
      iv["feature"] = fi.feature;
      if (fi.interval.has_lower()) iv["lower"] = fi.interval.lower;
      if (fi.interval.has_upper()) iv["upper"] = fi.interval.upper;
      intervals.push_back(std::move(iv));
    }
    r["intervals"] = std::move(intervals);
    r["counts"] = rule.class_counts;
    r["impurity"] = rule.impurity;
    r["covered"] = rule.covered_ids;
    r["tree"] = rule.provenance_tree;
    r["iteration"] = rule.provenance_iteration;
    rules.push_back(std::move(r));
  }
  j["rules"] = std::move(rules);
  return j;
}

RulePool pool_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("kind", "") != "rule_pool")
    throw std::runtime_error("model file is not a serialized rule pool");
  RulePool pool;
  pool.criterion = criterion_from_string(j.at("criterion").get<std::string>());
  pool.p = j.at("p").get<std::size_t>();
  pool.K = j.at("K").get<std::size_t>();
  for (const auto& r : j.at("rules")) {
    Rule rule;
    for (const auto& iv : r.at("intervals")) {
      FeatureInterval fi;
      fi.feature = iv.at("feature").get<int>();
      if (iv.contains("lower")) fi.interval.lower = iv.at("lower").get<double>();
      if (iv.contains("upper")) fi.interval.upper = iv.at("upper").get<double>();
      rule.intervals.push_back(fi);
    }
    rule.class_counts = r.at("counts").get<std::vector<int>>();
    rule.impurity = r.at("impurity").get<double>();
    rule.covered_ids = r.at("covered").get<std::vector<int>>();
    rule.provenance_tree = r.value("tree", -1);
    rule.provenance_iteration = r.value("iteration", -1);
    pool.rules.push_back(std::move(rule));
  }
  return pool;
}

}  // namespace ruleforge
