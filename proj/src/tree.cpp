#include "ruleforge/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ruleforge/rng.hpp"

namespace ruleforge {

const char* to_string(Criterion c) { return c == Criterion::gini ? "gini" : "entropy"; }

Criterion criterion_from_string(const std::string& s) {
  if (s == "gini") return Criterion::gini;
  if (s == "entropy") return Criterion::entropy;
  throw std::runtime_error("unknown criterion '" + s + "' (expected gini or entropy)");
}

namespace {

// Purity score of a class-weight vector, larger is purer. Splits are ranked
// by score(left) + score(right); the weighted impurity decrease equals
// score(left) + score(right) - score(parent) for both criteria.
//   gini:    sum_k U_k^2 / U          (= U * (1 - impurity))
//   entropy: sum_k U_k ln(U_k/U) / lnK (= -U * normalized entropy)
double node_score(std::span<const double> totals, double total, Criterion criterion) {
  if (criterion == Criterion::gini) {
    double s = 0.0;
    for (double u : totals) s += u * u;
    return s / total;
  }
  double s = 0.0;
  for (double u : totals)
    if (u > 0.0) s += u * std::log(u / total);
  return s / std::log(static_cast<double>(totals.size()));
}

struct Builder {
  const Dataset& data;
  std::span<const double> weights;
  const TreeParams& params;
  Rng rng;
  std::vector<int> feature_pool;  // scratch for subsampling

  Builder(const Dataset& d, std::span<const double> w, const TreeParams& p)
      : data(d), weights(w), params(p), rng(p.seed) {
    feature_pool.resize(d.p);
    for (std::size_t f = 0; f < d.p; ++f) feature_pool[f] = static_cast<int>(f);
  }

  std::vector<int> candidate_features() {
    const int take = params.feature_subsample;
    if (take <= 0 || static_cast<std::size_t>(take) >= data.p) return feature_pool;
    // Partial Fisher-Yates, then sort so features are scanned in index order.
    std::vector<int> pool = feature_pool;
    std::vector<int> chosen;
    chosen.reserve(static_cast<std::size_t>(take));
    for (int i = 0; i < take; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.below(pool.size() - static_cast<std::size_t>(i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
      chosen.push_back(pool[static_cast<std::size_t>(i)]);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }

  TreeNode make_leaf(const std::vector<int>& ids) {
    TreeNode leaf;
    leaf.weighted_totals.assign(data.K, 0.0);
    leaf.raw_counts.assign(data.K, 0);
    leaf.sample_ids = ids;
    for (int id : ids) {
      const auto k = static_cast<std::size_t>(data.labels[static_cast<std::size_t>(id)]);
      leaf.weighted_totals[k] += weights[static_cast<std::size_t>(id)];
      leaf.raw_counts[k] += 1;
    }
    return leaf;
  }

  TreeNode build(const std::vector<int>& ids, int depth) {
    bool pure = true;
    const int first_label = data.labels[static_cast<std::size_t>(ids.front())];
    for (int id : ids)
      if (data.labels[static_cast<std::size_t>(id)] != first_label) { pure = false; break; }

    if (depth >= params.max_depth || pure ||
        static_cast<int>(ids.size()) < params.min_samples_split) {
      return make_leaf(ids);
    }

    const auto features = candidate_features();
    const auto split = find_best_split(data, ids, weights, features, params.criterion);
    if (!split) return make_leaf(ids);

    std::vector<int> left_ids, right_ids;
    for (int id : ids) {
      if (data.at(static_cast<std::size_t>(id), static_cast<std::size_t>(split->feature)) <=
          split->threshold)
        left_ids.push_back(id);
      else
        right_ids.push_back(id);
    }

    TreeNode node;
    node.feature_index = split->feature;
    node.threshold = split->threshold;
    node.left = std::make_unique<TreeNode>(build(left_ids, depth + 1));
    node.right = std::make_unique<TreeNode>(build(right_ids, depth + 1));
    return node;
  }
};

}  // namespace

double weighted_impurity(std::span<const double> class_totals, Criterion criterion) {
  double total = 0.0;
  for (double u : class_totals) {
    if (u < 0.0) throw std::invalid_argument("weighted_impurity: negative class total");
    total += u;
  }
  if (total <= 0.0) throw std::invalid_argument("weighted_impurity: all-zero class totals");
  if (class_totals.size() < 2) return 0.0;
  if (criterion == Criterion::gini) {
    double s = 0.0;
    for (double u : class_totals) {
      const double r = u / total;
      s += r * r;
    }
    return 1.0 - s;
  }
  double h = 0.0;
  for (double u : class_totals) {
    if (u <= 0.0) continue;
    const double r = u / total;
    h -= r * std::log(r);
  }
  return h / std::log(static_cast<double>(class_totals.size()));
}

std::optional<SplitChoice> find_best_split(const Dataset& data, std::span<const int> ids,
                                           std::span<const double> weights,
                                           std::span<const int> features,
                                           Criterion criterion) {
  const std::size_t K = data.K;
  std::vector<double> parent(K, 0.0);
  double parent_total = 0.0;
  for (int id : ids) {
    const double w = weights[static_cast<std::size_t>(id)];
    parent[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(id)])] += w;
    parent_total += w;
  }
  const double parent_score = node_score(parent, parent_total, criterion);

  struct Entry {
    double value;
    double weight;
    int label;
  };
  std::vector<Entry> entries(ids.size());
  std::vector<double> left(K);

  SplitChoice best;
  double best_children = -std::numeric_limits<double>::infinity();
  bool found = false;

  for (int f : features) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto id = static_cast<std::size_t>(ids[i]);
      entries[i] = Entry{data.at(id, static_cast<std::size_t>(f)),
                         weights[id], data.labels[id]};
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.value < b.value; });
    if (entries.front().value == entries.back().value) continue;

    std::fill(left.begin(), left.end(), 0.0);
    double left_total = 0.0;
    for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
      left[static_cast<std::size_t>(entries[i].label)] += entries[i].weight;
      left_total += entries[i].weight;
      if (entries[i].value == entries[i + 1].value) continue;

      std::vector<double> right(K);
      for (std::size_t k = 0; k < K; ++k) right[k] = parent[k] - left[k];
      const double right_total = parent_total - left_total;
      const double children =
          node_score(left, left_total, criterion) + node_score(right, right_total, criterion);
      // Strictly-greater keeps the first maximum; features ascend and
      // thresholds ascend within a feature, giving the stated tie-break.
      if (children > best_children) {
        best_children = children;
        best.feature = f;
        best.threshold = entries[i].value + (entries[i + 1].value - entries[i].value) / 2.0;
        found = true;
      }
    }
  }

  if (!found || !(best_children > parent_score)) return std::nullopt;
  best.decrease = best_children - parent_score;
  return best;
}

TreeNode fit_tree(const Dataset& data, std::span<const double> sample_weights,
                  const TreeParams& params) {
  if (params.max_depth < 1) throw std::invalid_argument("fit_tree: max_depth must be >= 1");
  if (sample_weights.size() != data.m)
    throw std::invalid_argument("fit_tree: weights length != sample count");
  std::vector<int> ids;
  ids.reserve(data.m);
  for (std::size_t i = 0; i < data.m; ++i) {
    const double w = sample_weights[i];
    if (w < 0.0) throw std::invalid_argument("fit_tree: negative sample weight");
    if (w > 0.0) ids.push_back(static_cast<int>(i));
  }
  if (ids.empty()) throw std::invalid_argument("fit_tree: no sample has positive weight");

  Builder builder(data, sample_weights, params);
  return builder.build(ids, 0);
}

const TreeNode& route_to_leaf(const TreeNode& root, std::span<const double> x) {
  const TreeNode* node = &root;
  while (!node->is_leaf()) {
    node = (x[static_cast<std::size_t>(node->feature_index)] <= node->threshold)
               ? node->left.get()
               : node->right.get();
  }
  return *node;
}

int tree_predict(const TreeNode& root, std::span<const double> x) {
  const TreeNode& leaf = route_to_leaf(root, x);
  int best = 0;
  for (std::size_t k = 1; k < leaf.weighted_totals.size(); ++k)
    if (leaf.weighted_totals[k] > leaf.weighted_totals[static_cast<std::size_t>(best)])
      best = static_cast<int>(k);
  return best;
}

int leaf_count(const TreeNode& root) {
  if (root.is_leaf()) return 1;
  return leaf_count(*root.left) + leaf_count(*root.right);
}

int tree_depth(const TreeNode& root) {
  if (root.is_leaf()) return 0;
  return 1 + std::max(tree_depth(*root.left), tree_depth(*root.right));
}

bool same_structure(const TreeNode& a, const TreeNode& b) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return true;
  if (a.feature_index != b.feature_index || a.threshold != b.threshold) return false;
  return same_structure(*a.left, *b.left) && same_structure(*a.right, *b.right);
}

}  // namespace ruleforge
