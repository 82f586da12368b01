#include "ruleforge/forest.hpp"

#include <cmath>
#include <stdexcept>

#include "ruleforge/rng.hpp"

namespace ruleforge {

Forest fit_forest(const Dataset& data, const ForestParams& params) {
  if (params.n_trees < 1) throw std::invalid_argument("fit_forest: n_trees must be >= 1");
  Forest forest;
  forest.params = params;
  forest.trees.reserve(static_cast<std::size_t>(params.n_trees));
  forest.tree_seeds.reserve(static_cast<std::size_t>(params.n_trees));

  const int mtry = params.sqrt_features
                       ? static_cast<int>(std::ceil(std::sqrt(static_cast<double>(data.p))))
                       : params.tree_params.feature_subsample;

  for (int t = 0; t < params.n_trees; ++t) {
    const std::uint64_t tree_seed = mix_seed(params.seed, static_cast<std::uint64_t>(t));
    forest.tree_seeds.push_back(tree_seed);

    std::vector<double> weights;
    if (params.bootstrap) {
      // Size-m bootstrap with replacement, expressed as multiplicity weights.
      weights.assign(data.m, 0.0);
      Rng rng(mix_seed(tree_seed, 0xb007));
      for (std::size_t i = 0; i < data.m; ++i)
        weights[static_cast<std::size_t>(rng.below(data.m))] += 1.0;
    } else {
      weights.assign(data.m, 1.0);
    }

    TreeParams tp = params.tree_params;
    tp.feature_subsample = mtry;
    tp.seed = mix_seed(tree_seed, 0x7265);
    forest.trees.push_back(fit_tree(data, weights, tp));
  }
  return forest;
}

int forest_predict(const Forest& forest, std::span<const double> x) {
  const std::size_t K = route_to_leaf(forest.trees.front(), x).weighted_totals.size();
  std::vector<double> votes(K, 0.0);
  for (const TreeNode& tree : forest.trees) {
    const TreeNode& leaf = route_to_leaf(tree, x);
    if (forest.params.per_tree_vote) {
      int best = 0;
      for (std::size_t k = 1; k < leaf.weighted_totals.size(); ++k)
        if (leaf.weighted_totals[k] > leaf.weighted_totals[static_cast<std::size_t>(best)])
          best = static_cast<int>(k);
      votes[static_cast<std::size_t>(best)] += 1.0;
    } else {
      for (std::size_t k = 0; k < leaf.weighted_totals.size(); ++k)
        votes[k] += leaf.weighted_totals[k];
    }
  }
  int best = 0;
  for (std::size_t k = 1; k < votes.size(); ++k)
    if (votes[k] > votes[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  return best;
}

}  // namespace ruleforge
