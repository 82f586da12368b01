#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ruleforge {

// Encoding applied to one original CSV feature column. Categorical columns
// are ordinally encoded: distinct values sorted lexicographically map to
// 0, 1, 2, ...
struct ColumnEncoding {
  bool categorical = false;
  std::vector<std::string> values;  // sorted distinct values, index = code

  double encode(const std::string& cell) const;
};

// Immutable after construction; safe for shared concurrent reads.
struct Dataset {
  std::vector<double> features;  // row-major, m * p
  std::vector<int> labels;       // size m, values in [0, K)
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;    // index -> label text, first-appearance order
  std::vector<ColumnEncoding> encodings;   // size p
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t K = 0;

  double at(std::size_t i, std::size_t f) const { return features[i * p + f]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features.data() + i * p, p);
  }

  Dataset subset(std::span<const int> ids) const;
};

// Builds a dataset from in-memory values (tests, synthetic instances) and
// validates the invariants.
Dataset make_dataset(std::vector<double> features, std::vector<int> labels,
                     std::size_t p, std::size_t K);

// Loads an RFC-4180-style CSV (header required, UTF-8, '.' decimal separator).
// `label_column` is a header name, or a 0-based column index if no header
// matches and the string parses as an integer.
Dataset load_csv(const std::string& path, const std::string& label_column);

struct FoldPlan {
  int outer_folds = 0;
  int inner_folds = 0;              // informational; set by the experiment driver
  std::vector<int> assignments;     // per-sample outer fold index
  std::uint64_t seed = 0;
};

// Stratified k-fold assignment. Deterministic for fixed (dataset, k, seed).
// Classes with fewer than k members are spread round-robin.
FoldPlan stratified_kfold(const Dataset& data, int k, std::uint64_t seed);

std::vector<int> fold_test_ids(const FoldPlan& plan, int fold);
std::vector<int> fold_train_ids(const FoldPlan& plan, int fold);

struct HyperParams {
  int max_depth = 5;
  int n_trees = 0;        // 0 when not applicable to the algorithm
  int max_rmp_calls = 0;  // 0 when not applicable to the algorithm
  bool operator==(const HyperParams&) const = default;
};

struct GridRun {
  HyperParams hp;
  int fold = 0;
  double accuracy = 0.0;
};

struct GridSearchResult {
  HyperParams best;
  double best_mean_accuracy = 0.0;
  std::vector<GridRun> runs;
};

// Evaluates one (train, validation) pair under the given hyperparameters and
// returns the validation accuracy. The seed is derived per fold.
using FoldEval = std::function<double(const Dataset& train, const Dataset& val,
                                      const HyperParams& hp, std::uint64_t seed)>;

// Returns the grid combination maximizing mean fold accuracy; ties broken by
// earliest grid order. A trainer failure on any fold propagates with fold
// context attached.
GridSearchResult grid_search(const Dataset& data, const std::vector<HyperParams>& grid,
                             const FoldPlan& folds, const FoldEval& eval);

}  // namespace ruleforge
