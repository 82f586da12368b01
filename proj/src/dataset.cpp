#include "ruleforge/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ruleforge/rng.hpp"

namespace ruleforge {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

// RFC-4180-style: quoted fields, "" escapes, newlines allowed inside quotes,
// CRLF tolerated.
std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      row.push_back(field);
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
    } else {
      field += c;
    }
  }
  if (in_quotes) throw std::runtime_error("CSV parse error: unterminated quoted field");
  if (any && (!field.empty() || !row.empty())) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    row.push_back(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

void validate(const Dataset& d) {
  if (d.m < 1 || d.p < 1) throw std::runtime_error("dataset: need at least one sample and one feature");
  if (d.K < 2) throw std::runtime_error("dataset: need at least two classes");
  if (d.labels.size() != d.m) throw std::runtime_error("dataset: labels/sample count mismatch");
  if (d.features.size() != d.m * d.p) throw std::runtime_error("dataset: feature matrix shape mismatch");
  std::vector<char> seen(d.K, 0);
  for (std::size_t i = 0; i < d.m; ++i) {
    const int y = d.labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= d.K)
      throw std::runtime_error("dataset: label out of range at sample " + std::to_string(i));
    seen[static_cast<std::size_t>(y)] = 1;
  }
  for (std::size_t k = 0; k < d.K; ++k)
    if (!seen[k]) throw std::runtime_error("dataset: class " + std::to_string(k) + " has no samples");
  for (double v : d.features)
    if (!std::isfinite(v)) throw std::runtime_error("dataset: non-finite feature value");
}

}  // namespace

double ColumnEncoding::encode(const std::string& cell) const {
  if (!categorical) {
    double v;
    if (!parse_double(cell, v))
      throw std::runtime_error("encode: unparseable numeric value '" + cell + "'");
    return v;
  }
  const std::string t = trim(cell);
  const auto it = std::lower_bound(values.begin(), values.end(), t);
  if (it == values.end() || *it != t)
    throw std::runtime_error("encode: unseen categorical value '" + t + "'");
  return static_cast<double>(it - values.begin());
}

Dataset Dataset::subset(std::span<const int> ids) const {
  Dataset out;
  out.p = p;
  out.K = K;
  out.m = ids.size();
  out.feature_names = feature_names;
  out.class_names = class_names;
  out.encodings = encodings;
  out.features.reserve(out.m * p);
  out.labels.reserve(out.m);
  for (int id : ids) {
    const auto r = row(static_cast<std::size_t>(id));
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[static_cast<std::size_t>(id)]);
  }
  return out;
}

Dataset make_dataset(std::vector<double> features, std::vector<int> labels,
                     std::size_t p, std::size_t K) {
  Dataset d;
  d.features = std::move(features);
  d.labels = std::move(labels);
  d.p = p;
  d.K = K;
  d.m = d.labels.size();
  d.feature_names.reserve(p);
  for (std::size_t f = 0; f < p; ++f) d.feature_names.push_back("x" + std::to_string(f));
  for (std::size_t k = 0; k < K; ++k) d.class_names.push_back(std::to_string(k));
  d.encodings.resize(p);
  validate(d);
  return d;
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  auto rows = parse_csv(in);
  if (rows.empty()) throw std::runtime_error(path + ": empty file");

  const std::vector<std::string>& header = rows.front();
  const std::size_t n_cols = header.size();
  if (n_cols < 2) throw std::runtime_error(path + ": need a label column and at least one feature");

  // Label column by header name, else by 0-based index.
  std::size_t label_idx = n_cols;
  for (std::size_t c = 0; c < n_cols; ++c)
    if (trim(header[c]) == trim(label_column)) { label_idx = c; break; }
  if (label_idx == n_cols) {
    int idx;
    const std::string t = trim(label_column);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), idx);
    if (ec == std::errc() && ptr == t.data() + t.size() && idx >= 0 &&
        static_cast<std::size_t>(idx) < n_cols) {
      label_idx = static_cast<std::size_t>(idx);
    }
  }
  if (label_idx == n_cols)
    throw std::runtime_error(path + ": label column '" + label_column + "' not found in header");

  const std::size_t m = rows.size() - 1;
  if (m == 0) throw std::runtime_error(path + ": no data rows");
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != n_cols)
      throw std::runtime_error(path + ": row " + std::to_string(r + 1) + " has " +
                               std::to_string(rows[r].size()) + " fields, expected " +
                               std::to_string(n_cols));

  Dataset d;
  d.m = m;
  d.p = n_cols - 1;
  for (std::size_t c = 0; c < n_cols; ++c)
    if (c != label_idx) d.feature_names.push_back(trim(header[c]));

  // Classify each feature column: all cells numeric, or all non-numeric
  // (ordinal categorical). Mixed content is an error.
  d.encodings.resize(d.p);
  std::size_t f = 0;
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (c == label_idx) continue;
    std::size_t numeric = 0, empty = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      double v;
      if (trim(rows[r][c]).empty()) ++empty;
      else if (parse_double(rows[r][c], v)) ++numeric;
    }
    if (empty > 0)
      throw std::runtime_error(path + ": column '" + trim(header[c]) + "' has " +
                               std::to_string(empty) + " empty value(s); missing data is not supported");
    if (numeric != 0 && numeric != m)
      throw std::runtime_error(path + ": column '" + trim(header[c]) +
                               "' mixes numeric and non-numeric content (" +
                               std::to_string(numeric) + "/" + std::to_string(m) + " numeric)");
    if (numeric == 0) {
      std::set<std::string> distinct;
      for (std::size_t r = 1; r < rows.size(); ++r) distinct.insert(trim(rows[r][c]));
      d.encodings[f].categorical = true;
      d.encodings[f].values.assign(distinct.begin(), distinct.end());
    }
    ++f;
  }

  d.features.resize(m * d.p);
  d.labels.resize(m);
  std::vector<std::string> class_names;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    f = 0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (c == label_idx) continue;
      d.features[(r - 1) * d.p + f] = d.encodings[f].encode(rows[r][c]);
      ++f;
    }
    const std::string y = trim(rows[r][label_idx]);
    if (y.empty()) throw std::runtime_error(path + ": empty label at row " + std::to_string(r + 1));
    auto it = std::find(class_names.begin(), class_names.end(), y);
    if (it == class_names.end()) {
      class_names.push_back(y);
      it = std::prev(class_names.end());
    }
    d.labels[r - 1] = static_cast<int>(it - class_names.begin());
  }
  d.class_names = std::move(class_names);
  d.K = d.class_names.size();
  if (d.K < 2) throw std::runtime_error(path + ": label column has fewer than 2 distinct values");
  validate(d);
  return d;
}

FoldPlan stratified_kfold(const Dataset& data, int k, std::uint64_t seed) {
  if (k < 2) throw std::runtime_error("stratified_kfold: k must be >= 2");
  if (static_cast<std::size_t>(k) > data.m)
    throw std::runtime_error("stratified_kfold: k=" + std::to_string(k) + " exceeds sample count " +
                             std::to_string(data.m));
  FoldPlan plan;
  plan.outer_folds = k;
  plan.seed = seed;
  plan.assignments.assign(data.m, -1);

  // Per class: shuffle member ids, then deal them round-robin. The fold
  // counter runs on across classes so overall fold sizes stay balanced; a
  // class with fewer than k members is simply spread over consecutive folds.
  Rng rng(mix_seed(seed, 0x666f6c64));  // "fold"
  std::vector<std::vector<int>> by_class(data.K);
  for (std::size_t i = 0; i < data.m; ++i)
    by_class[static_cast<std::size_t>(data.labels[i])].push_back(static_cast<int>(i));
  int next_fold = 0;
  for (auto& ids : by_class) {
    rng.shuffle(ids);
    for (int id : ids) {
      plan.assignments[static_cast<std::size_t>(id)] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }
  return plan;
}

std::vector<int> fold_test_ids(const FoldPlan& plan, int fold) {
  std::vector<int> ids;
  for (std::size_t i = 0; i < plan.assignments.size(); ++i)
    if (plan.assignments[i] == fold) ids.push_back(static_cast<int>(i));
  return ids;
}

std::vector<int> fold_train_ids(const FoldPlan& plan, int fold) {
  std::vector<int> ids;
  for (std::size_t i = 0; i < plan.assignments.size(); ++i)
    if (plan.assignments[i] != fold) ids.push_back(static_cast<int>(i));
  return ids;
}

GridSearchResult grid_search(const Dataset& data, const std::vector<HyperParams>& grid,
                             const FoldPlan& folds, const FoldEval& eval) {
  if (grid.empty()) throw std::runtime_error("grid_search: empty grid");
  GridSearchResult result;
  double best = -1.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (int fold = 0; fold < folds.outer_folds; ++fold) {
      const auto train_ids = fold_train_ids(folds, fold);
      const auto test_ids = fold_test_ids(folds, fold);
      const Dataset train = data.subset(train_ids);
      const Dataset val = data.subset(test_ids);
      double acc;
      try {
        acc = eval(train, val, grid[g], mix_seed(folds.seed, static_cast<std::uint64_t>(fold)));
      } catch (const std::exception& e) {
        throw std::runtime_error("grid_search: trainer failed on fold " + std::to_string(fold) +
                                 ", grid point " + std::to_string(g) + ": " + e.what());
      }
      result.runs.push_back(GridRun{grid[g], fold, acc});
      sum += acc;
    }
    const double mean = sum / folds.outer_folds;
    if (mean > best) {  // strict: ties keep the earliest grid point
      best = mean;
      result.best = grid[g];
      result.best_mean_accuracy = mean;
    }
  }
  return result;
}

}  // namespace ruleforge
