#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ruleforge/cover.hpp"
#include "ruleforge/dataset.hpp"
#include "ruleforge/rng.hpp"

namespace testsup {

// Random feasible covering instance: random incidence, then every uncovered
// sample is patched into a random rule so the invariants hold.
inline ruleforge::CoverProblem random_cover_instance(ruleforge::Rng& rng, int max_m, int max_n,
                                                     double cost_lo = 1.0, double cost_hi = 2.0) {
  ruleforge::CoverProblem problem;
  problem.m = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_m - 1)));
  const int n = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_n - 1)));
  std::vector<std::vector<char>> inc(static_cast<std::size_t>(n),
                                     std::vector<char>(static_cast<std::size_t>(problem.m), 0));
  const double density = 0.15 + 0.5 * rng.unit();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < problem.m; ++i)
      if (rng.unit() < density) inc[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 1;
  for (int i = 0; i < problem.m; ++i) {
    bool covered = false;
    for (int j = 0; j < n && !covered; ++j) covered = inc[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    if (!covered) inc[rng.below(static_cast<std::uint64_t>(n))][static_cast<std::size_t>(i)] = 1;
  }
  for (int j = 0; j < n; ++j) {
    problem.costs.push_back(cost_lo + (cost_hi - cost_lo) * rng.unit());
    std::vector<int> cover;
    for (int i = 0; i < problem.m; ++i)
      if (inc[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) cover.push_back(i);
    problem.covers.push_back(std::move(cover));
  }
  problem.finalize();
  return problem;
}

// Random dataset with continuous features and a planted threshold structure
// so trees have something to learn; every class is guaranteed present.
inline ruleforge::Dataset random_dataset(ruleforge::Rng& rng, std::size_t m, std::size_t p,
                                         std::size_t K, double label_noise = 0.15) {
  std::vector<double> features(m * p);
  for (double& v : features) v = rng.unit();
  std::vector<int> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (rng.unit() < label_noise) {
      labels[i] = static_cast<int>(rng.below(K));
    } else {
      const double v = features[i * p];  // class bands over feature 0
      labels[i] = std::min<int>(static_cast<int>(v * static_cast<double>(K)),
                                static_cast<int>(K) - 1);
    }
  }
  for (std::size_t k = 0; k < K; ++k) labels[k % m] = static_cast<int>(k);
  return ruleforge::make_dataset(std::move(features), std::move(labels), p, K);
}

inline std::string write_temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  return path.string();
}

inline std::string data_path(const std::string& file) {
  return std::string(RULEFORGE_DATA_DIR) + "/" + file;
}

inline bool data_file_exists(const std::string& file) {
  return std::filesystem::exists(data_path(file));
}

}  // namespace testsup
