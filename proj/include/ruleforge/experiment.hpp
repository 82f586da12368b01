#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ruleforge/dataset.hpp"
#include "ruleforge/rules.hpp"

#include "json.hpp"

namespace ruleforge {

// Nested cross-validation protocol shared by the mirco and rcboost commands.
struct ExperimentConfig {
  std::string dataset_name;
  int outer_folds = 10;
  int inner_folds = 4;
  std::uint64_t seed = 42;
  Criterion criterion = Criterion::gini;
  std::vector<int> depth_grid{5, 10, 20};
  std::vector<int> trees_grid{10, 50, 100};
  std::vector<int> rmp_grid{5, 10, 50, 100, 200};
  int workers = 0;  // 0 = available cores
  bool trace = false;
  bool build_full_model = false;  // retrain on all data for --save-model
};

struct ExperimentOutput {
  nlohmann::json report;
  RulePool full_model;  // populated when build_full_model is set
};

// MIRCO against tuned DT and RF baselines, per-fold and summary rows.
ExperimentOutput run_mirco_experiment(const Dataset& data, const ExperimentConfig& cfg);

// RCBoost against a tuned RF baseline, with the iniDT comparison row.
ExperimentOutput run_rcboost_experiment(const Dataset& data, const ExperimentConfig& cfg);

// Removes every "timing" object so reports can be compared byte-for-byte.
nlohmann::json strip_timing(nlohmann::json j);

nlohmann::json dataset_description(const Dataset& data, const std::string& name);

}  // namespace ruleforge
