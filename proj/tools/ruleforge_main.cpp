// ruleforge: minimum rule covers from random forests (mirco), LP-dual rule
// generation boosting (rcboost), rule export, and brute-force oracles.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ruleforge/cover.hpp"
#include "ruleforge/dataset.hpp"
#include "ruleforge/errors.hpp"
#include "ruleforge/experiment.hpp"
#include "ruleforge/lp.hpp"
#include "ruleforge/oracles.hpp"
#include "ruleforge/rules.hpp"

namespace {

using ruleforge::CoverProblem;

struct CommonOpts {
  std::string data;
  std::string label;
  std::string out;
  std::string save_model;
  std::string name;
  int outer = 10;
  int inner = 4;
  std::uint64_t seed = 42;
  std::string criterion = "gini";
  std::vector<int> depth_grid{5, 10, 20};
  std::vector<int> trees_grid{10, 50, 100};
  std::vector<int> rmp_grid{5, 10, 50, 100, 200};
  int workers = 0;
  bool trace = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_rmp) {
  cmd->add_option("--data", o.data, "input CSV (header required)")->required();
  cmd->add_option("--label", o.label, "label column name or 0-based index")->required();
  cmd->add_option("--outer", o.outer, "outer CV folds")->default_val(10);
  cmd->add_option("--inner", o.inner, "inner CV folds for tuning")->default_val(4);
  cmd->add_option("--seed", o.seed, "base RNG seed")
      ->envname("RULEFORGE_SEED")
      ->default_val(42);
  cmd->add_option("--criterion", o.criterion, "impurity criterion")
      ->check(CLI::IsMember({"gini", "entropy"}))
      ->default_val("gini");
  cmd->add_option("--depth-grid", o.depth_grid, "max_depth grid")->delimiter(',');
  cmd->add_option("--trees-grid", o.trees_grid, "n_trees grid")->delimiter(',');
  if (with_rmp) cmd->add_option("--rmp-grid", o.rmp_grid, "max RMP call grid")->delimiter(',');
  cmd->add_option("--workers", o.workers, "concurrent outer folds (0 = cores)")->default_val(0);
  cmd->add_option("--out", o.out, "report JSON path")->required();
  cmd->add_option("--save-model", o.save_model, "also save a rule pool trained on all data");
  cmd->add_option("--name", o.name, "dataset name for the report (default: file stem)");
  cmd->add_flag("--trace", o.trace, "include per-iteration and per-grid-run traces");
}

ruleforge::ExperimentConfig to_config(const CommonOpts& o) {
  ruleforge::ExperimentConfig cfg;
  cfg.dataset_name =
      o.name.empty() ? std::filesystem::path(o.data).stem().string() : o.name;
  cfg.outer_folds = o.outer;
  cfg.inner_folds = o.inner;
  cfg.seed = o.seed;
  cfg.criterion = ruleforge::criterion_from_string(o.criterion);
  cfg.depth_grid = o.depth_grid;
  cfg.trees_grid = o.trees_grid;
  cfg.rmp_grid = o.rmp_grid;
  cfg.workers = o.workers;
  cfg.trace = o.trace;
  cfg.build_full_model = !o.save_model.empty();
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void write_report(const std::string& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

CoverProblem load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  nlohmann::json j;
  in >> j;
  CoverProblem problem;
  problem.m = j.at("m").get<int>();
  problem.costs = j.at("costs").get<std::vector<double>>();
  problem.covers = j.at("covers").get<std::vector<std::vector<int>>>();
  if (problem.costs.size() != problem.covers.size())
    throw std::runtime_error("instance: costs and covers must have equal length");
  problem.finalize();
  return problem;
}

std::string rules_text(const ruleforge::RulePool& pool) {
  // Sorted by (impurity ascending, rule id): the cheapest rules first.
  std::vector<std::size_t> order(pool.rules.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pool.rules[a].impurity != pool.rules[b].impurity)
      return pool.rules[a].impurity < pool.rules[b].impurity;
    return a < b;
  });
  std::string text;
  for (std::size_t i : order) text += ruleforge::format_rule(pool.rules[i]) + "\n";
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rule covers for forest interpretation and LP-driven boosting"};
  app.require_subcommand(1);

  CommonOpts mirco_opts, rcb_opts;
  CLI::App* cmd_mirco = app.add_subcommand("mirco", "minimum rule cover of a random forest");
  add_common(cmd_mirco, mirco_opts, false);
  CLI::App* cmd_rcb = app.add_subcommand("rcboost", "rule cover boosting of a decision tree");
  add_common(cmd_rcb, rcb_opts, true);

  std::string model_path, export_out;
  CLI::App* cmd_export = app.add_subcommand("export-rules", "write a saved rule pool as text");
  cmd_export->add_option("--model", model_path, "rule pool JSON")->required();
  cmd_export->add_option("--out", export_out, "output text file")->required();

  CLI::App* cmd_oracle =
      app.add_subcommand("oracle", "brute-force verifiers for covers, LPs and tiny trees");
  std::string oracle_instance, oracle_data, oracle_label;
  int oracle_depth = 2;
  CLI::App* oracle_exact =
      cmd_oracle->add_subcommand("exact-cover", "exhaustive optimum of a covering instance");
  oracle_exact->add_option("--instance", oracle_instance, "instance JSON {m, costs, covers}")
      ->required();
  CLI::App* oracle_lp =
      cmd_oracle->add_subcommand("lp-check", "solve the covering LP and print certificate residuals");
  oracle_lp->add_option("--instance", oracle_instance, "instance JSON {m, costs, covers}")
      ->required();
  CLI::App* oracle_tree =
      cmd_oracle->add_subcommand("tree-enum", "best achievable accuracy of a depth<=2 tree");
  oracle_tree->add_option("--data", oracle_data, "tiny CSV (m<=50, p<=4)")->required();
  oracle_tree->add_option("--label", oracle_label, "label column")->required();
  oracle_tree->add_option("--max-depth", oracle_depth, "tree depth bound")->default_val(2);
  cmd_oracle->require_subcommand(1);

  try {
    app.parse(argc, argv);

    if (*cmd_mirco || *cmd_rcb) {
      const CommonOpts& o = *cmd_mirco ? mirco_opts : rcb_opts;
      const ruleforge::Dataset data = ruleforge::load_csv(o.data, o.label);
      const ruleforge::ExperimentConfig cfg = to_config(o);
      const ruleforge::ExperimentOutput result = *cmd_mirco
                                                     ? ruleforge::run_mirco_experiment(data, cfg)
                                                     : ruleforge::run_rcboost_experiment(data, cfg);
      write_report(o.out, result.report);
      if (!o.save_model.empty())
        write_text(o.save_model, ruleforge::pool_to_json(result.full_model).dump(2) + "\n");
      std::cout << "report written to " << o.out << "\n";
    } else if (*cmd_export) {
      std::ifstream in(model_path);
      if (!in) throw std::runtime_error("cannot open model file: " + model_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("model file is not valid JSON: " + std::string(e.what()));
      }
      write_text(export_out, rules_text(ruleforge::pool_from_json(j)));
      std::cout << "rules written to " << export_out << "\n";
    } else if (*oracle_exact) {
      const CoverProblem problem = load_instance(oracle_instance);
      const ruleforge::CoverSolution exact = ruleforge::exact_cover(problem);
      const ruleforge::CoverSolution greedy = ruleforge::greedy_cover(problem);
      nlohmann::json out{{"exact", {{"selected", exact.selected}, {"cost", exact.total_cost}}},
                         {"greedy", {{"selected", greedy.selected}, {"cost", greedy.total_cost}}}};
      std::cout << out.dump(2) << "\n";
    } else if (*oracle_lp) {
      const CoverProblem problem = load_instance(oracle_instance);
      const ruleforge::LPSolution sol = ruleforge::solve_covering_lp(problem);
      const ruleforge::Certificate cert = ruleforge::check_lp_certificate(problem, sol);
      nlohmann::json out{{"objective", sol.objective},
                         {"primal", sol.primal},
                         {"duals", sol.duals},
                         {"iterations", sol.iterations},
                         {"certificate",
                          {{"primal_residual", cert.primal_residual},
                           {"dual_residual", cert.dual_residual},
                           {"gap", cert.gap},
                           {"comp_slack_max", cert.comp_slack_max},
                           {"pass", cert.pass()}}}};
      std::cout << out.dump(2) << "\n";
    } else if (*oracle_tree) {
      const ruleforge::Dataset data = ruleforge::load_csv(oracle_data, oracle_label);
      const double best = ruleforge::enumerate_small_trees(data, oracle_depth);
      nlohmann::json out{{"best_training_accuracy", best}, {"max_depth", oracle_depth}};
      std::cout << out.dump(2) << "\n";
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ruleforge::internal_error& e) {
    std::cerr << "internal invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
