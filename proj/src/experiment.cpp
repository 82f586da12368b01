#include "ruleforge/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "ruleforge/forest.hpp"
#include "ruleforge/mirco.hpp"
#include "ruleforge/rcboost.hpp"
#include "ruleforge/rng.hpp"

namespace ruleforge {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<HyperParams> make_grid(const std::vector<int>& depths,
                                   const std::vector<int>& trees,
                                   const std::vector<int>& rmp) {
  std::vector<HyperParams> grid;
  for (int d : depths) {
    if (trees.empty() && rmp.empty()) {
      grid.push_back(HyperParams{d, 0, 0});
    } else if (rmp.empty()) {
      for (int n : trees) grid.push_back(HyperParams{d, n, 0});
    } else {
      for (int r : rmp) grid.push_back(HyperParams{d, 0, r});
    }
  }
  return grid;
}

double tree_accuracy(const TreeNode& tree, const Dataset& val) {
  int hits = 0;
  for (std::size_t i = 0; i < val.m; ++i)
    if (tree_predict(tree, val.row(i)) == val.labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(val.m);
}

double forest_accuracy(const Forest& forest, const Dataset& val) {
  int hits = 0;
  for (std::size_t i = 0; i < val.m; ++i)
    if (forest_predict(forest, val.row(i)) == val.labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(val.m);
}

double rcb_accuracy(const RulePool& pool, const Dataset& val) {
  int hits = 0;
  for (std::size_t i = 0; i < val.m; ++i)
    if (rcb_predict(pool, val.row(i)) == val.labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(val.m);
}

TreeParams tree_params_for(int depth, Criterion criterion, std::uint64_t seed) {
  TreeParams tp;
  tp.max_depth = depth;
  tp.criterion = criterion;
  tp.seed = seed;
  return tp;
}

ForestParams forest_params_for(const HyperParams& hp, Criterion criterion, std::uint64_t seed) {
  ForestParams fp;
  fp.n_trees = hp.n_trees;
  fp.tree_params = tree_params_for(hp.max_depth, criterion, 0);
  fp.seed = seed;
  return fp;
}

RcbParams rcb_params_for(const HyperParams& hp, Criterion criterion, std::uint64_t seed) {
  RcbParams rp;
  rp.max_rmp_calls = hp.max_rmp_calls;
  rp.tree_params = tree_params_for(hp.max_depth, criterion, 0);
  rp.seed = seed;
  return rp;
}

nlohmann::json grid_runs_json(const GridSearchResult& result) {
  nlohmann::json runs = nlohmann::json::array();
  for (const GridRun& run : result.runs) {
    nlohmann::json r;
    r["max_depth"] = run.hp.max_depth;
    if (run.hp.n_trees > 0) r["n_trees"] = run.hp.n_trees;
    if (run.hp.max_rmp_calls > 0) r["max_rmp_calls"] = run.hp.max_rmp_calls;
    r["fold"] = run.fold;
    r["accuracy"] = run.accuracy;
    runs.push_back(std::move(r));
  }
  return runs;
}

// Most frequently chosen hyperparameters across folds; ties -> earliest in
// grid order. Used to retrain the saved model on the full dataset.
HyperParams modal_choice(const std::vector<HyperParams>& chosen,
                         const std::vector<HyperParams>& grid) {
  HyperParams best = grid.front();
  int best_count = -1;
  for (const HyperParams& g : grid) {
    int count = 0;
    for (const HyperParams& c : chosen)
      if (c == g) ++count;
    if (count > best_count) {
      best_count = count;
      best = g;
    }
  }
  return best;
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(v.size()));
  return s;
}

nlohmann::json stats_json(const std::vector<double>& v) {
  const Stats s = stats_of(v);
  return nlohmann::json{{"mean", s.mean}, {"std", s.stddev}, {"per_fold", v}};
}

// Runs `fold_fn` over all outer folds on a bounded worker pool and collects
// results in fold order, so reports are schedule-independent.
template <typename Fn>
std::vector<nlohmann::json> run_folds(int n_folds, int workers, Fn fold_fn) {
  std::vector<nlohmann::json> out(static_cast<std::size_t>(n_folds));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_folds));
  std::atomic<int> next{0};
  int n_workers = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  n_workers = std::min(n_workers, n_folds);

  auto body = [&]() {
    for (;;) {
      const int f = next.fetch_add(1);
      if (f >= n_folds) return;
      try {
        out[static_cast<std::size_t>(f)] = fold_fn(f);
      } catch (...) {
        errors[static_cast<std::size_t>(f)] = std::current_exception();
      }
    }
  };
  if (n_workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

nlohmann::json protocol_json(const ExperimentConfig& cfg, bool with_trees, bool with_rmp) {
  nlohmann::json grid;
  grid["max_depth"] = cfg.depth_grid;
  if (with_trees) grid["n_trees"] = cfg.trees_grid;
  if (with_rmp) grid["max_rmp_calls"] = cfg.rmp_grid;
  return nlohmann::json{{"outer_folds", cfg.outer_folds},
                        {"inner_folds", cfg.inner_folds},
                        {"seed", cfg.seed},
                        {"criterion", to_string(cfg.criterion)},
                        {"grid", grid},
                        {"workers", cfg.workers}};
}

std::vector<double> collect(const std::vector<nlohmann::json>& folds, const char* a,
                            const char* b) {
  std::vector<double> v;
  for (const auto& f : folds) v.push_back(f.at(a).at(b).get<double>());
  return v;
}

std::vector<double> collect(const std::vector<nlohmann::json>& folds, const char* a) {
  std::vector<double> v;
  for (const auto& f : folds) v.push_back(f.at(a).get<double>());
  return v;
}

}  // namespace

nlohmann::json strip_timing(nlohmann::json j) {
  if (j.is_object()) {
    j.erase("timing");
    for (auto& [key, value] : j.items()) value = strip_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timing(value);
  }
  return j;
}

nlohmann::json dataset_description(const Dataset& data, const std::string& name) {
  nlohmann::json enc = nlohmann::json::array();
  for (std::size_t f = 0; f < data.p; ++f) {
    nlohmann::json e;
    e["name"] = data.feature_names[f];
    e["categorical"] = data.encodings[f].categorical;
    if (data.encodings[f].categorical) e["values"] = data.encodings[f].values;
    enc.push_back(std::move(e));
  }
  return nlohmann::json{{"name", name},          {"m", data.m},
                        {"p", data.p},           {"K", data.K},
                        {"class_names", data.class_names}, {"encodings", enc}};
}

ExperimentOutput run_mirco_experiment(const Dataset& data, const ExperimentConfig& cfg) {
  const auto t_start = Clock::now();
  const std::vector<HyperParams> dt_grid = make_grid(cfg.depth_grid, {}, {});
  const std::vector<HyperParams> rf_grid = make_grid(cfg.depth_grid, cfg.trees_grid, {});

  FoldPlan plan = stratified_kfold(data, cfg.outer_folds, cfg.seed);
  plan.inner_folds = cfg.inner_folds;

  std::vector<HyperParams> mirco_choices(static_cast<std::size_t>(cfg.outer_folds));

  auto fold_fn = [&](int fold) -> nlohmann::json {
    const auto t_fold = Clock::now();
    const std::uint64_t fold_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(fold));
    const Dataset train = data.subset(fold_train_ids(plan, fold));
    const Dataset test = data.subset(fold_test_ids(plan, fold));

    FoldPlan inner = stratified_kfold(train, cfg.inner_folds, mix_seed(fold_seed, 0x1337));
    inner.inner_folds = cfg.inner_folds;

    const GridSearchResult dt_gs = grid_search(
        train, dt_grid, inner,
        [&](const Dataset& tr, const Dataset& val, const HyperParams& hp, std::uint64_t seed) {
          const std::vector<double> ones(tr.m, 1.0);
          return tree_accuracy(fit_tree(tr, ones, tree_params_for(hp.max_depth, cfg.criterion, seed)), val);
        });
    const GridSearchResult rf_gs = grid_search(
        train, rf_grid, inner,
        [&](const Dataset& tr, const Dataset& val, const HyperParams& hp, std::uint64_t seed) {
          return forest_accuracy(fit_forest(tr, forest_params_for(hp, cfg.criterion, seed)), val);
        });
    const GridSearchResult mirco_gs = grid_search(
        train, rf_grid, inner,
        [&](const Dataset& tr, const Dataset& val, const HyperParams& hp, std::uint64_t seed) {
          const MircoResult r = run_mirco(tr, forest_params_for(hp, cfg.criterion, seed), cfg.criterion);
          return evaluate_mirco(r, val).accuracy;
        });
    mirco_choices[static_cast<std::size_t>(fold)] = mirco_gs.best;

    // Final models on the full outer-train split.
    const std::vector<double> ones(train.m, 1.0);
    const TreeNode dt = fit_tree(
        train, ones, tree_params_for(dt_gs.best.max_depth, cfg.criterion, mix_seed(fold_seed, 1)));
    const Forest rf =
        fit_forest(train, forest_params_for(rf_gs.best, cfg.criterion, mix_seed(fold_seed, 2)));
    const MircoResult mirco = run_mirco(
        train, forest_params_for(mirco_gs.best, cfg.criterion, mix_seed(fold_seed, 3)), cfg.criterion);
    const EvalMetrics mirco_eval = evaluate_mirco(mirco, test);

    nlohmann::json f;
    f["fold"] = fold;
    f["n_train"] = train.m;
    f["n_test"] = test.m;
    f["seed"] = fold_seed;
    f["chosen"] = {{"dt", {{"max_depth", dt_gs.best.max_depth}}},
                   {"rf", {{"max_depth", rf_gs.best.max_depth}, {"n_trees", rf_gs.best.n_trees}}},
                   {"mirco", {{"max_depth", mirco_gs.best.max_depth}, {"n_trees", mirco_gs.best.n_trees}}}};
    f["inner_accuracy"] = {{"dt", dt_gs.best_mean_accuracy},
                           {"rf", rf_gs.best_mean_accuracy},
                           {"mirco", mirco_gs.best_mean_accuracy}};
    f["n_grid_runs"] = dt_gs.runs.size() + rf_gs.runs.size() + mirco_gs.runs.size();
    f["accuracy"] = {{"dt", tree_accuracy(dt, test)},
                     {"rf", forest_accuracy(rf, test)},
                     {"mirco", mirco_eval.accuracy}};
    f["missed_fraction"] = mirco_eval.missed_fraction;
    f["n_missed"] = mirco_eval.n_missed;
    f["rule_counts"] = {{"forest", mirco.n_rules_forest},
                        {"selected", mirco.n_rules_selected},
                        {"dt_leaves", mirco.n_rules_dt}};
    if (cfg.trace)
      f["grid_runs"] = {{"dt", grid_runs_json(dt_gs)},
                        {"rf", grid_runs_json(rf_gs)},
                        {"mirco", grid_runs_json(mirco_gs)}};
    f["timing"] = {{"seconds", seconds_since(t_fold)}};
    return f;
  };

  const std::vector<nlohmann::json> folds = run_folds(cfg.outer_folds, cfg.workers, fold_fn);

  nlohmann::json report;
  report["schema"] = 1;
  report["algorithm"] = "mirco";
  report["dataset"] = dataset_description(data, cfg.dataset_name);
  report["protocol"] = protocol_json(cfg, true, false);
  report["folds"] = folds;
  report["summary"] = {
      {"accuracy",
       {{"dt", stats_json(collect(folds, "accuracy", "dt"))},
        {"rf", stats_json(collect(folds, "accuracy", "rf"))},
        {"mirco", stats_json(collect(folds, "accuracy", "mirco"))}}},
      {"missed_fraction", stats_json(collect(folds, "missed_fraction"))},
      {"rule_counts",
       {{"forest", stats_json(collect(folds, "rule_counts", "forest"))},
        {"selected", stats_json(collect(folds, "rule_counts", "selected"))},
        {"dt_leaves", stats_json(collect(folds, "rule_counts", "dt_leaves"))}}}};
  report["timing"] = {{"total_seconds", seconds_since(t_start)}};

  ExperimentOutput out;
  out.report = std::move(report);
  if (cfg.build_full_model) {
    const HyperParams hp = modal_choice(mirco_choices, rf_grid);
    const MircoResult full =
        run_mirco(data, forest_params_for(hp, cfg.criterion, mix_seed(cfg.seed, 0xf0f0)), cfg.criterion);
    out.full_model = full.selected_pool;
  }
  return out;
}

ExperimentOutput run_rcboost_experiment(const Dataset& data, const ExperimentConfig& cfg) {
  const auto t_start = Clock::now();
  const std::vector<HyperParams> rf_grid = make_grid(cfg.depth_grid, cfg.trees_grid, {});
  const std::vector<HyperParams> rcb_grid = make_grid(cfg.depth_grid, {}, cfg.rmp_grid);

  FoldPlan plan = stratified_kfold(data, cfg.outer_folds, cfg.seed);
  plan.inner_folds = cfg.inner_folds;

  std::vector<HyperParams> rcb_choices(static_cast<std::size_t>(cfg.outer_folds));

  auto fold_fn = [&](int fold) -> nlohmann::json {
    const auto t_fold = Clock::now();
    const std::uint64_t fold_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(fold));
    const Dataset train = data.subset(fold_train_ids(plan, fold));
    const Dataset test = data.subset(fold_test_ids(plan, fold));

    FoldPlan inner = stratified_kfold(train, cfg.inner_folds, mix_seed(fold_seed, 0x1337));
    inner.inner_folds = cfg.inner_folds;

    const GridSearchResult rf_gs = grid_search(
        train, rf_grid, inner,
        [&](const Dataset& tr, const Dataset& val, const HyperParams& hp, std::uint64_t seed) {
          return forest_accuracy(fit_forest(tr, forest_params_for(hp, cfg.criterion, seed)), val);
        });
    const GridSearchResult rcb_gs = grid_search(
        train, rcb_grid, inner,
        [&](const Dataset& tr, const Dataset& val, const HyperParams& hp, std::uint64_t seed) {
          const RcbResult r = run_rcboost(tr, rcb_params_for(hp, cfg.criterion, seed));
          return rcb_accuracy(r.pool, val);
        });
    rcb_choices[static_cast<std::size_t>(fold)] = rcb_gs.best;

    const Forest rf =
        fit_forest(train, forest_params_for(rf_gs.best, cfg.criterion, mix_seed(fold_seed, 2)));
    const RcbResult rcb =
        run_rcboost(train, rcb_params_for(rcb_gs.best, cfg.criterion, mix_seed(fold_seed, 4)));

    nlohmann::json f;
    f["fold"] = fold;
    f["n_train"] = train.m;
    f["n_test"] = test.m;
    f["seed"] = fold_seed;
    f["chosen"] = {{"rf", {{"max_depth", rf_gs.best.max_depth}, {"n_trees", rf_gs.best.n_trees}}},
                   {"rcb",
                    {{"max_depth", rcb_gs.best.max_depth},
                     {"max_rmp_calls", rcb_gs.best.max_rmp_calls}}}};
    f["inner_accuracy"] = {{"rf", rf_gs.best_mean_accuracy}, {"rcb", rcb_gs.best_mean_accuracy}};
    f["n_grid_runs"] = rf_gs.runs.size() + rcb_gs.runs.size();
    f["accuracy"] = {{"rf", forest_accuracy(rf, test)},
                     {"inidt", tree_accuracy(rcb.initial_tree, test)},
                     {"rcb", rcb_accuracy(rcb.pool, test)}};
    f["rmp_calls"] = rcb.trace.rmp_calls;
    f["pool_size"] = rcb.pool.rules.size();
    f["converged"] = rcb.trace.converged;
    f["stalled"] = rcb.trace.stalled;
    if (cfg.trace) {
      nlohmann::json trace = nlohmann::json::array();
      for (const RcbIteration& it : rcb.trace.iterations) {
        trace.push_back({{"t", it.t},
                         {"objective", it.objective},
                         {"pool_size", it.pool_size},
                         {"candidates", it.candidates},
                         {"negative", it.negative},
                         {"admitted", it.admitted},
                         {"min_reduced_cost", it.min_reduced_cost}});
      }
      f["trace"] = std::move(trace);
      f["grid_runs"] = {{"rf", grid_runs_json(rf_gs)}, {"rcb", grid_runs_json(rcb_gs)}};
    }
    f["timing"] = {{"seconds", seconds_since(t_fold)}};
    return f;
  };

  const std::vector<nlohmann::json> folds = run_folds(cfg.outer_folds, cfg.workers, fold_fn);

  nlohmann::json report;
  report["schema"] = 1;
  report["algorithm"] = "rcboost";
  report["dataset"] = dataset_description(data, cfg.dataset_name);
  report["protocol"] = protocol_json(cfg, true, true);
  report["folds"] = folds;
  report["summary"] = {
      {"accuracy",
       {{"rf", stats_json(collect(folds, "accuracy", "rf"))},
        {"inidt", stats_json(collect(folds, "accuracy", "inidt"))},
        {"rcb", stats_json(collect(folds, "accuracy", "rcb"))}}},
      {"rmp_calls", stats_json(collect(folds, "rmp_calls"))},
      {"pool_size", stats_json(collect(folds, "pool_size"))}};
  report["timing"] = {{"total_seconds", seconds_since(t_start)}};

  ExperimentOutput out;
  out.report = std::move(report);
  if (cfg.build_full_model) {
    const HyperParams hp = modal_choice(rcb_choices, rcb_grid);
    const RcbResult full =
        run_rcboost(data, rcb_params_for(hp, cfg.criterion, mix_seed(cfg.seed, 0xf0f0)));
    out.full_model = full.pool;
  }
  return out;
}

}  // namespace ruleforge
