#include "ruleforge/cover.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ruleforge {

void CoverProblem::finalize() {
  covered_by.assign(static_cast<std::size_t>(m), {});
  for (std::size_t j = 0; j < covers.size(); ++j) {
    for (int i : covers[j]) {
      if (i < 0 || i >= m)
        throw std::runtime_error("cover problem: sample id " + std::to_string(i) + " out of range");
      covered_by[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
    }
  }
  for (int i = 0; i < m; ++i)
    if (covered_by[static_cast<std::size_t>(i)].empty())
      throw std::runtime_error("cover problem: sample " + std::to_string(i) +
                               " is not covered by any rule");
  for (double c : costs)
    if (!(c >= 1.0))
      throw std::runtime_error("cover problem: cost below 1 (impurities must be nonnegative)");
}

CoverSolution greedy_cover(const CoverProblem& problem) {
  const std::size_t n = problem.n_rules();
  std::vector<char> covered(static_cast<std::size_t>(problem.m), 0);
  std::vector<char> selected(n, 0);
  std::vector<int> uncovered_count(n);
  for (std::size_t j = 0; j < n; ++j) uncovered_count[j] = static_cast<int>(problem.covers[j].size());
  int remaining = problem.m;

  CoverSolution solution;
  while (remaining > 0) {
    int best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (selected[j] || uncovered_count[j] == 0) continue;
      const double ratio = problem.costs[j] / static_cast<double>(uncovered_count[j]);
      if (ratio < best_ratio) {  // strict: ties keep the lower rule id
        best_ratio = ratio;
        best = static_cast<int>(j);
      }
    }
    if (best < 0)
      throw std::runtime_error("greedy_cover: no rule covers the remaining samples");
    selected[static_cast<std::size_t>(best)] = 1;
    solution.selected.push_back(best);
    for (int i : problem.covers[static_cast<std::size_t>(best)]) {
      if (covered[static_cast<std::size_t>(i)]) continue;
      covered[static_cast<std::size_t>(i)] = 1;
      --remaining;
      for (int j : problem.covered_by[static_cast<std::size_t>(i)])
        --uncovered_count[static_cast<std::size_t>(j)];
    }
  }
  std::sort(solution.selected.begin(), solution.selected.end());
  solution.total_cost = 0.0;
  for (int j : solution.selected) solution.total_cost += problem.costs[static_cast<std::size_t>(j)];
  return remove_redundant(solution, problem);
}

CoverSolution remove_redundant(const CoverSolution& solution, const CoverProblem& problem) {
  // Coverage multiplicity under the current selection.
  std::vector<int> times_covered(static_cast<std::size_t>(problem.m), 0);
  for (int j : solution.selected)
    for (int i : problem.covers[static_cast<std::size_t>(j)])
      ++times_covered[static_cast<std::size_t>(i)];
  for (int i = 0; i < problem.m; ++i)
    if (times_covered[static_cast<std::size_t>(i)] == 0)
      throw std::runtime_error("remove_redundant: selection does not cover sample " + std::to_string(i));

  // Ascending (cost, id), examined from the back: most expensive first, and
  // among equal costs the higher rule id first.
  std::vector<int> order = solution.selected;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ca = problem.costs[static_cast<std::size_t>(a)];
    const double cb = problem.costs[static_cast<std::size_t>(b)];
    if (ca != cb) return ca < cb;
    return a < b;
  });

  std::vector<char> keep(problem.n_rules(), 0);
  for (int j : solution.selected) keep[static_cast<std::size_t>(j)] = 1;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int j = *it;
    bool removable = true;
    for (int i : problem.covers[static_cast<std::size_t>(j)]) {
      if (times_covered[static_cast<std::size_t>(i)] < 2) { removable = false; break; }
    }
    if (!removable) continue;
    keep[static_cast<std::size_t>(j)] = 0;
    for (int i : problem.covers[static_cast<std::size_t>(j)])
      --times_covered[static_cast<std::size_t>(i)];
  }

  CoverSolution out;
  for (int j : solution.selected)
    if (keep[static_cast<std::size_t>(j)]) out.selected.push_back(j);
  out.total_cost = 0.0;
  for (int j : out.selected) out.total_cost += problem.costs[static_cast<std::size_t>(j)];
  return out;
}

CoverSolution exact_cover(const CoverProblem& problem) {
  const std::size_t n = problem.n_rules();
  if (n > 20)
    throw std::runtime_error("exact_cover: refusing instances with more than 20 rules (got " +
                             std::to_string(n) + ")");
  const std::size_t words = (static_cast<std::size_t>(problem.m) + 63) / 64;
  std::vector<std::vector<std::uint64_t>> masks(n, std::vector<std::uint64_t>(words, 0));
  for (std::size_t j = 0; j < n; ++j)
    for (int i : problem.covers[j])
      masks[j][static_cast<std::size_t>(i) / 64] |= 1ULL << (static_cast<std::size_t>(i) % 64);
  std::vector<std::uint64_t> full(words, 0);
  for (int i = 0; i < problem.m; ++i)
    full[static_cast<std::size_t>(i) / 64] |= 1ULL << (static_cast<std::size_t>(i) % 64);

  bool found = false;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> best_ids;
  std::vector<std::uint64_t> acc(words);
  std::vector<int> ids;

  for (std::uint64_t subset = 1; subset < (1ULL << n); ++subset) {
    std::fill(acc.begin(), acc.end(), 0);
    ids.clear();
    double cost = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(subset & (1ULL << j))) continue;
      ids.push_back(static_cast<int>(j));
      cost += problem.costs[j];
      for (std::size_t w = 0; w < words; ++w) acc[w] |= masks[j][w];
    }
    if (acc != full) continue;
    if (!found || cost < best_cost ||
        (cost == best_cost && std::lexicographical_compare(ids.begin(), ids.end(),
                                                           best_ids.begin(), best_ids.end()))) {
      found = true;
      best_cost = cost;
      best_ids = ids;
    }
  }
  if (!found) throw std::runtime_error("exact_cover: infeasible instance");
  return CoverSolution{std::move(best_ids), best_cost};
}

}  // namespace ruleforge
