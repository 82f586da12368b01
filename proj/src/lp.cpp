#include "ruleforge/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ruleforge/errors.hpp"

namespace ruleforge {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-12;
constexpr double kFeasTol = 1e-7;
constexpr double kGapTol = 1e-6;

// Max-form tableau for the covering dual
//   max sum_i lambda_i  s.t.  sum_{i in I(j)} lambda_i + s_j = c_j,  all >= 0.
// Rows are rules (n), columns are lambda variables (m) then slacks (n) then
// the rhs. The slack basis is feasible because costs >= 1 > 0.
struct Tableau {
  int n_rows;
  int n_cols;  // m + n (rhs stored separately at index n_cols)
  int m;
  std::vector<double> a;    // (n_rows) x (n_cols + 1), row-major
  std::vector<double> d;    // reduced costs, length n_cols
  std::vector<int> basis;   // per row, the basic column
  double objective = 0.0;

  double* row(int r) { return a.data() + static_cast<std::size_t>(r) * (n_cols + 1); }
  double& rhs(int r) { return row(r)[n_cols]; }
};

void pivot(Tableau& t, int leave_row, int enter_col) {
  double* pr = t.row(leave_row);
  const double inv = 1.0 / pr[enter_col];
  const int width = t.n_cols + 1;
  for (int c = 0; c < width; ++c) pr[c] *= inv;
  pr[enter_col] = 1.0;

  for (int r = 0; r < t.n_rows; ++r) {
    if (r == leave_row) continue;
    double* tr = t.row(r);
    const double f = tr[enter_col];
    if (std::fabs(f) <= kDropTol) { tr[enter_col] = 0.0; continue; }
    for (int c = 0; c < width; ++c) tr[c] -= f * pr[c];
    tr[enter_col] = 0.0;
  }
  const double f = t.d[enter_col];
  if (f != 0.0) {
    for (int c = 0; c < t.n_cols; ++c) t.d[c] -= f * pr[c];
    t.objective += f * pr[t.n_cols];
    t.d[enter_col] = 0.0;
  }
  t.basis[leave_row] = enter_col;
}

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double comp_slack = 0.0;
};

Residuals residuals_of(const CoverProblem& problem, const std::vector<double>& z,
                       const std::vector<double>& lambda) {
  Residuals res;
  double primal_obj = 0.0, dual_obj = 0.0;
  for (std::size_t j = 0; j < problem.n_rules(); ++j) {
    res.primal = std::max(res.primal, -z[j]);
    primal_obj += problem.costs[j] * z[j];
    double sum = 0.0;
    for (int i : problem.covers[j]) sum += lambda[static_cast<std::size_t>(i)];
    res.dual = std::max(res.dual, sum - problem.costs[j]);
    res.comp_slack = std::max(res.comp_slack, std::fabs(z[j] * (problem.costs[j] - sum)));
  }
  for (int i = 0; i < problem.m; ++i) {
    const double li = lambda[static_cast<std::size_t>(i)];
    res.dual = std::max(res.dual, -li);
    dual_obj += li;
    double sum = 0.0;
    for (int j : problem.covered_by[static_cast<std::size_t>(i)]) sum += z[static_cast<std::size_t>(j)];
    res.primal = std::max(res.primal, 1.0 - sum);
    res.comp_slack = std::max(res.comp_slack, std::fabs(li * (sum - 1.0)));
  }
  res.gap = std::fabs(primal_obj - dual_obj);
  return res;
}

// Re-solves the final basis directly from the problem data (LU with partial
// pivoting), replacing tableau values that accumulated roundoff over a long
// pivot sequence. B x_B = c gives the basic lambda/slack values; B^T y = f_B
// gives the multipliers, which are the covering primal z.
bool refine_from_basis(const CoverProblem& problem, const std::vector<int>& basis,
                       std::vector<double>& z, std::vector<double>& lambda) {
  const int n = static_cast<int>(problem.n_rules());
  const int m = problem.m;
  std::vector<double> B(static_cast<std::size_t>(n) * n, 0.0);
  for (int col = 0; col < n; ++col) {
    const int var = basis[static_cast<std::size_t>(col)];
    if (var < m) {
      for (int j : problem.covered_by[static_cast<std::size_t>(var)])
        B[static_cast<std::size_t>(j) * n + col] = 1.0;
    } else {
      B[static_cast<std::size_t>(var - m) * n + col] = 1.0;
    }
  }

  // LU factorization PA = LU in place.
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(B[static_cast<std::size_t>(k) * n + k]);
    for (int r = k + 1; r < n; ++r) {
      const double v = std::fabs(B[static_cast<std::size_t>(r) * n + k]);
      if (v > best) { best = v; piv = r; }
    }
    if (best < 1e-13) return false;  // numerically singular basis
    if (piv != k) {
      for (int c = 0; c < n; ++c)
        std::swap(B[static_cast<std::size_t>(k) * n + c], B[static_cast<std::size_t>(piv) * n + c]);
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(piv)]);
    }
    const double inv = 1.0 / B[static_cast<std::size_t>(k) * n + k];
    for (int r = k + 1; r < n; ++r) {
      const double f = B[static_cast<std::size_t>(r) * n + k] * inv;
      B[static_cast<std::size_t>(r) * n + k] = f;
      if (f == 0.0) continue;
      for (int c = k + 1; c < n; ++c)
        B[static_cast<std::size_t>(r) * n + c] -= f * B[static_cast<std::size_t>(k) * n + c];
    }
  }

  auto solve = [&](std::vector<double>& x) {  // B x = rhs given permuted rhs in x
    for (int k = 0; k < n; ++k)
      for (int r = k + 1; r < n; ++r)
        x[static_cast<std::size_t>(r)] -= B[static_cast<std::size_t>(r) * n + k] * x[static_cast<std::size_t>(k)];
    for (int k = n - 1; k >= 0; --k) {
      for (int c = k + 1; c < n; ++c)
        x[static_cast<std::size_t>(k)] -= B[static_cast<std::size_t>(k) * n + c] * x[static_cast<std::size_t>(c)];
      x[static_cast<std::size_t>(k)] /= B[static_cast<std::size_t>(k) * n + k];
    }
  };
  auto solve_transposed = [&](std::vector<double>& x) {  // B^T y = rhs
    // U^T w = rhs (forward), then L^T y = w (backward), then unpermute.
    for (int k = 0; k < n; ++k) {
      for (int r = 0; r < k; ++r)
        x[static_cast<std::size_t>(k)] -= B[static_cast<std::size_t>(r) * n + k] * x[static_cast<std::size_t>(r)];
      x[static_cast<std::size_t>(k)] /= B[static_cast<std::size_t>(k) * n + k];
    }
    for (int k = n - 1; k >= 0; --k)
      for (int r = k + 1; r < n; ++r)
        x[static_cast<std::size_t>(k)] -= B[static_cast<std::size_t>(r) * n + k] * x[static_cast<std::size_t>(r)];
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = x[static_cast<std::size_t>(i)];
    x = std::move(y);
  };

  std::vector<double> xb(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xb[static_cast<std::size_t>(i)] = problem.costs[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
  solve(xb);

  std::vector<double> y(static_cast<std::size_t>(n));
  for (int col = 0; col < n; ++col)
    y[static_cast<std::size_t>(col)] = basis[static_cast<std::size_t>(col)] < m ? 1.0 : 0.0;
  solve_transposed(y);

  std::fill(lambda.begin(), lambda.end(), 0.0);
  for (int col = 0; col < n; ++col) {
    const int var = basis[static_cast<std::size_t>(col)];
    if (var < m) lambda[static_cast<std::size_t>(var)] = std::max(0.0, xb[static_cast<std::size_t>(col)]);
  }
  for (int j = 0; j < n; ++j) z[static_cast<std::size_t>(j)] = std::max(0.0, y[static_cast<std::size_t>(j)]);
  return true;
}

}  // namespace

double reduced_cost(double cost, std::span<const int> covered, std::span<const double> duals) {
  double sum = 0.0;
  for (int i : covered) sum += duals[static_cast<std::size_t>(i)];
  return cost - sum;
}

LPSolution solve_covering_lp(const CoverProblem& problem) {
  const int n = static_cast<int>(problem.n_rules());
  const int m = problem.m;
  if (n == 0) throw std::invalid_argument("solve_covering_lp: no rules");

  Tableau t;
  t.n_rows = n;
  t.m = m;
  t.n_cols = m + n;
  t.a.assign(static_cast<std::size_t>(n) * (t.n_cols + 1), 0.0);
  t.basis.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double* r = t.row(j);
    for (int i : problem.covers[static_cast<std::size_t>(j)]) r[i] = 1.0;
    r[m + j] = 1.0;
    t.rhs(j) = problem.costs[static_cast<std::size_t>(j)];
    t.basis[static_cast<std::size_t>(j)] = m + j;
  }
  t.d.assign(static_cast<std::size_t>(t.n_cols), 0.0);
  for (int i = 0; i < m; ++i) t.d[static_cast<std::size_t>(i)] = 1.0;

  const int bland_after = 2 * (m + n);
  const int pivot_limit = 50 * (m + n);
  int pivots = 0;

  for (;;) {
    // Entering column: Dantzig (most positive reduced cost, lowest index on
    // ties) until bland_after, then Bland's rule for anti-cycling.
    int enter = -1;
    if (pivots < bland_after) {
      double best = kPivotTol;
      for (int c = 0; c < t.n_cols; ++c)
        if (t.d[static_cast<std::size_t>(c)] > best) { best = t.d[static_cast<std::size_t>(c)]; enter = c; }
    } else {
      for (int c = 0; c < t.n_cols; ++c)
        if (t.d[static_cast<std::size_t>(c)] > kPivotTol) { enter = c; break; }
    }
    if (enter < 0) break;  // optimal

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < n; ++r) {
      const double a = t.row(r)[enter];
      if (a <= kPivotTol) continue;
      const double ratio = t.rhs(r) / a;
      if (ratio < best_ratio ||
          (ratio == best_ratio && leave >= 0 &&
           t.basis[static_cast<std::size_t>(r)] < t.basis[static_cast<std::size_t>(leave)])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave < 0)
      throw internal_error("solve_covering_lp: dual unbounded; covering precondition violated");

    pivot(t, leave, enter);
    if (++pivots > pivot_limit)
      throw internal_error("solve_covering_lp: pivot limit exceeded (" + std::to_string(pivots) +
                           " pivots, m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
  }

  LPSolution solution;
  solution.iterations = pivots;
  solution.duals.assign(static_cast<std::size_t>(m), 0.0);
  for (int r = 0; r < n; ++r) {
    const int var = t.basis[static_cast<std::size_t>(r)];
    if (var < m) solution.duals[static_cast<std::size_t>(var)] = std::max(0.0, t.rhs(r));
  }
  solution.primal.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j)
    solution.primal[static_cast<std::size_t>(j)] = std::max(0.0, -t.d[static_cast<std::size_t>(m + j)]);

  Residuals res = residuals_of(problem, solution.primal, solution.duals);
  if (res.primal > 1e-9 || res.dual > 1e-9 || res.gap > 1e-9 || res.comp_slack > 1e-9) {
    // Long degenerate pivot sequences can accumulate roundoff in the tableau;
    // re-solving the final basis from the original data restores precision.
    if (refine_from_basis(problem, t.basis, solution.primal, solution.duals))
      res = residuals_of(problem, solution.primal, solution.duals);
  }
  if (res.primal > kFeasTol || res.dual > kFeasTol || res.gap > kGapTol ||
      res.comp_slack > kGapTol) {
    throw internal_error(
        "solve_covering_lp: optimality certificate failed (primal=" + std::to_string(res.primal) +
        ", dual=" + std::to_string(res.dual) + ", gap=" + std::to_string(res.gap) +
        ", comp_slack=" + std::to_string(res.comp_slack) + ")");
  }

  solution.objective = 0.0;
  for (int j = 0; j < n; ++j)
    solution.objective += problem.costs[static_cast<std::size_t>(j)] *
                          solution.primal[static_cast<std::size_t>(j)];
  return solution;
}

}  // namespace ruleforge
