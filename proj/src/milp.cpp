// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/milp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <utility>

#include <fmt/format.h>

#include "greenloop/error.hpp"

namespace greenloop {

LinearProgram LinearProgram::with_objective(std::vector<double> c) {
  LinearProgram lp;
  const size_t n = c.size();
  lp.objective = std::move(c);
  lp.lower_bounds.assign(n, 0.0);
  lp.upper_bounds.assign(n, kInfinity);
  lp.integer_mask.assign(n, false);
  return lp;
}

void LinearProgram::add_row(std::vector<double> coefficients, double rhs) {
  rows.push_back(LpRow{std::move(coefficients), rhs});
}

std::vector<std::string> validate_lp(const LinearProgram& lp) {
  std::vector<std::string> out;
  const size_t n = lp.num_variables();
  if (lp.lower_bounds.size() != n) {
    out.push_back(fmt::format("lower_bounds has {} entries, expected {}",
                              lp.lower_bounds.size(), n));
  }
  if (lp.upper_bounds.size() != n) {
    out.push_back(fmt::format("upper_bounds has {} entries, expected {}",
                              lp.upper_bounds.size(), n));
  }
  if (lp.integer_mask.size() != n) {
    out.push_back(fmt::format("integer_mask has {} entries, expected {}",
                              lp.integer_mask.size(), n));
  }
  for (size_t i = 0; i < lp.rows.size(); ++i) {
    if (lp.rows[i].coefficients.size() != n) {
      out.push_back(fmt::format("row {} has {} coefficients, expected {}", i,
                                lp.rows[i].coefficients.size(), n));
    }
  }
  if (lp.lower_bounds.size() == n && lp.upper_bounds.size() == n) {
    for (size_t j = 0; j < n; ++j) {
      if (lp.lower_bounds[j] > lp.upper_bounds[j]) {
        out.push_back(fmt::format("variable {} has lower bound {} above upper bound {}",
                                  j, lp.lower_bounds[j], lp.upper_bounds[j]));
      }
    }
  }
  return out;
}

std::string_view solve_status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kUnbounded: return "Unbounded";
    case SolveStatus::kIterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kRatioTieTol = 1e-12;

// Dense tableau over the standard form  A y + s = b,  y, s >= 0.
// Column layout: structural [0, n), slack [n, n + m), artificial after that.
class DenseSimplex {
 public:
  DenseSimplex(const std::vector<std::vector<double>>& a,
               const std::vector<double>& b, size_t n)
      : m_(b.size()), n_(n) {
    size_t artificials = 0;
    for (double rhs : b) {
      if (rhs < 0.0) ++artificials;
    }
    cols_ = n_ + m_ + artificials;
    width_ = cols_ + 1;
    table_.assign(m_ * width_, 0.0);
    basis_.assign(m_, 0);
    size_t next_art = n_ + m_;
    for (size_t i = 0; i < m_; ++i) {
      const double sign = b[i] < 0.0 ? -1.0 : 1.0;
      for (size_t j = 0; j < n_; ++j) at(i, j) = sign * a[i][j];
      at(i, n_ + i) = sign;
      rhs(i) = sign * b[i];
      if (sign < 0.0) {
        at(i, next_art) = 1.0;
        basis_[i] = next_art++;
      } else {
        basis_[i] = n_ + i;
      }
    }
  }

  size_t first_artificial() const { return n_ + m_; }
  bool has_artificials() const { return cols_ > n_ + m_; }

  enum class Outcome { kOptimal, kUnbounded, kIterationLimit };

  // Minimizes costs·(all columns) over columns < `allowed_cols`.
  Outcome run(const std::vector<double>& costs, size_t allowed_cols,
              const SolverOptions& opts, int64_t& iterations,
              const std::function<void(double)>& on_pivot) {
    costs_ = costs;
    reduced_.assign(cols_, 0.0);
    for (size_t j = 0; j < cols_; ++j) {
      double d = costs_[j];
      for (size_t i = 0; i < m_; ++i) d -= costs_[basis_[i]] * at(i, j);
      reduced_[j] = d;
    }
    while (true) {
      // Bland: lowest-index improving column.
      size_t enter = cols_;
      for (size_t j = 0; j < allowed_cols; ++j) {
        if (reduced_[j] < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return Outcome::kOptimal;
      if (iterations >= opts.max_iterations) return Outcome::kIterationLimit;

      // Minimum ratio; ties go to the lowest basic variable index.
      size_t leave = m_;
      double best = kInfinity;
      for (size_t i = 0; i < m_; ++i) {
        const double coef = at(i, enter);
        if (coef <= kPivotTol) continue;
        const double ratio = rhs(i) / coef;
        if (leave == m_ || ratio < best - kRatioTieTol) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + kRatioTieTol && basis_[i] < basis_[leave]) {
          leave = i;
        }
      }
      if (leave == m_) return Outcome::kUnbounded;
      pivot(leave, enter);
      ++iterations;
      if (on_pivot) on_pivot(objective());
    }
  }

  double objective() const {
    double z = 0.0;
    for (size_t i = 0; i < m_; ++i) z += costs_[basis_[i]] * table_[i * width_ + cols_];
    return z;
  }

  // After phase 1: pivots artificial basics out on any usable column. Rows
  // with no usable column are redundant and keep their artificial at zero.
  void expel_artificials() {
    for (size_t i = 0; i < m_; ++i) {
      if (basis_[i] < first_artificial()) continue;
      for (size_t j = 0; j < first_artificial(); ++j) {
        if (std::abs(at(i, j)) > kPivotTol) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  std::vector<double> structural_values() const {
    std::vector<double> y(n_, 0.0);
    for (size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) y[basis_[i]] = table_[i * width_ + cols_];
    }
    return y;
  }

  size_t columns() const { return cols_; }

 private:
  double& at(size_t i, size_t j) { return table_[i * width_ + j]; }
  double at(size_t i, size_t j) const { return table_[i * width_ + j]; }
  double& rhs(size_t i) { return table_[i * width_ + cols_]; }

  void pivot(size_t r, size_t e) {
    double* prow = &table_[r * width_];
    const double p = prow[e];
    for (size_t j = 0; j < width_; ++j) prow[j] /= p;
    prow[e] = 1.0;
    for (size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &table_[i * width_];
      const double f = row[e];
      if (f == 0.0) continue;
      for (size_t j = 0; j < width_; ++j) row[j] -= f * prow[j];
      row[e] = 0.0;
    }
    if (!reduced_.empty()) {
      const double f = reduced_[e];
      for (size_t j = 0; j < cols_; ++j) reduced_[j] -= f * prow[j];
      reduced_[e] = 0.0;
    }
    basis_[r] = e;
  }

  size_t m_;
  size_t n_;
  size_t cols_ = 0;
  size_t width_ = 0;
  std::vector<double> table_;
  std::vector<size_t> basis_;
  std::vector<double> costs_;
  std::vector<double> reduced_;
};

void require_valid(const LinearProgram& lp) {
  const auto problems = validate_lp(lp);
  if (!problems.empty()) {
    throw Error(ErrorCode::kInvalidModel, "linear program: " + problems.front());
  }
  for (size_t j = 0; j < lp.num_variables(); ++j) {
    if (!std::isfinite(lp.lower_bounds[j])) {
      throw Error(ErrorCode::kInvalidModel,
                  fmt::format("variable {} has a non-finite lower bound", j));
    }
  }
}

// Solves with explicit bounds, skipping validation (bounds may cross; that
// is reported as infeasible).
MilpSolution solve_bounded(const LinearProgram& lp, const std::vector<double>& lower,
                           const std::vector<double>& upper,
                           const SolverOptions& opts) {
  MilpSolution sol;
  const size_t n = lp.num_variables();
  for (size_t j = 0; j < n; ++j) {
    if (lower[j] > upper[j]) {
      sol.status = SolveStatus::kInfeasible;
      return sol;
    }
  }

  // Shift x = lower + y so that y >= 0; finite upper bounds become rows.
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  a.reserve(lp.num_rows() + n);
  double b_scale = 1.0;
  for (const auto& row : lp.rows) {
    double shifted = row.rhs;
    for (size_t j = 0; j < n; ++j) shifted -= row.coefficients[j] * lower[j];
    a.push_back(row.coefficients);
    b.push_back(shifted);
    b_scale = std::max(b_scale, std::abs(shifted));
  }
  for (size_t j = 0; j < n; ++j) {
    if (std::isfinite(upper[j])) {
      std::vector<double> unit(n, 0.0);
      unit[j] = 1.0;
      a.push_back(std::move(unit));
      b.push_back(upper[j] - lower[j]);
    }
  }

  double offset = 0.0;
  for (size_t j = 0; j < n; ++j) offset += lp.objective[j] * lower[j];

  DenseSimplex simplex(a, b, n);

  if (simplex.has_artificials()) {
    std::vector<double> phase1(simplex.columns(), 0.0);
    for (size_t j = simplex.first_artificial(); j < simplex.columns(); ++j) phase1[j] = 1.0;
    const auto outcome = simplex.run(phase1, simplex.columns(), opts, sol.iterations, {});
    if (outcome == DenseSimplex::Outcome::kIterationLimit) {
      sol.status = SolveStatus::kIterationLimit;
      return sol;
    }
    if (simplex.objective() > opts.feas_tol * b_scale) {
      sol.status = SolveStatus::kInfeasible;
      return sol;
    }
    simplex.expel_artificials();
  }

  std::vector<double> phase2(simplex.columns(), 0.0);
  for (size_t j = 0; j < n; ++j) phase2[j] = lp.objective[j];
  std::function<void(double)> observer;
  if (opts.on_phase2_pivot) {
    observer = [&](double z) { opts.on_phase2_pivot(z + offset); };
  }
  const auto outcome =
      simplex.run(phase2, simplex.first_artificial(), opts, sol.iterations, observer);
  if (outcome == DenseSimplex::Outcome::kIterationLimit) {
    sol.status = SolveStatus::kIterationLimit;
    return sol;
  }
  if (outcome == DenseSimplex::Outcome::kUnbounded) {
    sol.status = SolveStatus::kUnbounded;
    return sol;
  }
  const auto y = simplex.structural_values();
  sol.values.resize(n);
  sol.objective_value = 0.0;
  for (size_t j = 0; j < n; ++j) {
    sol.values[j] = lower[j] + y[j];
    sol.objective_value += lp.objective[j] * sol.values[j];
  }
  sol.status = SolveStatus::kOptimal;
  return sol;
}

struct OpenNode {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> values;
  double bound = 0.0;
  int depth = 0;
  uint64_t seq = 0;
};

struct WorseNode {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

}  // namespace

MilpSolution solve_lp(const LinearProgram& lp, const SolverOptions& opts) {
  require_valid(lp);
  return solve_bounded(lp, lp.lower_bounds, lp.upper_bounds, opts);
}

MilpSolution solve_milp(const LinearProgram& lp, const SolverOptions& opts) {
  require_valid(lp);
  const size_t n = lp.num_variables();
  std::vector<double> lower = lp.lower_bounds;
  std::vector<double> upper = lp.upper_bounds;
  for (size_t j = 0; j < n; ++j) {
    if (!lp.integer_mask[j]) continue;
    if (!std::isfinite(upper[j])) {
      throw Error(ErrorCode::kInvalidModel,
                  fmt::format("integer variable {} needs a finite upper bound", j));
    }
    lower[j] = std::ceil(lower[j] - opts.int_tol);
    upper[j] = std::floor(upper[j] + opts.int_tol);
  }

  MilpSolution result;
  SolverOptions lp_opts = opts;
  lp_opts.on_phase2_pivot = nullptr;

  MilpSolution root = solve_bounded(lp, lower, upper, lp_opts);
  result.iterations = root.iterations;
  if (root.status != SolveStatus::kOptimal) {
    result.status = root.status;
    return result;
  }

  std::priority_queue<OpenNode, std::vector<OpenNode>, WorseNode> open;
  uint64_t seq = 0;
  open.push(OpenNode{lower, upper, root.values, root.objective_value, 0, seq++});

  double incumbent = kInfinity;
  std::vector<double> best;
  auto prune_limit = [&]() {
    return incumbent - 1e-9 * std::max(1.0, std::abs(incumbent));
  };

  while (!open.empty()) {
    if (result.nodes_explored >= opts.max_nodes) {
      result.status = SolveStatus::kIterationLimit;
      result.values = best;
      result.objective_value = incumbent;
      return result;
    }
    OpenNode node = open.top();
    open.pop();
    const int64_t id = result.nodes_explored++;

    if (node.bound >= prune_limit()) {
      if (opts.tree_trace) {
        *opts.tree_trace << fmt::format("node={} depth={} bound={:.9g} branch=- pruned\n",
                                        id, node.depth, node.bound);
      }
      continue;
    }

    size_t branch = n;
    double most = opts.int_tol;
    for (size_t j = 0; j < n; ++j) {
      if (!lp.integer_mask[j]) continue;
      const double x = node.values[j];
      const double frac = x - std::floor(x);
      const double dist = std::min(frac, 1.0 - frac);
      if (dist > most) {
        most = dist;
        branch = j;
      }
    }

    if (branch == n) {
      if (opts.tree_trace) {
        *opts.tree_trace << fmt::format("node={} depth={} bound={:.9g} branch=- integral\n",
                                        id, node.depth, node.bound);
      }
      incumbent = node.bound;
      best = node.values;
      continue;
    }
    if (opts.tree_trace) {
      *opts.tree_trace << fmt::format("node={} depth={} bound={:.9g} branch=x{}\n", id,
                                      node.depth, node.bound, branch);
    }

    const double x = node.values[branch];
    for (int side = 0; side < 2; ++side) {
      OpenNode child;
      child.lower = node.lower;
      child.upper = node.upper;
      if (side == 0) {
        child.upper[branch] = std::floor(x);
      } else {
        child.lower[branch] = std::ceil(x);
      }
      if (child.lower[branch] > child.upper[branch]) continue;
      MilpSolution relaxed = solve_bounded(lp, child.lower, child.upper, lp_opts);
      result.iterations += relaxed.iterations;
      if (relaxed.status == SolveStatus::kIterationLimit) {
        result.status = SolveStatus::kIterationLimit;
        result.values = best;
        result.objective_value = incumbent;
        return result;
      }
      if (relaxed.status != SolveStatus::kOptimal) continue;
      if (relaxed.objective_value >= prune_limit()) continue;
      child.values = std::move(relaxed.values);
      child.bound = relaxed.objective_value;
      child.depth = node.depth + 1;
      child.seq = seq++;
      open.push(std::move(child));
    }
  }

  if (best.empty()) {
    result.status = SolveStatus::kInfeasible;
    return result;
  }
  result.status = SolveStatus::kOptimal;
  result.values = std::move(best);
  result.objective_value = 0.0;
  for (size_t j = 0; j < n; ++j) result.objective_value += lp.objective[j] * result.values[j];
  return result;
}

std::vector<Violation> check_solution(const LinearProgram& lp, const MilpSolution& sol,
                                      double feas_tol, double int_tol) {
  std::vector<Violation> out;
  const size_t n = lp.num_variables();
  if (sol.values.size() != n) {
    out.push_back({Violation::Kind::kShape, 0,
                   static_cast<double>(sol.values.size()) - static_cast<double>(n),
                   fmt::format("solution has {} values, program has {} variables",
                               sol.values.size(), n)});
    return out;
  }
  for (size_t i = 0; i < lp.num_rows(); ++i) {
    const auto& row = lp.rows[i];
    double lhs = 0.0;
    for (size_t j = 0; j < n && j < row.coefficients.size(); ++j) {
      lhs += row.coefficients[j] * sol.values[j];
    }
    const double residual = lhs - row.rhs;
    if (residual > feas_tol * std::max(1.0, std::abs(row.rhs))) {
      out.push_back({Violation::Kind::kRow, i, residual,
                     fmt::format("row {}: lhs {} exceeds rhs {} by {}", i, lhs, row.rhs,
                                 residual)});
    }
  }
  for (size_t j = 0; j < n; ++j) {
    const double x = sol.values[j];
    if (j < lp.lower_bounds.size() &&
        x < lp.lower_bounds[j] - feas_tol * std::max(1.0, std::abs(lp.lower_bounds[j]))) {
      out.push_back({Violation::Kind::kLowerBound, j, lp.lower_bounds[j] - x,
                     fmt::format("x{} = {} below lower bound {}", j, x, lp.lower_bounds[j])});
    }
    if (j < lp.upper_bounds.size() && std::isfinite(lp.upper_bounds[j]) &&
        x > lp.upper_bounds[j] + feas_tol * std::max(1.0, std::abs(lp.upper_bounds[j]))) {
      out.push_back({Violation::Kind::kUpperBound, j, x - lp.upper_bounds[j],
                     fmt::format("x{} = {} above upper bound {}", j, x, lp.upper_bounds[j])});
    }
    if (j < lp.integer_mask.size() && lp.integer_mask[j]) {
      const double gap = std::abs(x - std::round(x));
      if (gap > int_tol) {
        out.push_back({Violation::Kind::kIntegrality, j, gap,
                       fmt::format("x{} = {} is not integral", j, x)});
      }
    }
  }
  return out;
}

}  // namespace greenloop
