// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

// Dense two-phase primal simplex and best-first branch-and-bound for small
// mixed-integer programs of the form
//
//   minimize    c'x
//   subject to  A x <= b,  lower <= x <= upper,  x_j integer for masked j.
//
// Everything is dense and solved from scratch at every node; the solver is
// meant for desk-scale instances where exactness and determinism matter more
// than speed.

#ifndef GREENLOOP_MILP_HPP_
#define GREENLOOP_MILP_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace greenloop {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct LpRow {
  std::vector<double> coefficients;
  double rhs = 0.0;

  bool operator==(const LpRow&) const = default;
};

struct LinearProgram {
  std::vector<double> objective;
  std::vector<LpRow> rows;
  std::vector<double> lower_bounds;
  std::vector<double> upper_bounds;
  std::vector<bool> integer_mask;

  // Objective `c` with x >= 0, no upper bounds, all variables continuous.
  static LinearProgram with_objective(std::vector<double> c);

  size_t num_variables() const { return objective.size(); }
  size_t num_rows() const { return rows.size(); }
  void add_row(std::vector<double> coefficients, double rhs);

  bool operator==(const LinearProgram&) const = default;
};

// Empty when the program's own invariants hold (row widths, bound order,
// vector lengths); otherwise one message per violation.
std::vector<std::string> validate_lp(const LinearProgram& lp);

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string_view solve_status_name(SolveStatus status);

struct SolverOptions {
  int max_iterations = 10000;
  int64_t max_nodes = 100000;
  double feas_tol = 1e-7;
  double int_tol = 1e-6;
  // Called with the objective value after every phase-2 pivot.
  std::function<void(double)> on_phase2_pivot;
  // Branch-and-bound tree dump, one line per explored node.
  std::ostream* tree_trace = nullptr;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  int64_t nodes_explored = 0;
  int64_t iterations = 0;

  bool operator==(const MilpSolution&) const = default;
};

// Two-phase primal simplex with Bland's lowest-index rule. The integer mask
// is ignored. Throws Error(kInvalidModel) when validate_lp fails or a lower
// bound is not finite.
MilpSolution solve_lp(const LinearProgram& lp, const SolverOptions& opts = {});

// Exact best-first branch-and-bound over solve_lp relaxations. Branches on
// the most fractional integer variable (ties to the lowest index) and selects
// the open node with the lowest relaxation bound (ties in creation order).
// Every integer-masked variable must have finite bounds.
MilpSolution solve_milp(const LinearProgram& lp, const SolverOptions& opts = {});

struct Violation {
  enum class Kind { kRow, kLowerBound, kUpperBound, kIntegrality, kShape };
  Kind kind;
  size_t index;     // row or variable index
  double residual;  // amount by which the requirement is missed
  std::string message;
};

// Independent feasibility audit of `sol.values` against `lp`.
std::vector<Violation> check_solution(const LinearProgram& lp,
                                      const MilpSolution& sol,
                                      double feas_tol = 1e-7,
                                      double int_tol = 1e-6);

}  // namespace greenloop

#endif  // GREENLOOP_MILP_HPP_
