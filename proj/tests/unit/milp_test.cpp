// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "doctest.h"
#include "greenloop/error.hpp"
#include "greenloop/milp.hpp"
#include "milp_oracle.hpp"

namespace gl = greenloop;

TEST_CASE("solve_lp finds the unique vertex optimum") {
  auto lp = gl::LinearProgram::with_objective({-2.0, -1.0});
  lp.add_row({1.0, 1.0}, 1.0);
  const auto sol = gl::solve_lp(lp);
  REQUIRE(sol.status == gl::SolveStatus::kOptimal);
  CHECK(sol.values[0] == doctest::Approx(1.0));
  CHECK(sol.values[1] == doctest::Approx(0.0));
  CHECK(sol.objective_value == doctest::Approx(-2.0));
}

TEST_CASE("solve_lp without rows") {
  SUBCASE("bounded below at zero") {
    const auto sol = gl::solve_lp(gl::LinearProgram::with_objective({1.0}));
    REQUIRE(sol.status == gl::SolveStatus::kOptimal);
    CHECK(sol.values[0] == 0.0);
    CHECK(sol.objective_value == 0.0);
  }
  SUBCASE("unbounded direction") {
    const auto sol = gl::solve_lp(gl::LinearProgram::with_objective({-1.0}));
    CHECK(sol.status == gl::SolveStatus::kUnbounded);
  }
}

TEST_CASE("solve_lp phase one handles negative right-hand sides") {
  // x1 + x2 >= 2 written as -x1 - x2 <= -2; min x1 + 2 x2 -> (2, 0).
  auto lp = gl::LinearProgram::with_objective({1.0, 2.0});
  lp.add_row({-1.0, -1.0}, -2.0);
  lp.add_row({1.0, 0.0}, 5.0);
  const auto sol = gl::solve_lp(lp);
  REQUIRE(sol.status == gl::SolveStatus::kOptimal);
  CHECK(sol.values[0] == doctest::Approx(2.0));
  CHECK(sol.objective_value == doctest::Approx(2.0));

  auto infeasible = gl::LinearProgram::with_objective({1.0});
  infeasible.add_row({1.0}, -1.0);
  CHECK(gl::solve_lp(infeasible).status == gl::SolveStatus::kInfeasible);
}

TEST_CASE("solve_lp honours shifted bounds") {
  auto lp = gl::LinearProgram::with_objective({1.0, -1.0});
  lp.lower_bounds = {1.5, -2.0};
  lp.upper_bounds = {4.0, 3.0};
  lp.add_row({1.0, 1.0}, 4.0);
  const auto sol = gl::solve_lp(lp);
  REQUIRE(sol.status == gl::SolveStatus::kOptimal);
  CHECK(sol.values[0] == doctest::Approx(1.5));
  CHECK(sol.values[1] == doctest::Approx(2.5));
  CHECK(gl::check_solution(lp, sol).empty());
}

TEST_CASE("solve_lp reports the iteration limit") {
  auto lp = gl::LinearProgram::with_objective({-1.0, -1.0});
  lp.add_row({1.0, 2.0}, 4.0);
  lp.add_row({3.0, 1.0}, 6.0);
  gl::SolverOptions opts;
  opts.max_iterations = 1;
  CHECK(gl::solve_lp(lp, opts).status == gl::SolveStatus::kIterationLimit);
}

TEST_CASE("malformed programs are rejected") {
  auto lp = gl::LinearProgram::with_objective({1.0, 1.0});
  lp.add_row({1.0}, 1.0);
  CHECK_THROWS_AS(gl::solve_lp(lp), gl::Error);
  CHECK_FALSE(gl::validate_lp(lp).empty());

  auto free_var = gl::LinearProgram::with_objective({1.0});
  free_var.lower_bounds[0] = -gl::kInfinity;
  CHECK_THROWS_AS(gl::solve_lp(free_var), gl::Error);
}

TEST_CASE("solve_milp knapsack matches enumeration") {
  // obj(0,0)=0, obj(1,0)=-3, obj(0,1)=-4, (1,1) violates 2+3 <= 4.
  auto lp = gl::LinearProgram::with_objective({-3.0, -4.0});
  lp.add_row({2.0, 3.0}, 4.0);
  lp.upper_bounds = {1.0, 1.0};
  lp.integer_mask = {true, true};
  const auto sol = gl::solve_milp(lp);
  REQUIRE(sol.status == gl::SolveStatus::kOptimal);
  CHECK(sol.values[0] == doctest::Approx(0.0));
  CHECK(sol.values[1] == doctest::Approx(1.0));
  CHECK(sol.objective_value == doctest::Approx(-4.0));
  CHECK(sol.nodes_explored >= 1);

  const auto oracle = gl::testing::enumerate_milp(lp);
  REQUIRE(oracle);
  CHECK(oracle->objective == doctest::Approx(-4.0));
}

TEST_CASE("solve_milp equals solve_lp when the relaxation is integral") {
  auto lp = gl::LinearProgram::with_objective({-1.0, -1.0});
  lp.add_row({1.0, 0.0}, 2.0);
  lp.add_row({0.0, 1.0}, 3.0);
  lp.upper_bounds = {5.0, 5.0};
  const auto relaxed = gl::solve_lp(lp);
  lp.integer_mask = {true, true};
  const auto mixed = gl::solve_milp(lp);
  REQUIRE(mixed.status == gl::SolveStatus::kOptimal);
  CHECK(mixed.values == relaxed.values);
  CHECK(mixed.objective_value == relaxed.objective_value);
  CHECK(mixed.nodes_explored == 1);
}

TEST_CASE("solve_milp infeasible and precondition errors") {
  auto lp = gl::LinearProgram::with_objective({1.0});
  lp.upper_bounds = {1.0};
  lp.integer_mask = {true};
  lp.add_row({1.0}, -0.5);
  CHECK(gl::solve_milp(lp).status == gl::SolveStatus::kInfeasible);

  // Fractional-only box: 0.2 <= x <= 0.8 with x integer.
  auto box = gl::LinearProgram::with_objective({1.0});
  box.lower_bounds = {0.2};
  box.upper_bounds = {0.8};
  box.integer_mask = {true};
  CHECK(gl::solve_milp(box).status == gl::SolveStatus::kInfeasible);

  auto unbounded_int = gl::LinearProgram::with_objective({-1.0});
  unbounded_int.integer_mask = {true};
  CHECK_THROWS_AS(gl::solve_milp(unbounded_int), gl::Error);
}

TEST_CASE("solve_milp node limit and tree trace") {
  auto lp = gl::LinearProgram::with_objective({-5.0, -4.0, -3.0});
  lp.add_row({2.0, 3.0, 1.0}, 5.0);
  lp.add_row({4.0, 1.0, 2.0}, 11.0);
  lp.add_row({3.0, 4.0, 2.0}, 8.0);
  lp.upper_bounds = {3.0, 3.0, 3.0};
  lp.integer_mask = {true, true, true};

  std::ostringstream trace;
  gl::SolverOptions opts;
  opts.tree_trace = &trace;
  const auto sol = gl::solve_milp(lp, opts);
  REQUIRE(sol.status == gl::SolveStatus::kOptimal);
  const auto oracle = gl::testing::enumerate_milp(lp);
  REQUIRE(oracle);
  CHECK(sol.objective_value == doctest::Approx(oracle->objective));
  size_t lines = 0;
  for (char ch : trace.str()) lines += ch == '\n';
  CHECK(lines == static_cast<size_t>(sol.nodes_explored));
  CHECK(trace.str().rfind("node=0 depth=0", 0) == 0);

  opts.tree_trace = nullptr;
  opts.max_nodes = 1;
  if (sol.nodes_explored > 1) {
    CHECK(gl::solve_milp(lp, opts).status == gl::SolveStatus::kIterationLimit);
  }
}

TEST_CASE("check_solution diagnostics") {
  auto lp = gl::LinearProgram::with_objective({1.0, 1.0});
  lp.add_row({1.0, 1.0}, 1.0);
  gl::MilpSolution sol;
  sol.values = {2.0, 0.0};
  auto v = gl::check_solution(lp, sol);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == gl::Violation::Kind::kRow);
  CHECK(v[0].residual == doctest::Approx(1.0));

  auto single = gl::LinearProgram::with_objective({1.0});
  single.integer_mask = {true};
  sol.values = {0.5};
  v = gl::check_solution(single, sol);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == gl::Violation::Kind::kIntegrality);

  sol.values = {1.0, 2.0};
  v = gl::check_solution(single, sol);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == gl::Violation::Kind::kShape);
}

TEST_CASE("property: branch-and-bound agrees with enumeration") {
  gl::Rng rng(20260101);
  int optimal = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto lp = gl::testing::random_milp(rng);
    const auto sol = gl::solve_milp(lp);
    const auto oracle = gl::testing::enumerate_milp(lp);
    if (!oracle) {
      CHECK(sol.status == gl::SolveStatus::kInfeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(sol.status == gl::SolveStatus::kOptimal);
    CHECK(sol.objective_value == doctest::Approx(oracle->objective).epsilon(1e-6).scale(1.0));
    CHECK(gl::check_solution(lp, sol).empty());
    ++optimal;
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 0);
}

TEST_CASE("property: phase-two objective never increases") {
  gl::Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 2 + rng.uniform_index(6);
    std::vector<double> c(n);
    for (auto& v : c) v = rng.uniform(-4.0, 2.0);
    auto lp = gl::LinearProgram::with_objective(c);
    const size_t m = 1 + rng.uniform_index(6);
    for (size_t i = 0; i < m; ++i) {
      std::vector<double> a(n);
      for (auto& v : a) v = rng.uniform(0.1, 3.0);
      lp.add_row(std::move(a), rng.uniform(1.0, 10.0));
    }
    // One covering row forces phase one.
    std::vector<double> cover(n, -1.0);
    lp.add_row(cover, -0.5);

    std::vector<double> seen;
    gl::SolverOptions opts;
    opts.on_phase2_pivot = [&](double z) { seen.push_back(z); };
    const auto sol = gl::solve_lp(lp, opts);
    REQUIRE(sol.status == gl::SolveStatus::kOptimal);
    for (size_t k = 1; k < seen.size(); ++k) CHECK(seen[k] <= seen[k - 1] + 1e-9);
    if (!seen.empty()) CHECK(seen.back() == doctest::Approx(sol.objective_value));
  }
}

TEST_CASE("property: solving is deterministic") {
  gl::Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const auto lp = gl::testing::random_milp(rng);
    CHECK(gl::solve_milp(lp) == gl::solve_milp(lp));
  }
}
