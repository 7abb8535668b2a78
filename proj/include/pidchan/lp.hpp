#pragma once

// Small dense linear programming solver (two-phase primal simplex).
//
//   minimize    c^T x
//   subject to  A_eq x  = b_eq
//               A_ub x <= b_ub
//               x >= 0
//
// Sized for the desk-scale channel problems in this library: a few hundred
// variables at most. Degenerate pivoting falls back to Bland's rule, so the
// method terminates on every input.

#include <cstddef>
#include <vector>

namespace pidchan {

struct LinearProgram {
    std::size_t num_vars = 0;
    std::vector<double> objective;
    std::vector<std::vector<double>> eq_rows;
    std::vector<double> eq_rhs;
    std::vector<std::vector<double>> ub_rows;
    std::vector<double> ub_rhs;

    explicit LinearProgram(std::size_t n = 0) : num_vars(n), objective(n, 0.0) {}

    void add_eq(std::vector<double> row, double rhs);
    void add_ub(std::vector<double> row, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    /// Indices of the original variables that are basic in the final tableau.
    std::vector<std::size_t> basis;
};

LpResult solve_lp(const LinearProgram& lp);

const char* to_string(LpStatus status);

}  // namespace pidchan
