#include "pidchan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pidchan {

void LinearProgram::add_eq(std::vector<double> row, double rhs) {
    if (row.size() != num_vars) throw std::invalid_argument("LinearProgram::add_eq: row length");
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(rhs);
}

void LinearProgram::add_ub(std::vector<double> row, double rhs) {
    if (row.size() != num_vars) throw std::invalid_argument("LinearProgram::add_ub: row length");
    ub_rows.push_back(std::move(row));
    ub_rhs.push_back(rhs);
}

const char* to_string(LpStatus status) {
    switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-10;
constexpr double kFeasEps = 1e-9;
constexpr int kMaxIterations = 100000;
constexpr int kDegenerateStreak = 50;

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), a_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

    double& at(std::size_t r, std::size_t c) { return a_[r * (n_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return a_[r * (n_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, n_); }
    double& cost(std::size_t c) { return at(m_, c); }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= n_; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r <= m_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis_[pr] = pc;
    }

    /// Sets the cost row to `costs` and prices out the current basis.
    void set_costs(const std::vector<double>& costs) {
        for (std::size_t c = 0; c < n_; ++c) cost(c) = costs[c];
        at(m_, n_) = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            const double cb = costs[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t c = 0; c <= n_; ++c) at(m_, c) -= cb * at(r, c);
        }
    }

    /// Minimizes over columns [0, allowed). Returns Optimal, Unbounded or
    /// IterationLimit.
    LpStatus run(std::size_t allowed) {
        int streak = 0;
        for (int it = 0; it < kMaxIterations; ++it) {
            const bool bland = streak > kDegenerateStreak;
            std::size_t enter = n_;
            double best = -kCostEps;
            for (std::size_t c = 0; c < allowed; ++c) {
                const double d = cost(c);
                if (d < -kCostEps) {
                    if (bland) {
                        enter = c;
                        break;
                    }
                    if (d < best) {
                        best = d;
                        enter = c;
                    }
                }
            }
            if (enter == n_) return LpStatus::Optimal;

            std::size_t leave = m_;
            double ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = at(r, enter);
                if (a <= kPivotEps) continue;
                const double q = std::max(rhs(r), 0.0) / a;
                if (q < ratio - 1e-12 || (std::abs(q - ratio) <= 1e-12 && leave < m_ && basis_[r] < basis_[leave])) {
                    ratio = q;
                    leave = r;
                }
            }
            if (leave == m_) return LpStatus::Unbounded;
            streak = ratio <= 1e-12 ? streak + 1 : 0;
            pivot(leave, enter);
        }
        return LpStatus::IterationLimit;
    }

private:
    std::size_t m_, n_;
    std::vector<double> a_;
    std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
    const std::size_t n = lp.num_vars;
    if (lp.objective.size() != n) throw std::invalid_argument("solve_lp: objective length");
    const std::size_t m_eq = lp.eq_rows.size();
    const std::size_t m_ub = lp.ub_rows.size();
    const std::size_t m = m_eq + m_ub;

    // Rows needing an artificial: every equality, and inequalities whose
    // right-hand side is negative (the slack cannot start basic).
    std::vector<bool> needs_art(m, false);
    std::size_t num_art = 0;
    for (std::size_t r = 0; r < m; ++r) {
        needs_art[r] = r < m_eq || lp.ub_rhs[r - m_eq] < 0.0;
        if (needs_art[r]) ++num_art;
    }
    const std::size_t slack0 = n;
    const std::size_t art0 = n + m_ub;
    const std::size_t total = art0 + num_art;

    Tableau tab(m, total);
    std::size_t next_art = art0;
    for (std::size_t r = 0; r < m; ++r) {
        const bool eq = r < m_eq;
        const auto& row = eq ? lp.eq_rows[r] : lp.ub_rows[r - m_eq];
        double b = eq ? lp.eq_rhs[r] : lp.ub_rhs[r - m_eq];
        const double sign = b < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < n; ++c) tab.at(r, c) = sign * row[c];
        if (!eq) tab.at(r, slack0 + (r - m_eq)) = sign;
        tab.rhs(r) = sign * b;
        if (needs_art[r]) {
            tab.at(r, next_art) = 1.0;
            tab.basis()[r] = next_art++;
        } else {
            tab.basis()[r] = slack0 + (r - m_eq);
        }
    }

    LpResult result;
    if (num_art > 0) {
        std::vector<double> phase1(total, 0.0);
        for (std::size_t c = art0; c < total; ++c) phase1[c] = 1.0;
        tab.set_costs(phase1);
        const LpStatus s = tab.run(total);
        if (s == LpStatus::IterationLimit) {
            result.status = s;
            return result;
        }
        if (-tab.at(m, total) > kFeasEps) {
            result.status = LpStatus::Infeasible;
            return result;
        }
        // Drive zero-level artificials out of the basis where possible; rows
        // where that fails are redundant and stay inert.
        for (std::size_t r = 0; r < m; ++r) {
            if (tab.basis()[r] < art0) continue;
            for (std::size_t c = 0; c < art0; ++c) {
                if (std::abs(tab.at(r, c)) > 1e-9) {
                    tab.pivot(r, c);
                    break;
                }
            }
        }
    }

    std::vector<double> phase2(total, 0.0);
    for (std::size_t c = 0; c < n; ++c) phase2[c] = lp.objective[c];
    tab.set_costs(phase2);
    const LpStatus s = tab.run(art0);
    result.status = s;
    if (s != LpStatus::Optimal) return result;

    result.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t b = tab.basis()[r];
        if (b < n) {
            result.x[b] = std::max(tab.rhs(r), 0.0);
            result.basis.push_back(b);
        }
    }
    result.objective = 0.0;
    for (std::size_t c = 0; c < n; ++c) result.objective += lp.objective[c] * result.x[c];
    return result;
}

}  // namespace pidchan
