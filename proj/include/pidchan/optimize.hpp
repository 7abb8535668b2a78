#pragma once

// Maximization of I(Q;T) over channels K^Q = p(q|t) subject to a feasibility
// oracle. I(Q;T) is convex in K^Q for fixed p(t), so maxima sit on extreme
// points of the feasible set; the search is multi-start ascent seeded at
// vertices.
//
// Two ascent modes:
//   - polytope oracles (K^Q = K_i U_i for all i) walk vertices with a
//     sequence of linear programs on the linearized objective;
//   - general oracles use projected gradient ascent on the row simplices,
//     retracting infeasible steps radially toward the constant channel.

#include "pidchan/types.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pidchan {

struct OptimizerConfig {
    /// |Q|; 0 selects sum_i |Y_i| - n + 1 from the constraint channels.
    std::size_t support_size = 0;
    std::size_t num_starts = 16;
    std::size_t max_iters = 100;
    double step_size = 0.5;
    std::uint64_t seed = 20230417;
    /// Slack allowed on sampled constraints.
    double tolerance = 1e-9;
};

void validate(const OptimizerConfig& config);

struct FeasibilityOracle {
    std::string name;
    std::function<bool(const Channel&)> is_feasible;
    /// Optional map to a nearby feasible channel.
    std::function<std::optional<Channel>(const Channel&)> repair;
    /// Non-empty for the degradation polytope {K^Q : K^Q = K_i U_i for all i}.
    std::vector<Channel> polytope_bank;
    /// Candidate starting points; infeasible ones are skipped.
    std::vector<Channel> seeds;
};

struct OptimizationResult {
    double value = 0.0;
    Channel argmax;
    std::size_t feasible_starts = 0;
};

class OptimizerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::size_t default_support_size(std::span<const Channel> channels);

/// dI/dK[t,q] = p(t) log2( K[t,q] / (pK)[q] ).
/// Zero entries are floored at 1e-12; empty output columns get the
/// one-row value p(t) log2(1/p(t)).
Matrix mi_gradient(const Dist& p_t, const Channel& K);

/// Euclidean projection of each row onto the probability simplex.
Matrix project_rows_to_simplex(const Matrix& m);

OptimizationResult maximize_mi(const Dist& p_t, const FeasibilityOracle& oracle, const OptimizerConfig& config);

FeasibilityOracle unconstrained_oracle();
FeasibilityOracle identical_rows_oracle();

/// K^Q feasible iff K^Q is a degradation of every channel in the bank.
FeasibilityOracle degradation_feasible_oracle(std::vector<Channel> channels, double tol = 1e-7);

/// Sample points used by the sampled oracles: the simplex grid plus the
/// extra points (vertices are part of every grid).
std::vector<Dist> oracle_samples(const Alphabet& alphabet, std::size_t grid_resolution,
                                 std::span<const Dist> extra_points);

/// I_p(K^Q) <= I_p(K_i) + tol for every sample p and every bank channel.
FeasibilityOracle mc_sampled_oracle(std::vector<Channel> channels, std::size_t grid_resolution,
                                    std::span<const Dist> extra_points = {}, double tol = 1e-9);

/// Largest pair-grid resolution used by the less-noisy oracle: the grid is
/// coarsened until it has at most kMaxLessNoisyPoints points.
inline constexpr std::size_t kMaxLessNoisyPoints = 300;
std::size_t less_noisy_pair_resolution(std::size_t dim, std::size_t requested);

/// chi2(pK^Q || qK^Q) <= chi2(pK_i || qK_i) over sampled ordered pairs,
/// conjoined with every more-capable constraint of mc_sampled_oracle.
FeasibilityOracle ln_sampled_oracle(std::vector<Channel> channels, std::size_t grid_resolution,
                                    std::span<const Dist> extra_points = {}, double tol = 1e-9);

}  // namespace pidchan
