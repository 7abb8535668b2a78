#pragma once

// Checkers for the channel preorders between two channels W and V that share
// an input alphabet. Every checker except less noisy answers "is W below V?";
// the less-noisy checker answers "is V below W?":
//
//   degradation      W = V * K^U for some row-stochastic K^U
//   less noisy       chi2(pW || qW) >= chi2(pV || qV) for all input pairs
//   more capable     I_p(W) <= I_p(V) for every input distribution p
//   supermodular     W is reachable from V by JoinMeet applications
//   ds               a finite chain mixing degradation and supermodular steps
//
// Degradation is decided exactly with a linear program. The sampled less-noisy
// and more-capable checkers can only falsify; the ds checker can only
// certify.

#include "pidchan/lp.hpp"
#include "pidchan/types.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pidchan {

enum class Relation { Degradation, LessNoisy, MoreCapable, Supermodular, DegradationSupermodular };
enum class VerdictStatus { Holds, Falsified, Unknown };

const char* to_string(Relation r);
const char* to_string(VerdictStatus s);

/// One JoinMeet application, zero-based columns.
struct JoinMeetStep {
    std::size_t max_col;
    std::size_t min_col;
    bool operator==(const JoinMeetStep&) const = default;
};

/// K^U with W = V * K^U.
struct GarblingWitness {
    Matrix garbling;
    double residual;
};

/// Applications in order: the first step is applied to V first.
struct JoinMeetWitness {
    std::vector<JoinMeetStep> steps;
};

/// A chain V = U_0, U_1, ..., U_k followed by a final degradation to W (or
/// U_k = W). links[i] explains how U_{i+1} arises from U_i.
struct ChainLink {
    enum class Kind { Degradation, JoinMeet } kind;
    Channel channel;                    // U_{i+1}
    std::optional<Matrix> garbling;     // for Degradation
    std::vector<JoinMeetStep> steps;    // for JoinMeet
};
struct ChainWitness {
    std::vector<ChainLink> links;
};

using Witness = std::variant<GarblingWitness, JoinMeetWitness, ChainWitness>;

struct Counterexample {
    /// Optimal max-norm residual of the degradation LP (degradation only).
    std::optional<double> residual;
    /// First input distribution (less noisy / more capable).
    std::optional<Dist> p;
    /// Second input distribution (less noisy only).
    std::optional<Dist> q;
    /// Value of the inequality side that should be no larger (W side for
    /// more capable, V side for less noisy) and the side it exceeded.
    double violating_side = 0.0;
    double bound_side = 0.0;
};

struct BudgetInfo {
    std::size_t grid_resolution = 0;
    std::size_t samples = 0;
    std::size_t max_ops = 0;
    std::size_t depth = 0;
    std::size_t states_explored = 0;
};

struct PreorderVerdict {
    Relation relation;
    VerdictStatus status = VerdictStatus::Unknown;
    std::optional<Witness> witness;
    std::optional<Counterexample> counterexample;
    BudgetInfo budget;
};

/// Minimize ||W - V K^U||_inf over row-stochastic K^U.
/// Variables: K^U entries (row-major, |out V| x |out W|) then the residual.
LinearProgram degradation_problem(const Channel& W, const Channel& V);

inline constexpr double kDegradationTol = 1e-7;
inline constexpr double kChiSquareTol = 1e-9;
inline constexpr std::size_t kDefaultGridResolution = 10;
inline constexpr std::size_t kDefaultJoinMeetOps = 8;
inline constexpr std::size_t kDefaultDsDepth = 3;

PreorderVerdict check_degradation(const Channel& W, const Channel& V, double tol = kDegradationTol);

/// Less-noisy orientation: tests V <=_ln W (i.e. W less noisy than V) via
/// chi2(pW||qW) >= chi2(pV||qV) on every ordered pair of grid points.
PreorderVerdict check_less_noisy_sampled(const Channel& W, const Channel& V,
                                         std::size_t grid_resolution = kDefaultGridResolution);
/// Same inequality evaluated on explicit (p, q) pairs, in order.
PreorderVerdict check_less_noisy_on(const Channel& W, const Channel& V,
                                    const std::vector<std::pair<Dist, Dist>>& pairs);

/// Tests W <=_mc V on the grid: I_p(W) <= I_p(V) + kInfoTol.
PreorderVerdict check_more_capable_sampled(const Channel& W, const Channel& V,
                                           std::size_t grid_resolution = kDefaultGridResolution);
PreorderVerdict check_more_capable_on(const Channel& W, const Channel& V, const std::vector<Dist>& points);

/// Breadth-first search over JoinMeet sequences from V, at most max_ops
/// applications deep.
PreorderVerdict check_supermodular_reachable(const Channel& W, const Channel& V,
                                             std::size_t max_ops = kDefaultJoinMeetOps);

/// Sound, incomplete ds search. Alternates exact degradation checks with
/// JoinMeet closures and deterministic garblings, `depth` layers deep.
PreorderVerdict check_ds_bounded(const Channel& W, const Channel& V, std::size_t depth = kDefaultDsDepth,
                                 std::size_t max_ops = kDefaultJoinMeetOps);

/// Single-pair evaluations of the defining inequalities.
struct ChiSquarePair {
    double w_side;
    double v_side;
    bool violated;
};
ChiSquarePair less_noisy_pair(const Channel& W, const Channel& V, const Dist& p, const Dist& q);

/// Re-evaluates a verdict's witness or counterexample against (W, V).
/// Unknown verdicts verify trivially.
bool verify(const PreorderVerdict& verdict, const Channel& W, const Channel& V);

std::string describe(const PreorderVerdict& verdict);

}  // namespace pidchan
