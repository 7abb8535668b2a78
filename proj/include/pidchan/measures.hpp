#pragma once

// Intersection-information measures induced by channel preorders, the
// Gács-Körner common variable, two-source decompositions and the
// Williams-Beer axiom suite.

#include "pidchan/optimize.hpp"
#include "pidchan/preorders.hpp"
#include "pidchan/probcore.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pidchan {

enum class MeasureKind { Deterministic, Degradation, LessNoisy, MoreCapable, DegradationSupermodular, MinimumMI };

/// "det", "d", "ln", "mc", "ds", "mmi".
const char* short_name(MeasureKind kind);
std::optional<MeasureKind> parse_measure(const std::string& name);
/// All kinds in chain order: det, d, ln, ds, mc, mmi.
const std::vector<MeasureKind>& all_measure_kinds();

struct MeasureOptions {
    OptimizerConfig optimizer;
    std::size_t grid_resolution = kDefaultGridResolution;
    std::size_t ds_depth = kDefaultDsDepth;
    std::size_t joinmeet_max_ops = kDefaultJoinMeetOps;
};

struct MeasureResult {
    MeasureKind kind = MeasureKind::MinimumMI;
    double value = 0.0;
    std::optional<Channel> argmax;
    /// "upper_bound", "lower_bound", "sampled", "grid_coarsened", ...
    std::vector<std::string> flags;
};

/// Redundancy I_cap(Y_1, ..., Y_n -> T) for one measure kind. The system is
/// first restricted to the support of p(t) and its sources put in a
/// canonical order, so the value is invariant under source permutations.
MeasureResult ii_measure(const JointSystem& system, MeasureKind kind, const MeasureOptions& options = {});

/// Every measure, computed once along the chain det <= d <= ln <= mc <= mmi
/// with each optimizer warm-started from the previous argmax.
std::map<MeasureKind, MeasureResult> all_measures(const JointSystem& system, const MeasureOptions& options = {});

/// Maximal common function of the sources: connected components of the
/// graph linking source symbols that co-occur with positive probability.
struct CommonVariable {
    /// Component id of every positive-probability cell (y_1, ..., y_n).
    std::map<std::vector<std::size_t>, std::size_t> labeling;
    /// Component id per (source, symbol); symbols never observed get none.
    std::vector<std::vector<std::optional<std::size_t>>> symbol_component;
    Dist dist;

    std::size_t num_components() const noexcept { return dist.size(); }
    double entropy() const;
};

/// `sources` holds only source axes. Throws on an all-zero table.
CommonVariable gk_common_variable(const JointTable& sources);
/// Common variable of the sources of a full joint (axis 0 = target).
CommonVariable gk_common_variable(const JointSystem& system);

/// Channel T -> common variable induced by the system's joint.
Channel common_variable_channel(const JointSystem& system, const CommonVariable& common);

struct Decomposition {
    MeasureKind measure = MeasureKind::MinimumMI;
    double redundancy = 0.0;
    std::vector<double> unique;
    double synergy = 0.0;
    double total = 0.0;
    std::optional<Channel> argmax;
    std::vector<std::string> flags;
};

/// R = I_cap, U_i = I(T;Y_i) - R, S = I(T;Y_1,Y_2) - R - U_1 - U_2.
/// Requires exactly two sources.
Decomposition pid_decompose(const JointSystem& system, MeasureKind kind, const MeasureOptions& options = {});
Decomposition decomposition_from(const JointSystem& system, const MeasureResult& redundancy);

/// Reproducible random two-source systems: alphabet sizes drawn from
/// [min_alphabet, max_alphabet], cell weights from a symmetric Dirichlet(1)
/// scheme with a fraction of cells zeroed.
struct RandomSystemGenerator {
    std::uint64_t seed = 7;
    std::size_t min_alphabet = 2;
    std::size_t max_alphabet = 3;
    double zero_fraction = 0.2;

    JointSystem operator()(std::size_t trial) const;
};

struct AxiomViolation {
    std::size_t trial;
    std::string axiom;
    double lhs;
    double rhs;
    std::string system;  // serialized distribution file
};

struct AxiomReport {
    MeasureKind kind = MeasureKind::MinimumMI;
    std::size_t trials = 0;
    std::size_t checks = 0;
    std::vector<AxiomViolation> violations;

    bool passed() const noexcept { return violations.empty(); }
};

/// Symmetry, self-redundancy, monotonicity and equality for a duplicated
/// source, for `trials` generated systems.
AxiomReport check_wb_axioms(MeasureKind kind, const RandomSystemGenerator& generator, std::size_t trials, double tol,
                            const MeasureOptions& options = {});

/// Target T = (Y_1, Y_2) copying a two-source joint table.
JointTable copy_target_joint(const JointTable& sources);

struct CopyTargetResult {
    double common_information;
    double more_capable;
    bool matches;
};

/// For T = (Y_1, Y_2): the common information and the sampled more-capable
/// measure, which must agree within `tol`.
CopyTargetResult copy_target_measures(const JointTable& sources, const MeasureOptions& options = {}, double tol = 1e-2);

/// Per-outcome check of I(Y_i; T=t) >= I(Q; T=t) for every source.
struct SpecificInfoGap {
    std::size_t source;
    std::size_t outcome;
    double source_value;
    double q_value;
};
std::vector<SpecificInfoGap> specific_information_violations(const JointSystem& system, const Channel& q_channel,
                                                             double tol);

}  // namespace pidchan
