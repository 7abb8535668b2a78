#include "pidchan/measures.hpp"

#include "pidchan/channels.hpp"
#include "pidchan/distfile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace pidchan {

const char* short_name(MeasureKind kind) {
    switch (kind) {
    case MeasureKind::Deterministic: return "det";
    case MeasureKind::Degradation: return "d";
    case MeasureKind::LessNoisy: return "ln";
    case MeasureKind::MoreCapable: return "mc";
    case MeasureKind::DegradationSupermodular: return "ds";
    case MeasureKind::MinimumMI: return "mmi";
    }
    return "?";
}

std::optional<MeasureKind> parse_measure(const std::string& name) {
    for (MeasureKind k : all_measure_kinds()) {
        if (name == short_name(k)) return k;
    }
    if (name == "gh") return MeasureKind::Deterministic;
    return std::nullopt;
}

const std::vector<MeasureKind>& all_measure_kinds() {
    static const std::vector<MeasureKind> kinds{MeasureKind::Deterministic, MeasureKind::Degradation,
                                                MeasureKind::LessNoisy,     MeasureKind::DegradationSupermodular,
                                                MeasureKind::MoreCapable,   MeasureKind::MinimumMI};
    return kinds;
}

double CommonVariable::entropy() const { return pidchan::entropy(dist); }

namespace {

/// Joint table with source axes reordered: new source k is old source perm[k].
JointTable permute_sources(const JointTable& j, const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> axes{0};
    for (std::size_t s : perm) axes.push_back(s + 1);
    return j.marginal(axes);
}

bool channel_key_less(const Channel& a, const Channel& b) {
    if (a.num_outputs() != b.num_outputs()) return a.num_outputs() < b.num_outputs();
    const auto da = a.matrix().data(), db = b.matrix().data();
    return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end());
}

/// Support-restricted system with sources in canonical order.
JointSystem canonical_system(const JointSystem& system) {
    JointSystem sys = restrict_to_support(system);
    std::vector<std::size_t> perm(sys.num_sources());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return channel_key_less(sys.channels[a], sys.channels[b]); });
    if (std::is_sorted(perm.begin(), perm.end())) return sys;
    return joint_to_system(permute_sources(sys.joint, perm));
}

/// Evaluates the measures of one canonical system, memoizing the chain.
class MeasureChain {
public:
    MeasureChain(const JointSystem& system, const MeasureOptions& options)
        : sys_(canonical_system(system)), options_(options) {
        if (sys_.num_sources() == 0) throw std::invalid_argument("measures need at least one source");
        options_.optimizer.support_size =
            options.optimizer.support_size ? options.optimizer.support_size : default_support_size(sys_.channels);
        trivial_ = sys_.target_marginal.size() == 1;
    }

    const MeasureResult& get(MeasureKind kind) {
        auto it = cache_.find(kind);
        if (it != cache_.end()) return it->second;
        MeasureResult r = compute(kind);
        return cache_.emplace(kind, std::move(r)).first->second;
    }

private:
    MeasureResult compute(MeasureKind kind) {
        if (trivial_) return MeasureResult{kind, 0.0, std::nullopt, {}};
        switch (kind) {
        case MeasureKind::MinimumMI: return minimum_mi();
        case MeasureKind::Deterministic: return deterministic();
        case MeasureKind::Degradation: return degradation();
        case MeasureKind::LessNoisy: return less_noisy();
        case MeasureKind::MoreCapable: return more_capable();
        case MeasureKind::DegradationSupermodular: return ds();
        }
        throw std::logic_error("unknown measure kind");
    }

    MeasureResult minimum_mi() {
        MeasureResult r;
        r.kind = MeasureKind::MinimumMI;
        r.value = std::numeric_limits<double>::infinity();
        for (const auto& K : sys_.channels) {
            const double v = mutual_information(sys_.target_marginal, K);
            if (v < r.value) {
                r.value = v;
                r.argmax = K;
            }
        }
        return r;
    }

    MeasureResult deterministic() {
        const CommonVariable common = gk_common_variable(sys_);
        Channel K = common_variable_channel(sys_, common);
        MeasureResult r;
        r.kind = MeasureKind::Deterministic;
        r.value = common.num_components() > 1 ? mutual_information(sys_.target_marginal, K) : 0.0;
        r.argmax = std::move(K);
        return r;
    }

    MeasureResult degradation() {
        FeasibilityOracle oracle = degradation_feasible_oracle(sys_.channels);
        oracle.seeds = sys_.channels;
        oracle.seeds.push_back(*get(MeasureKind::Deterministic).argmax);
        auto res = maximize_mi(sys_.target_marginal, oracle, options_.optimizer);
        return MeasureResult{MeasureKind::Degradation, res.value, std::move(res.argmax), {}};
    }

    std::vector<std::string> sampled_flags(bool pairs) const {
        std::vector<std::string> flags{"upper_bound", "sampled"};
        if (pairs && less_noisy_pair_resolution(sys_.target_marginal.size(), options_.grid_resolution) <
                         options_.grid_resolution) {
            flags.push_back("grid_coarsened");
        }
        return flags;
    }

    MeasureResult less_noisy() {
        const Dist extra[] = {sys_.target_marginal};
        FeasibilityOracle oracle = ln_sampled_oracle(sys_.channels, options_.grid_resolution, extra,
                                                     options_.optimizer.tolerance);
        oracle.seeds.push_back(*get(MeasureKind::Degradation).argmax);
        auto res = maximize_mi(sys_.target_marginal, oracle, options_.optimizer);
        return MeasureResult{MeasureKind::LessNoisy, res.value, std::move(res.argmax), sampled_flags(true)};
    }

    MeasureResult more_capable() {
        const Dist extra[] = {sys_.target_marginal};
        FeasibilityOracle oracle = mc_sampled_oracle(sys_.channels, options_.grid_resolution, extra,
                                                     options_.optimizer.tolerance);
        oracle.seeds.push_back(*get(MeasureKind::LessNoisy).argmax);
        oracle.seeds.push_back(*get(MeasureKind::Degradation).argmax);
        auto res = maximize_mi(sys_.target_marginal, oracle, options_.optimizer);
        return MeasureResult{MeasureKind::MoreCapable, res.value, std::move(res.argmax), sampled_flags(false)};
    }

    MeasureResult ds() {
        const MeasureResult& d = get(MeasureKind::Degradation);
        MeasureResult r{MeasureKind::DegradationSupermodular, d.value, d.argmax, {"lower_bound"}};
        for (std::size_t j = 0; j < sys_.num_sources(); ++j) {
            const double v = mutual_information(sys_.target_marginal, sys_.channels[j]);
            if (v <= r.value) continue;
            bool below_all = true;
            for (std::size_t i = 0; i < sys_.num_sources() && below_all; ++i) {
                if (i == j) continue;
                const auto verdict =
                    check_ds_bounded(sys_.channels[j], sys_.channels[i], options_.ds_depth, options_.joinmeet_max_ops);
                below_all = verdict.status == VerdictStatus::Holds;
            }
            if (below_all) {
                r.value = v;
                r.argmax = sys_.channels[j];
            }
        }
        return r;
    }

    JointSystem sys_;
    MeasureOptions options_;
    bool trivial_ = false;
    std::map<MeasureKind, MeasureResult> cache_;
};

}  // namespace

MeasureResult ii_measure(const JointSystem& system, MeasureKind kind, const MeasureOptions& options) {
    MeasureChain chain(system, options);
    return chain.get(kind);
}

std::map<MeasureKind, MeasureResult> all_measures(const JointSystem& system, const MeasureOptions& options) {
    MeasureChain chain(system, options);
    std::map<MeasureKind, MeasureResult> out;
    for (MeasureKind k : all_measure_kinds()) out.emplace(k, chain.get(k));
    return out;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

CommonVariable gk_common_variable(const JointTable& sources) {
    const std::size_t n = sources.rank();
    std::vector<std::size_t> offset(n + 1, 0);
    for (std::size_t a = 0; a < n; ++a) offset[a + 1] = offset[a] + sources.shape()[a];
    UnionFind uf(offset[n]);
    std::vector<bool> seen(offset[n], false);
    for (std::size_t f = 0; f < sources.probs().size(); ++f) {
        if (sources.probs()[f] <= 0.0) continue;
        const auto idx = sources.unflatten(f);
        for (std::size_t a = 0; a < n; ++a) {
            seen[offset[a] + idx[a]] = true;
            if (a > 0) uf.unite(offset[0] + idx[0], offset[a] + idx[a]);
        }
    }
    // Component ids follow the order in which cells appear.
    std::map<std::size_t, std::size_t> root_id;
    std::map<std::vector<std::size_t>, std::size_t> labeling;
    std::vector<double> mass;
    for (std::size_t f = 0; f < sources.probs().size(); ++f) {
        if (sources.probs()[f] <= 0.0) continue;
        auto idx = sources.unflatten(f);
        const std::size_t root = uf.find(offset[0] + idx[0]);
        auto [it, inserted] = root_id.emplace(root, mass.size());
        if (inserted) mass.push_back(0.0);
        mass[it->second] += sources.probs()[f];
        labeling.emplace(std::move(idx), it->second);
    }
    if (mass.empty()) throw std::invalid_argument("gk_common_variable: empty support");
    std::vector<std::vector<std::optional<std::size_t>>> symbol_component(n);
    for (std::size_t a = 0; a < n; ++a) {
        symbol_component[a].resize(sources.shape()[a]);
        for (std::size_t s = 0; s < sources.shape()[a]; ++s) {
            if (seen[offset[a] + s]) symbol_component[a][s] = root_id.at(uf.find(offset[a] + s));
        }
    }
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    for (double& m : mass) m /= total;
    return CommonVariable{std::move(labeling), std::move(symbol_component), Dist(std::move(mass))};
}

CommonVariable gk_common_variable(const JointSystem& system) {
    std::vector<std::size_t> axes(system.num_sources());
    std::iota(axes.begin(), axes.end(), 1);
    return gk_common_variable(system.joint.marginal(axes));
}

Channel common_variable_channel(const JointSystem& system, const CommonVariable& common) {
    const JointTable& j = system.joint;
    const std::size_t nt = j.shape()[0];
    const std::size_t nc = common.num_components();
    Matrix K(nt, nc);
    for (std::size_t f = 0; f < j.probs().size(); ++f) {
        const double p = j.probs()[f];
        if (p <= 0.0) continue;
        auto idx = j.unflatten(f);
        const std::size_t t = idx[0];
        std::vector<std::size_t> cell(idx.begin() + 1, idx.end());
        K(t, common.labeling.at(cell)) += p;
    }
    for (std::size_t t = 0; t < nt; ++t) {
        double s = 0.0;
        for (std::size_t c = 0; c < nc; ++c) s += K(t, c);
        for (std::size_t c = 0; c < nc; ++c) K(t, c) = s > 0.0 ? K(t, c) / s : 1.0 / static_cast<double>(nc);
    }
    return Channel(j.axes()[0], Alphabet::indexed(nc), std::move(K));
}

Decomposition decomposition_from(const JointSystem& system, const MeasureResult& redundancy) {
    if (system.num_sources() != 2) throw std::invalid_argument("pid_decompose: exactly two sources are required");
    Decomposition d;
    d.measure = redundancy.kind;
    d.redundancy = redundancy.value;
    for (const auto& K : system.channels) d.unique.push_back(mutual_information(system.target_marginal, K) - d.redundancy);
    d.total = mutual_information(system.target_marginal, joint_source_channel(system));
    d.synergy = d.total - d.redundancy - d.unique[0] - d.unique[1];
    d.argmax = redundancy.argmax;
    d.flags = redundancy.flags;
    return d;
}

Decomposition pid_decompose(const JointSystem& system, MeasureKind kind, const MeasureOptions& options) {
    if (system.num_sources() != 2) throw std::invalid_argument("pid_decompose: exactly two sources are required");
    return decomposition_from(system, ii_measure(system, kind, options));
}

JointSystem RandomSystemGenerator::operator()(std::size_t trial) const {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + trial);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto size = [&] {
        return min_alphabet + static_cast<std::size_t>(uniform() * static_cast<double>(max_alphabet - min_alphabet + 1));
    };
    const std::size_t nt = size(), n1 = size(), n2 = size();
    std::vector<double> probs(nt * n1 * n2);
    double total = 0.0;
    for (double& p : probs) {
        const double u = uniform();
        p = uniform() < zero_fraction ? 0.0 : -std::log(1.0 - u);
        total += p;
    }
    if (total == 0.0) {
        probs[0] = 1.0;
        total = 1.0;
    }
    for (double& p : probs) p /= total;
    return joint_to_system(
        JointTable({Alphabet::indexed(nt), Alphabet::indexed(n1), Alphabet::indexed(n2)}, std::move(probs)));
}

namespace {

JointSystem single_source(const JointSystem& sys, std::size_t source) {
    const std::size_t axes[] = {0, source + 1};
    return joint_to_system(sys.joint.marginal(axes));
}

JointSystem duplicated_source(const JointSystem& sys, std::size_t source) {
    const std::size_t axes[] = {0, source + 1};
    const JointTable pair = sys.joint.marginal(axes);
    const std::size_t nt = pair.shape()[0], ny = pair.shape()[1];
    std::vector<double> probs(nt * ny * ny, 0.0);
    for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t y = 0; y < ny; ++y) probs[(t * ny + y) * ny + y] = pair.probs()[t * ny + y];
    }
    return joint_to_system(JointTable({pair.axes()[0], pair.axes()[1], pair.axes()[1]}, std::move(probs)));
}

JointSystem swapped_sources(const JointSystem& sys) {
    return joint_to_system(permute_sources(sys.joint, {1, 0}));
}

}  // namespace

AxiomReport check_wb_axioms(MeasureKind kind, const RandomSystemGenerator& generator, std::size_t trials, double tol,
                            const MeasureOptions& options) {
    if (trials < 1) throw std::invalid_argument("check_wb_axioms: trials must be at least 1");
    AxiomReport report;
    report.kind = kind;
    report.trials = trials;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const JointSystem sys = generator(trial);
        auto record = [&](const char* axiom, double lhs, double rhs, bool ok) {
            ++report.checks;
            if (!ok) report.violations.push_back({trial, axiom, lhs, rhs, write_distribution(sys.joint)});
        };
        const double both = ii_measure(sys, kind, options).value;
        const double swapped = ii_measure(swapped_sources(sys), kind, options).value;
        record("symmetry", both, swapped, std::abs(both - swapped) <= tol);
        for (std::size_t s = 0; s < 2; ++s) {
            const JointSystem one = single_source(sys, s);
            const double alone = ii_measure(one, kind, options).value;
            const double mi = mutual_information(one.target_marginal, one.channels[0]);
            record("self-redundancy", alone, mi, std::abs(alone - mi) <= tol);
            record("monotonicity", both, alone, both <= alone + tol);
            if (s == 0) {
                const double dup = ii_measure(duplicated_source(sys, s), kind, options).value;
                record("equality-for-monotonicity", dup, alone, std::abs(dup - alone) <= tol);
            }
        }
    }
    return report;
}

JointTable copy_target_joint(const JointTable& sources) {
    if (sources.rank() != 2) throw std::invalid_argument("copy_target_joint: expected a two-source table");
    const std::size_t n1 = sources.shape()[0], n2 = sources.shape()[1];
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < n1; ++a) {
        for (std::size_t b = 0; b < n2; ++b) labels.push_back(sources.axes()[0].label(a) + "," + sources.axes()[1].label(b));
    }
    const std::size_t nt = n1 * n2;
    std::vector<double> probs(nt * n1 * n2, 0.0);
    for (std::size_t a = 0; a < n1; ++a) {
        for (std::size_t b = 0; b < n2; ++b) {
            const std::size_t t = a * n2 + b;
            probs[(t * n1 + a) * n2 + b] = sources.probs()[t];
        }
    }
    return JointTable({Alphabet(std::move(labels)), sources.axes()[0], sources.axes()[1]}, std::move(probs));
}

CopyTargetResult copy_target_measures(const JointTable& sources, const MeasureOptions& options, double tol) {
    const double common = gk_common_variable(sources).entropy();
    const double mc = ii_measure(joint_to_system(copy_target_joint(sources)), MeasureKind::MoreCapable, options).value;
    return {common, mc, std::abs(common - mc) <= tol};
}

std::vector<SpecificInfoGap> specific_information_violations(const JointSystem& system, const Channel& q_channel,
                                                             double tol) {
    std::vector<SpecificInfoGap> gaps;
    const Dist& p = system.target_marginal;
    const Channel Q(p.alphabet(), q_channel.output(), q_channel.matrix());
    for (std::size_t t = 0; t < p.size(); ++t) {
        if (p[t] <= 0.0) continue;
        const double q_value = specific_information(p, Q, t);
        for (std::size_t i = 0; i < system.num_sources(); ++i) {
            const double s_value = specific_information(p, system.channels[i], t);
            if (q_value > s_value + tol) gaps.push_back({i, t, s_value, q_value});
        }
    }
    return gaps;
}

}  // namespace pidchan
