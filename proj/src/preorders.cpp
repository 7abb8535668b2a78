#include "pidchan/preorders.hpp"

#include "pidchan/channels.hpp"
#include "pidchan/probcore.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace pidchan {

const char* to_string(Relation r) {
    switch (r) {
    case Relation::Degradation: return "degradation";
    case Relation::LessNoisy: return "less-noisy";
    case Relation::MoreCapable: return "more-capable";
    case Relation::Supermodular: return "supermodular";
    case Relation::DegradationSupermodular: return "degradation/supermodular";
    }
    return "?";
}

const char* to_string(VerdictStatus s) {
    switch (s) {
    case VerdictStatus::Holds: return "Holds";
    case VerdictStatus::Falsified: return "Falsified";
    case VerdictStatus::Unknown: return "Unknown";
    }
    return "?";
}

namespace {

void require_same_input(const Channel& W, const Channel& V) {
    if (W.num_inputs() != V.num_inputs()) throw AlphabetMismatch("preorder check: channels have different input alphabets");
}

using StateKey = std::vector<long long>;

StateKey state_key(const Matrix& m) {
    StateKey key;
    key.reserve(m.data().size() + 1);
    key.push_back(static_cast<long long>(m.cols()));
    for (double v : m.data()) key.push_back(std::llround(v * 1e12));
    return key;
}

Channel apply_steps(Channel K, const std::vector<JoinMeetStep>& steps) {
    for (const auto& s : steps) K = join_meet(K, s.max_col, s.min_col);
    return K;
}

bool same_channel(const Matrix& a, const Matrix& b, double tol) {
    return a.rows() == b.rows() && a.cols() == b.cols() && max_abs_diff(a, b) <= tol;
}

struct Reached {
    Channel channel;
    std::vector<JoinMeetStep> steps;
};

/// BFS over JoinMeet sequences from `start`. Stops early when `target` is
/// reached (returned last). States are deduplicated on 12-decimal rounding.
std::vector<Reached> joinmeet_closure(const Channel& start, std::size_t max_ops, const Matrix* target,
                                      std::size_t cap, bool& hit_target) {
    hit_target = false;
    std::vector<Reached> out;
    std::set<StateKey> visited{state_key(start.matrix())};
    std::optional<StateKey> target_key;
    if (target) target_key = state_key(*target);
    out.push_back({start, {}});
    if (target_key && *target_key == state_key(start.matrix())) {
        hit_target = true;
        return out;
    }
    std::size_t layer_begin = 0;
    const std::size_t k = start.num_outputs();
    for (std::size_t depth = 0; depth < max_ops; ++depth) {
        const std::size_t layer_end = out.size();
        if (layer_begin == layer_end) break;
        for (std::size_t s = layer_begin; s < layer_end; ++s) {
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) {
                    if (i == j) continue;
                    Channel child = join_meet(out[s].channel, i, j);
                    StateKey key = state_key(child.matrix());
                    if (!visited.insert(key).second) continue;
                    auto steps = out[s].steps;
                    steps.push_back({i, j});
                    out.push_back({std::move(child), std::move(steps)});
                    if (target_key && key == *target_key) {
                        hit_target = true;
                        return out;
                    }
                    if (out.size() >= cap) return out;
                }
            }
        }
        layer_begin = layer_end;
    }
    return out;
}

/// All maps f from {0..k-1} to itself that merge at least two symbols,
/// as 0/1 garbling matrices. Empty when k is too large to enumerate.
std::vector<Matrix> merging_garblings(std::size_t k) {
    std::vector<Matrix> out;
    if (k < 2 || k > 4) return out;
    std::size_t total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= k;
    std::vector<std::size_t> f(k);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        std::vector<bool> hit(k, false);
        std::size_t distinct = 0;
        for (std::size_t i = 0; i < k; ++i) {
            f[i] = c % k;
            c /= k;
            if (!hit[f[i]]) {
                hit[f[i]] = true;
                ++distinct;
            }
        }
        if (distinct == k) continue;
        Matrix m(k, k);
        for (std::size_t i = 0; i < k; ++i) m(i, f[i]) = 1.0;
        out.push_back(std::move(m));
    }
    return out;
}

double mc_violation_tol() { return kInfoTol; }

}  // namespace

LinearProgram degradation_problem(const Channel& W, const Channel& V) {
    require_same_input(W, V);
    const std::size_t nt = W.num_inputs();
    const std::size_t nv = V.num_outputs();
    const std::size_t nw = W.num_outputs();
    const std::size_t nvars = nv * nw + 1;
    const std::size_t s = nv * nw;
    LinearProgram lp(nvars);
    lp.objective[s] = 1.0;
    for (std::size_t y = 0; y < nv; ++y) {
        std::vector<double> row(nvars, 0.0);
        for (std::size_t w = 0; w < nw; ++w) row[y * nw + w] = 1.0;
        lp.add_eq(std::move(row), 1.0);
    }
    for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t w = 0; w < nw; ++w) {
            std::vector<double> upper(nvars, 0.0);
            std::vector<double> lower(nvars, 0.0);
            for (std::size_t y = 0; y < nv; ++y) {
                upper[y * nw + w] = V(t, y);
                lower[y * nw + w] = -V(t, y);
            }
            upper[s] = -1.0;
            lower[s] = -1.0;
            lp.add_ub(std::move(upper), W(t, w));
            lp.add_ub(std::move(lower), -W(t, w));
        }
    }
    return lp;
}

PreorderVerdict check_degradation(const Channel& W, const Channel& V, double tol) {
    require_same_input(W, V);
    PreorderVerdict verdict;
    verdict.relation = Relation::Degradation;
    const LpResult res = solve_lp(degradation_problem(W, V));
    if (res.status != LpStatus::Optimal) {
        throw std::runtime_error(std::string("degradation LP did not solve: ") + to_string(res.status));
    }
    const std::size_t nv = V.num_outputs();
    const std::size_t nw = W.num_outputs();
    Matrix U(nv, nw);
    for (std::size_t y = 0; y < nv; ++y) {
        double sum = 0.0;
        for (std::size_t w = 0; w < nw; ++w) sum += (U(y, w) = std::max(res.x[y * nw + w], 0.0));
        for (std::size_t w = 0; w < nw; ++w) U(y, w) /= sum;
    }
    const double residual = max_abs_diff(W.matrix(), V.matrix() * U);
    if (residual <= tol) {
        verdict.status = VerdictStatus::Holds;
        verdict.witness = GarblingWitness{std::move(U), residual};
    } else {
        verdict.status = VerdictStatus::Falsified;
        Counterexample cx;
        cx.residual = std::max(res.objective, 0.0);
        verdict.counterexample = std::move(cx);
    }
    return verdict;
}

ChiSquarePair less_noisy_pair(const Channel& W, const Channel& V, const Dist& p, const Dist& q) {
    require_same_input(W, V);
    std::vector<double> pw(W.num_outputs()), qw(W.num_outputs()), pv(V.num_outputs()), qv(V.num_outputs());
    raw::output_dist(p.probs(), W.matrix(), pw);
    raw::output_dist(q.probs(), W.matrix(), qw);
    raw::output_dist(p.probs(), V.matrix(), pv);
    raw::output_dist(q.probs(), V.matrix(), qv);
    const double cw = raw::chi_square(pw, qw);
    const double cv = raw::chi_square(pv, qv);
    bool violated;
    if (std::isinf(cv) && std::isinf(cw)) {
        violated = false;
    } else if (std::isinf(cv)) {
        violated = true;
    } else if (std::isinf(cw)) {
        violated = false;
    } else {
        violated = cv > cw + kChiSquareTol * (1.0 + cw);
    }
    return {cw, cv, violated};
}

PreorderVerdict check_less_noisy_on(const Channel& W, const Channel& V,
                                    const std::vector<std::pair<Dist, Dist>>& pairs) {
    require_same_input(W, V);
    PreorderVerdict verdict;
    verdict.relation = Relation::LessNoisy;
    verdict.budget.samples = pairs.size();
    for (const auto& [p, q] : pairs) {
        const ChiSquarePair e = less_noisy_pair(W, V, p, q);
        if (e.violated) {
            verdict.status = VerdictStatus::Falsified;
            Counterexample cx;
            cx.p = p;
            cx.q = q;
            cx.violating_side = e.v_side;
            cx.bound_side = e.w_side;
            verdict.counterexample = std::move(cx);
            return verdict;
        }
    }
    verdict.status = VerdictStatus::Unknown;
    return verdict;
}

PreorderVerdict check_less_noisy_sampled(const Channel& W, const Channel& V, std::size_t grid_resolution) {
    require_same_input(W, V);
    const auto grid = simplex_grid(W.input(), grid_resolution);
    const std::size_t g = grid.size();
    const std::size_t nw = W.num_outputs(), nv = V.num_outputs();
    std::vector<double> outw(g * nw), outv(g * nv);
    for (std::size_t i = 0; i < g; ++i) {
        raw::output_dist(grid[i].probs(), W.matrix(), std::span<double>(outw.data() + i * nw, nw));
        raw::output_dist(grid[i].probs(), V.matrix(), std::span<double>(outv.data() + i * nv, nv));
    }
    PreorderVerdict verdict;
    verdict.relation = Relation::LessNoisy;
    verdict.budget.grid_resolution = grid_resolution;
    verdict.budget.samples = g * (g - 1);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            if (i == j) continue;
            const double cw = raw::chi_square({outw.data() + i * nw, nw}, {outw.data() + j * nw, nw});
            const double cv = raw::chi_square({outv.data() + i * nv, nv}, {outv.data() + j * nv, nv});
            bool violated;
            if (std::isinf(cv)) {
                violated = !std::isinf(cw);
            } else {
                violated = !std::isinf(cw) && cv > cw + kChiSquareTol * (1.0 + cw);
            }
            if (violated) {
                verdict.status = VerdictStatus::Falsified;
                Counterexample cx;
                cx.p = grid[i];
                cx.q = grid[j];
                cx.violating_side = cv;
                cx.bound_side = cw;
                verdict.counterexample = std::move(cx);
                return verdict;
            }
        }
    }
    verdict.status = VerdictStatus::Unknown;
    return verdict;
}

PreorderVerdict check_more_capable_on(const Channel& W, const Channel& V, const std::vector<Dist>& points) {
    require_same_input(W, V);
    PreorderVerdict verdict;
    verdict.relation = Relation::MoreCapable;
    verdict.budget.samples = points.size();
    for (const auto& p : points) {
        const double iw = raw::mutual_information(p.probs(), W.matrix());
        const double iv = raw::mutual_information(p.probs(), V.matrix());
        if (iw > iv + mc_violation_tol()) {
            verdict.status = VerdictStatus::Falsified;
            Counterexample cx;
            cx.p = p;
            cx.violating_side = iw;
            cx.bound_side = iv;
            verdict.counterexample = std::move(cx);
            return verdict;
        }
    }
    verdict.status = VerdictStatus::Unknown;
    return verdict;
}

PreorderVerdict check_more_capable_sampled(const Channel& W, const Channel& V, std::size_t grid_resolution) {
    require_same_input(W, V);
    auto verdict = check_more_capable_on(W, V, simplex_grid(W.input(), grid_resolution));
    verdict.budget.grid_resolution = grid_resolution;
    return verdict;
}

PreorderVerdict check_supermodular_reachable(const Channel& W, const Channel& V, std::size_t max_ops) {
    require_same_input(W, V);
    PreorderVerdict verdict;
    verdict.relation = Relation::Supermodular;
    verdict.budget.max_ops = max_ops;
    if (W.num_outputs() != V.num_outputs()) {
        verdict.status = VerdictStatus::Unknown;
        return verdict;
    }
    bool hit = false;
    auto reached = joinmeet_closure(V, max_ops, &W.matrix(), 200000, hit);
    verdict.budget.states_explored = reached.size();
    if (hit) {
        verdict.status = VerdictStatus::Holds;
        verdict.witness = JoinMeetWitness{reached.back().steps};
    } else {
        verdict.status = VerdictStatus::Unknown;
    }
    return verdict;
}

PreorderVerdict check_ds_bounded(const Channel& W, const Channel& V, std::size_t depth, std::size_t max_ops) {
    require_same_input(W, V);
    PreorderVerdict verdict;
    verdict.relation = Relation::DegradationSupermodular;
    verdict.budget.depth = depth;
    verdict.budget.max_ops = max_ops;
    verdict.status = VerdictStatus::Unknown;

    struct Node {
        Channel channel;
        std::vector<ChainLink> links;
        bool from_garbling;
    };
    constexpr std::size_t kFrontierCap = 2000;
    std::vector<Node> frontier{{V, {}, false}};
    std::set<StateKey> visited{state_key(V.matrix())};
    std::size_t explored = 0;

    auto succeed = [&](std::vector<ChainLink> links) {
        verdict.status = VerdictStatus::Holds;
        verdict.witness = ChainWitness{std::move(links)};
        verdict.budget.states_explored = explored;
    };

    for (std::size_t layer = 0; layer < depth; ++layer) {
        for (const Node& node : frontier) {
            ++explored;
            if (same_channel(node.channel.matrix(), W.matrix(), 1e-12)) {
                succeed(node.links);
                return verdict;
            }
            // A garbling of an already-checked node cannot add a new
            // degradation target.
            if (node.from_garbling) continue;
            const auto d = check_degradation(W, node.channel);
            if (d.status == VerdictStatus::Holds) {
                auto links = node.links;
                links.push_back({ChainLink::Kind::Degradation, W, std::get<GarblingWitness>(*d.witness).garbling, {}});
                succeed(std::move(links));
                return verdict;
            }
        }
        if (layer + 1 == depth) break;

        std::vector<Node> next;
        for (const Node& node : frontier) {
            if (next.size() >= kFrontierCap) break;
            bool hit = false;
            const Matrix* target = W.num_outputs() == node.channel.num_outputs() ? &W.matrix() : nullptr;
            auto closure = joinmeet_closure(node.channel, max_ops, target, kFrontierCap, hit);
            if (hit) {
                auto links = node.links;
                links.push_back({ChainLink::Kind::JoinMeet, closure.back().channel, std::nullopt, closure.back().steps});
                succeed(std::move(links));
                return verdict;
            }
            for (auto& r : closure) {
                if (r.steps.empty()) continue;
                if (!visited.insert(state_key(r.channel.matrix())).second) continue;
                auto links = node.links;
                links.push_back({ChainLink::Kind::JoinMeet, r.channel, std::nullopt, r.steps});
                next.push_back({std::move(r.channel), std::move(links), false});
            }
            for (const Matrix& g : merging_garblings(node.channel.num_outputs())) {
                Channel child(node.channel.input(), node.channel.output(), node.channel.matrix() * g);
                if (!visited.insert(state_key(child.matrix())).second) continue;
                auto links = node.links;
                links.push_back({ChainLink::Kind::Degradation, child, g, {}});
                next.push_back({std::move(child), std::move(links), true});
            }
        }
        if (next.size() > kFrontierCap) next.erase(next.begin() + kFrontierCap, next.end());
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    verdict.budget.states_explored = explored;
    return verdict;
}

bool verify(const PreorderVerdict& verdict, const Channel& W, const Channel& V) {
    if (verdict.status == VerdictStatus::Unknown) return true;
    if (verdict.status == VerdictStatus::Holds) {
        if (!verdict.witness) return false;
        return std::visit(
            [&](const auto& w) -> bool {
                using T = std::decay_t<decltype(w)>;
                if constexpr (std::is_same_v<T, GarblingWitness>) {
                    if (w.garbling.rows() != V.num_outputs() || w.garbling.cols() != W.num_outputs()) return false;
                    for (std::size_t r = 0; r < w.garbling.rows(); ++r) {
                        double s = 0.0;
                        for (double v : w.garbling.row(r)) {
                            if (v < -kProbTol) return false;
                            s += v;
                        }
                        if (std::abs(s - 1.0) > kProbTol) return false;
                    }
                    return max_abs_diff(W.matrix(), V.matrix() * w.garbling) <= kDegradationTol;
                } else if constexpr (std::is_same_v<T, JoinMeetWitness>) {
                    return same_channel(apply_steps(V, w.steps).matrix(), W.matrix(), 1e-12);
                } else {
                    Matrix current = V.matrix();
                    for (const auto& link : w.links) {
                        Matrix produced;
                        if (link.kind == ChainLink::Kind::JoinMeet) {
                            produced = apply_steps(Channel(V.input(), Alphabet::indexed(current.cols()), current), link.steps).matrix();
                            if (!same_channel(produced, link.channel.matrix(), 1e-12)) return false;
                        } else {
                            if (!link.garbling) return false;
                            produced = current * *link.garbling;
                            if (!same_channel(produced, link.channel.matrix(), kDegradationTol)) return false;
                        }
                        current = link.channel.matrix();
                    }
                    return same_channel(current, W.matrix(), kDegradationTol);
                }
            },
            *verdict.witness);
    }
    if (!verdict.counterexample) return false;
    const Counterexample& cx = *verdict.counterexample;
    switch (verdict.relation) {
    case Relation::Degradation:
        return check_degradation(W, V).status == VerdictStatus::Falsified;
    case Relation::LessNoisy:
        return cx.p && cx.q && less_noisy_pair(W, V, *cx.p, *cx.q).violated;
    case Relation::MoreCapable:
        return cx.p && raw::mutual_information(cx.p->probs(), W.matrix()) >
                           raw::mutual_information(cx.p->probs(), V.matrix()) + mc_violation_tol();
    default:
        return false;
    }
}

namespace {

std::string format_dist(const Dist& d) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < d.size(); ++i) os << (i ? ", " : "") << d[i];
    os << ']';
    return os.str();
}

std::string format_steps(const std::vector<JoinMeetStep>& steps) {
    std::ostringstream os;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        os << (i ? " " : "") << "⋄(" << steps[i].max_col + 1 << ',' << steps[i].min_col + 1 << ')';
    }
    return os.str();
}

std::string format_matrix(const Matrix& m) {
    std::ostringstream os;
    os << '[';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        os << (r ? "; " : "");
        for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? " " : "") << m(r, c);
    }
    os << ']';
    return os.str();
}

}  // namespace

std::string describe(const PreorderVerdict& verdict) {
    std::ostringstream os;
    os << to_string(verdict.relation) << ": " << to_string(verdict.status);
    if (verdict.witness) {
        std::visit(
            [&](const auto& w) {
                using T = std::decay_t<decltype(w)>;
                if constexpr (std::is_same_v<T, GarblingWitness>) {
                    os << "\n  garbling K^U = " << format_matrix(w.garbling) << "  (residual " << w.residual << ")";
                } else if constexpr (std::is_same_v<T, JoinMeetWitness>) {
                    os << "\n  sequence: " << (w.steps.empty() ? "(empty)" : format_steps(w.steps));
                } else {
                    os << "\n  chain:";
                    if (w.links.empty()) os << " (identical)";
                    for (const auto& link : w.links) {
                        if (link.kind == ChainLink::Kind::JoinMeet) {
                            os << "\n    " << format_steps(link.steps) << " -> " << format_matrix(link.channel.matrix());
                        } else {
                            os << "\n    garble " << format_matrix(*link.garbling) << " -> " << format_matrix(link.channel.matrix());
                        }
                    }
                }
            },
            *verdict.witness);
    }
    if (verdict.counterexample) {
        const auto& cx = *verdict.counterexample;
        if (cx.residual) os << "\n  optimal residual " << *cx.residual;
        if (cx.p) os << "\n  p = " << format_dist(*cx.p);
        if (cx.q) os << "\n  q = " << format_dist(*cx.q);
        if (cx.p) os << "\n  " << cx.violating_side << " > " << cx.bound_side;
    }
    const auto& b = verdict.budget;
    if (verdict.status == VerdictStatus::Unknown) {
        os << "\n  budget:";
        if (b.grid_resolution) os << " grid resolution " << b.grid_resolution;
        if (b.samples) os << " samples " << b.samples;
        if (b.max_ops) os << " max_ops " << b.max_ops;
        if (b.depth) os << " depth " << b.depth;
        if (b.states_explored) os << " states " << b.states_explored;
    }
    return os.str();
}

}  // namespace pidchan
