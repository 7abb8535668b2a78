#include "pidchan/optimize.hpp"

#include "pidchan/channels.hpp"
#include "pidchan/lp.hpp"
#include "pidchan/preorders.hpp"
#include "pidchan/probcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

namespace pidchan {

void validate(const OptimizerConfig& config) {
    if (config.num_starts < 1) throw std::invalid_argument("optimizer: num_starts must be at least 1");
    if (!(config.step_size > 0.0)) throw std::invalid_argument("optimizer: step_size must be positive");
    if (!(config.tolerance >= 0.0)) throw std::invalid_argument("optimizer: tolerance must be non-negative");
}

std::size_t default_support_size(std::span<const Channel> channels) {
    if (channels.empty()) return 1;
    std::size_t total = 0;
    for (const auto& K : channels) total += K.num_outputs();
    return total - channels.size() + 1;
}

Matrix mi_gradient(const Dist& p_t, const Channel& K) {
    const std::size_t nt = K.num_inputs(), nq = K.num_outputs();
    std::vector<double> r(nq);
    raw::output_dist(p_t.probs(), K.matrix(), r);
    Matrix g(nt, nq);
    for (std::size_t t = 0; t < nt; ++t) {
        const double pt = p_t[t];
        if (pt == 0.0) continue;
        for (std::size_t q = 0; q < nq; ++q) {
            if (r[q] < 1e-15) {
                g(t, q) = pt * std::log2(1.0 / pt);
            } else {
                g(t, q) = pt * std::log2(std::max(K(t, q), 1e-12) / r[q]);
            }
        }
    }
    return g;
}

Matrix project_rows_to_simplex(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    std::vector<double> u(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        std::copy(row.begin(), row.end(), u.begin());
        std::sort(u.begin(), u.end(), std::greater<>());
        double cumsum = 0.0, theta = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            cumsum += u[j];
            const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
            if (u[j] - t > 0.0) theta = t;
        }
        double s = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) s += (out(r, c) = std::max(row[c] - theta, 0.0));
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) /= s;
    }
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Per-start stream derived from (seed, start index).
class StartRng {
public:
    StartRng(std::uint64_t seed, std::size_t start) : engine_(splitmix64(seed ^ splitmix64(start + 1))) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

private:
    std::mt19937_64 engine_;
};

Matrix clean_rows(Matrix m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        double s = 0.0;
        for (double& v : row) s += (v = std::max(v, 0.0));
        for (double& v : row) v /= s;
    }
    return m;
}

/// LP over the stacked garblings U_1..U_n with K_1 U_1 = K_i U_i.
class PolytopeLp {
public:
    PolytopeLp(const std::vector<Channel>& bank, std::size_t q) : bank_(bank), q_(q) {
        std::size_t nvars = 0;
        for (const auto& K : bank_) {
            offsets_.push_back(nvars);
            nvars += K.num_outputs() * q_;
        }
        base_ = LinearProgram(nvars);
        for (std::size_t i = 0; i < bank_.size(); ++i) {
            for (std::size_t y = 0; y < bank_[i].num_outputs(); ++y) {
                std::vector<double> row(nvars, 0.0);
                for (std::size_t c = 0; c < q_; ++c) row[offsets_[i] + y * q_ + c] = 1.0;
                base_.add_eq(std::move(row), 1.0);
            }
        }
        const Channel& K0 = bank_.front();
        for (std::size_t i = 1; i < bank_.size(); ++i) {
            for (std::size_t t = 0; t < K0.num_inputs(); ++t) {
                for (std::size_t c = 0; c < q_; ++c) {
                    std::vector<double> row(nvars, 0.0);
                    for (std::size_t y = 0; y < K0.num_outputs(); ++y) row[offsets_[0] + y * q_ + c] += K0(t, y);
                    for (std::size_t y = 0; y < bank_[i].num_outputs(); ++y) {
                        row[offsets_[i] + y * q_ + c] -= bank_[i](t, y);
                    }
                    base_.add_eq(std::move(row), 0.0);
                }
            }
        }
    }

    /// Vertex maximizing <weights, K_1 U_1>.
    std::optional<Matrix> solve(const Matrix& weights) const {
        LinearProgram lp = base_;
        const Channel& K0 = bank_.front();
        for (std::size_t y = 0; y < K0.num_outputs(); ++y) {
            for (std::size_t c = 0; c < q_; ++c) {
                double w = 0.0;
                for (std::size_t t = 0; t < K0.num_inputs(); ++t) w += weights(t, c) * K0(t, y);
                lp.objective[offsets_[0] + y * q_ + c] = -w;
            }
        }
        const LpResult res = solve_lp(lp);
        if (res.status != LpStatus::Optimal) return std::nullopt;
        Matrix U(K0.num_outputs(), q_);
        for (std::size_t y = 0; y < K0.num_outputs(); ++y) {
            for (std::size_t c = 0; c < q_; ++c) U(y, c) = res.x[offsets_[0] + y * q_ + c];
        }
        return clean_rows(K0.matrix() * clean_rows(std::move(U)));
    }

private:
    const std::vector<Channel>& bank_;
    std::size_t q_;
    std::vector<std::size_t> offsets_;
    LinearProgram base_;
};

bool lexicographically_less(const Matrix& a, const Matrix& b) {
    return std::lexicographical_compare(a.data().begin(), a.data().end(), b.data().begin(), b.data().end());
}

class Search {
public:
    Search(const Dist& p_t, const FeasibilityOracle& oracle, const OptimizerConfig& config, std::size_t q)
        : p_(p_t), oracle_(oracle), config_(config), q_(q), out_(Alphabet::indexed(q)),
          center_(p_t.size(), q, 1.0 / static_cast<double>(q)) {}

    double value(const Matrix& K) const { return raw::mutual_information(p_.probs(), K); }

    bool feasible(const Matrix& K) const { return oracle_.is_feasible(channel(K)); }

    Channel channel(const Matrix& K) const { return Channel(p_.alphabet(), out_, K); }

    const Matrix& center() const { return center_; }

    void consider(const Matrix& K, double v) {
        if (!best_ || v > best_value_ + 1e-12 ||
            (std::abs(v - best_value_) <= 1e-12 && lexicographically_less(K, *best_))) {
            best_ = K;
            best_value_ = std::max(v, 0.0);
        }
    }

    /// Seeds padded to |Q| columns; seeds wider than |Q| are dropped.
    std::vector<Matrix> seeds() const {
        std::vector<Matrix> out;
        for (const auto& s : oracle_.seeds) {
            if (s.num_inputs() != p_.size() || s.num_outputs() > q_) continue;
            Matrix m(p_.size(), q_);
            for (std::size_t t = 0; t < p_.size(); ++t) {
                for (std::size_t c = 0; c < s.num_outputs(); ++c) m(t, c) = s(t, c);
            }
            out.push_back(std::move(m));
        }
        return out;
    }

    void vertex_ascent(const PolytopeLp& lp, Matrix K) {
        double f = value(K);
        for (std::size_t it = 0; it < config_.max_iters; ++it) {
            auto next = lp.solve(mi_gradient(p_, channel(K)));
            if (!next) break;
            const double fn = value(*next);
            if (fn > f + 1e-12) {
                K = std::move(*next);
                f = fn;
            } else {
                break;
            }
        }
        consider(K, f);
    }

    /// Largest feasible point on the segment from the center to X.
    std::optional<Matrix> retract(const Matrix& X) const {
        if (feasible(X)) return X;
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 24; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (feasible(blend(mid, X))) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if (lo == 0.0) return std::nullopt;
        return blend(lo, X);
    }

    void projected_ascent(Matrix K) {
        double f = value(K);
        double step = config_.step_size;
        for (std::size_t it = 0; it < config_.max_iters && step >= 1e-4; ++it) {
            Matrix g = mi_gradient(p_, channel(K));
            double scale = 0.0;
            for (double v : g.data()) scale = std::max(scale, std::abs(v));
            if (scale == 0.0) break;
            Matrix X(K.rows(), K.cols());
            for (std::size_t i = 0; i < X.data().size(); ++i) X.data()[i] = K.data()[i] + step * g.data()[i] / scale;
            X = project_rows_to_simplex(X);
            std::optional<Matrix> cand;
            if (feasible(X)) {
                cand = std::move(X);
            } else if (oracle_.repair) {
                if (auto r = oracle_.repair(channel(X)); r && r->num_outputs() == q_) cand = r->matrix();
            }
            const double fc = cand ? value(*cand) : -1.0;
            if (cand && fc > f + 1e-12) {
                K = std::move(*cand);
                f = fc;
                step = std::min(step * 2.0, 4.0);
            } else {
                step *= 0.5;
            }
        }
        consider(K, f);
    }

    void set_center_feasible(bool ok) { center_ok_ = ok; }
    bool center_feasible() const { return center_ok_; }

    std::optional<OptimizationResult> result(std::size_t starts) const {
        if (!best_) return std::nullopt;
        return OptimizationResult{best_value_, channel(*best_), starts};
    }

private:
    Matrix blend(double lambda, const Matrix& X) const {
        Matrix m(X.rows(), X.cols());
        for (std::size_t i = 0; i < m.data().size(); ++i) {
            m.data()[i] = center_.data()[i] + lambda * (X.data()[i] - center_.data()[i]);
        }
        return clean_rows(std::move(m));
    }

    const Dist& p_;
    const FeasibilityOracle& oracle_;
    const OptimizerConfig& config_;
    std::size_t q_;
    Alphabet out_;
    Matrix center_;
    bool center_ok_ = false;
    std::optional<Matrix> best_;
    double best_value_ = 0.0;
};

Matrix random_deterministic(StartRng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) m(r, rng.below(cols)) = 1.0;
    return m;
}

}  // namespace

OptimizationResult maximize_mi(const Dist& p_t, const FeasibilityOracle& oracle, const OptimizerConfig& config) {
    validate(config);
    if (!oracle.is_feasible) throw std::invalid_argument("maximize_mi: oracle has no feasibility predicate");
    std::size_t q = config.support_size;
    if (q == 0) q = oracle.polytope_bank.empty() ? p_t.size() : default_support_size(oracle.polytope_bank);

    Search search(p_t, oracle, config, q);
    std::size_t starts = 0;
    search.set_center_feasible(search.feasible(search.center()));
    if (search.center_feasible()) {
        search.consider(search.center(), 0.0);
        ++starts;
    }

    if (!oracle.polytope_bank.empty()) {
        for (const auto& K : oracle.polytope_bank) {
            if (K.num_inputs() != p_t.size()) throw AlphabetMismatch("maximize_mi: bank channel input differs from p_t");
        }
        const PolytopeLp lp(oracle.polytope_bank, q);
        for (const Matrix& s : search.seeds()) {
            if (!search.feasible(s)) continue;
            ++starts;
            search.vertex_ascent(lp, s);
        }
        for (std::size_t s = 0; s < config.num_starts; ++s) {
            StartRng rng(config.seed, s);
            Matrix weights(p_t.size(), q);
            for (double& w : weights.data()) w = 2.0 * rng.uniform() - 1.0;
            // Column-centered weights score every constant channel 0, so the
            // vertex found separates rows whenever the polytope allows it.
            for (std::size_t c = 0; c < q; ++c) {
                double mean = 0.0;
                for (std::size_t t = 0; t < p_t.size(); ++t) mean += weights(t, c);
                mean /= static_cast<double>(p_t.size());
                for (std::size_t t = 0; t < p_t.size(); ++t) weights(t, c) -= mean;
            }
            auto vertex = lp.solve(weights);
            if (!vertex) continue;
            ++starts;
            search.vertex_ascent(lp, std::move(*vertex));
        }
    } else {
        for (const Matrix& s : search.seeds()) {
            std::optional<Matrix> start;
            if (search.feasible(s)) {
                start = s;
            } else if (search.center_feasible()) {
                start = search.retract(s);
            }
            if (!start) continue;
            ++starts;
            search.projected_ascent(std::move(*start));
        }
        for (std::size_t s = 0; s < config.num_starts; ++s) {
            StartRng rng(config.seed, s);
            Matrix vertex = random_deterministic(rng, p_t.size(), q);
            std::optional<Matrix> start;
            if (search.feasible(vertex)) {
                start = std::move(vertex);
            } else if (search.center_feasible()) {
                start = search.retract(vertex);
            }
            if (!start) continue;
            ++starts;
            search.projected_ascent(std::move(*start));
        }
    }

    auto result = search.result(starts);
    if (!result) throw OptimizerError("maximize_mi: oracle '" + oracle.name + "' rejected every generated point");
    return std::move(*result);
}

FeasibilityOracle unconstrained_oracle() {
    FeasibilityOracle o;
    o.name = "stochastic";
    o.is_feasible = [](const Channel&) { return true; };
    return o;
}

FeasibilityOracle identical_rows_oracle() {
    FeasibilityOracle o;
    o.name = "identical-rows";
    o.is_feasible = [](const Channel& K) { return has_identical_rows(K); };
    return o;
}

FeasibilityOracle degradation_feasible_oracle(std::vector<Channel> channels, double tol) {
    FeasibilityOracle o;
    o.name = "degradation";
    auto bank = std::make_shared<const std::vector<Channel>>(std::move(channels));
    o.is_feasible = [bank, tol](const Channel& K) {
        for (const auto& Ki : *bank) {
            if (check_degradation(K, Ki, tol).status != VerdictStatus::Holds) return false;
        }
        return true;
    };
    o.repair = [bank, tol](const Channel& K) -> std::optional<Channel> {
        if (bank->empty()) return std::nullopt;
        const Channel& K1 = bank->front();
        // The degradation LP returns its best-fit garbling even when the
        // residual is too large; it sits in the solution vector.
        const LpResult res = solve_lp(degradation_problem(K, K1));
        if (res.status != LpStatus::Optimal) return std::nullopt;
        Matrix U(K1.num_outputs(), K.num_outputs());
        for (std::size_t y = 0; y < U.rows(); ++y) {
            for (std::size_t c = 0; c < U.cols(); ++c) U(y, c) = res.x[y * U.cols() + c];
        }
        Channel fitted(K.input(), K.output(), clean_rows(K1.matrix() * clean_rows(std::move(U))));
        for (std::size_t i = 1; i < bank->size(); ++i) {
            if (check_degradation(fitted, (*bank)[i], tol).status != VerdictStatus::Holds) return std::nullopt;
        }
        return fitted;
    };
    o.polytope_bank = *bank;
    return o;
}

std::vector<Dist> oracle_samples(const Alphabet& alphabet, std::size_t grid_resolution,
                                 std::span<const Dist> extra_points) {
    std::vector<Dist> points = simplex_grid(alphabet, grid_resolution);
    for (const auto& p : extra_points) {
        if (p.size() != alphabet.size()) throw AlphabetMismatch("oracle sample has wrong dimension");
        points.emplace_back(alphabet, std::vector<double>(p.probs().begin(), p.probs().end()));
    }
    return points;
}

namespace {

/// Shared precomputation for the more-capable constraints.
struct McConstraints {
    std::vector<std::vector<double>> points;
    std::vector<double> bound;  // min_i I_p(K_i) + tol

    McConstraints(const std::vector<Channel>& bank, const std::vector<Dist>& samples, double tol) {
        for (const auto& p : samples) {
            double b = std::numeric_limits<double>::infinity();
            for (const auto& K : bank) b = std::min(b, raw::mutual_information(p.probs(), K.matrix()));
            // Points where no bank channel carries information only admit
            // channels that carry none either.
            points.emplace_back(p.probs().begin(), p.probs().end());
            bound.push_back(b + tol);
        }
    }

    bool satisfied(const Matrix& K) const {
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (raw::mutual_information(points[i], K) > bound[i]) return false;
        }
        return true;
    }
};

void require_bank(const std::vector<Channel>& channels) {
    if (channels.empty()) throw std::invalid_argument("sampled oracle needs at least one channel");
    for (const auto& K : channels) {
        if (K.num_inputs() != channels.front().num_inputs()) throw AlphabetMismatch("oracle channels differ in input alphabet");
    }
}

}  // namespace

FeasibilityOracle mc_sampled_oracle(std::vector<Channel> channels, std::size_t grid_resolution,
                                    std::span<const Dist> extra_points, double tol) {
    require_bank(channels);
    const auto samples = oracle_samples(channels.front().input(), grid_resolution, extra_points);
    auto mc = std::make_shared<const McConstraints>(channels, samples, tol);
    FeasibilityOracle o;
    o.name = "more-capable(sampled)";
    o.is_feasible = [mc](const Channel& K) { return mc->satisfied(K.matrix()); };
    o.seeds = std::move(channels);
    return o;
}

std::size_t less_noisy_pair_resolution(std::size_t dim, std::size_t requested) {
    auto count = [dim](std::size_t m) {
        // C(m + dim - 1, dim - 1), saturating
        double c = 1.0;
        for (std::size_t k = 1; k < dim; ++k) c = c * static_cast<double>(m + k) / static_cast<double>(k);
        return c;
    };
    std::size_t m = std::max<std::size_t>(requested, 1);
    while (m > 1 && count(m) > static_cast<double>(kMaxLessNoisyPoints)) --m;
    return m;
}

namespace {

struct LnConstraints {
    std::vector<std::vector<double>> points;
    std::size_t n;
    /// bound[i*n + j] = min_k chi2(p_i K_k || p_j K_k), +inf when vacuous.
    std::vector<double> bound;
    double tol;

    LnConstraints(const std::vector<Channel>& bank, const std::vector<Dist>& samples, double tol_)
        : n(samples.size()), bound(samples.size() * samples.size(), std::numeric_limits<double>::infinity()), tol(tol_) {
        for (const auto& p : samples) points.emplace_back(p.probs().begin(), p.probs().end());
        for (const auto& K : bank) {
            const std::size_t ny = K.num_outputs();
            std::vector<double> out(n * ny);
            for (std::size_t i = 0; i < n; ++i) raw::output_dist(points[i], K.matrix(), {out.data() + i * ny, ny});
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const double c = raw::chi_square({out.data() + i * ny, ny}, {out.data() + j * ny, ny});
                    bound[i * n + j] = std::min(bound[i * n + j], c);
                }
            }
        }
    }

    bool satisfied(const Matrix& K) const {
        const std::size_t nq = K.cols();
        std::vector<double> out(n * nq);
        for (std::size_t i = 0; i < n; ++i) raw::output_dist(points[i], K, {out.data() + i * nq, nq});
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double b = bound[i * n + j];
                if (std::isinf(b)) continue;
                const double c = raw::chi_square({out.data() + i * nq, nq}, {out.data() + j * nq, nq});
                if (c > b + tol * (1.0 + b)) return false;
            }
        }
        return true;
    }
};

}  // namespace

FeasibilityOracle ln_sampled_oracle(std::vector<Channel> channels, std::size_t grid_resolution,
                                    std::span<const Dist> extra_points, double tol) {
    require_bank(channels);
    const Alphabet& alphabet = channels.front().input();
    const auto mc_samples = oracle_samples(alphabet, grid_resolution, extra_points);
    const std::size_t pair_res = less_noisy_pair_resolution(alphabet.size(), grid_resolution);
    const auto ln_samples = oracle_samples(alphabet, pair_res, extra_points);
    auto mc = std::make_shared<const McConstraints>(channels, mc_samples, tol);
    auto ln = std::make_shared<const LnConstraints>(channels, ln_samples, tol);
    FeasibilityOracle o;
    o.name = "less-noisy(sampled)";
    o.is_feasible = [mc, ln](const Channel& K) { return mc->satisfied(K.matrix()) && ln->satisfied(K.matrix()); };
    o.seeds = std::move(channels);
    return o;
}

}  // namespace pidchan
