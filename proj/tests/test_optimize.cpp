#include "pidchan/builtin.hpp"
#include "pidchan/channels.hpp"
#include "pidchan/optimize.hpp"
#include "pidchan/preorders.hpp"
#include "pidchan/probcore.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace pidchan;
using doctest::Approx;

namespace {

OptimizerConfig quick(std::size_t support = 0) {
    OptimizerConfig c;
    c.support_size = support;
    c.num_starts = 8;
    return c;
}

}  // namespace

TEST_CASE("gradient matches central differences") {
    testing::Rng rng(30);
    const double h = 1e-5;
    for (int point = 0; point < 50; ++point) {
        const std::size_t nt = 2 + point % 3, nq = 2 + (point / 3) % 3;
        const Dist p = testing::random_dist(rng, nt);
        // Interior point, away from the zero-entry floor.
        Matrix K(nt, nq);
        for (std::size_t t = 0; t < nt; ++t) {
            const auto row = testing::random_simplex(rng, nq);
            for (std::size_t q = 0; q < nq; ++q) K(t, q) = 0.05 + 0.9 * row[q];
            double s = 0.0;
            for (std::size_t q = 0; q < nq; ++q) s += K(t, q);
            for (std::size_t q = 0; q < nq; ++q) K(t, q) /= s;
        }
        const Matrix g = mi_gradient(p, Channel(K));
        for (std::size_t t = 0; t < nt; ++t) {
            for (std::size_t q = 0; q < nq; ++q) {
                Matrix a = K, b = K;
                a(t, q) += h;
                b(t, q) -= h;
                const double fd =
                    (raw::mutual_information(p.probs(), a) - raw::mutual_information(p.probs(), b)) / (2.0 * h);
                const double err = std::abs(g(t, q) - fd) / std::max(std::abs(fd), 1e-3);
                CHECK(err < 1e-4);
            }
        }
    }
}

TEST_CASE("row projection onto the simplex") {
    const Matrix m = Matrix::from_rows({{0.2, 0.3, 0.5}, {2.0, 0.0, 0.0}, {-1.0, 0.5, 0.6}});
    const Matrix p = project_rows_to_simplex(m);
    CHECK(p(0, 0) == Approx(0.2));
    CHECK(p(1, 0) == Approx(1.0));
    CHECK(p(2, 0) == 0.0);
    CHECK(p(2, 1) == Approx(0.45));
    CHECK(p(2, 2) == Approx(0.55));
}

TEST_CASE("config validation and default support") {
    OptimizerConfig c;
    c.num_starts = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = OptimizerConfig{};
    c.step_size = 0.0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    const auto [k3, k4] = counterexample2_channels();
    const Channel bank[] = {k3, k4};
    CHECK(default_support_size(bank) == 3);
}

TEST_CASE("unconstrained maximum is the target entropy") {
    testing::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t nt = 1 + trial % 4;
        const Dist p = testing::random_dist(rng, nt, 0.2);
        const auto r = maximize_mi(p, unconstrained_oracle(), quick(nt));
        CHECK(r.value == Approx(entropy(p)).epsilon(1e-3));
        CHECK(r.value == Approx(mutual_information(p, r.argmax)).epsilon(1e-12));
    }
}

TEST_CASE("identical rows oracle gives zero") {
    const auto r = maximize_mi(Dist(std::vector<double>{0.2, 0.3, 0.5}), identical_rows_oracle(), quick(3));
    CHECK(r.value == Approx(0.0));
    CHECK(has_identical_rows(r.argmax));
}

TEST_CASE("degradation oracle examples") {
    const auto [k1, k2] = counterexample1_channels();
    const FeasibilityOracle o = degradation_feasible_oracle({k1, k2});
    const double row[] = {0.3, 0.7};
    CHECK(o.is_feasible(Channel::constant(k1.input(), Alphabet::indexed(2), row)));
    CHECK(degradation_feasible_oracle({k1}).is_feasible(k1));
    const double flat[] = {0.5, 0.5};
    const Channel constant = Channel::constant(Alphabet::indexed(2), Alphabet::indexed(2), flat);
    CHECK_FALSE(degradation_feasible_oracle({constant}).is_feasible(Channel::identity(Alphabet::indexed(2))));
    REQUIRE(o.repair);
    const auto fixed = o.repair(Channel::identity(Alphabet::indexed(2)));
    if (fixed) CHECK(o.is_feasible(*fixed));
}

TEST_CASE("AND gate under the degradation oracle") {
    const JointSystem sys = joint_to_system(builtin_example("and")->table);
    const auto r = maximize_mi(sys.target_marginal, degradation_feasible_oracle(sys.channels), OptimizerConfig{});
    CHECK(r.value == Approx(0.3112781244591328).epsilon(1e-6));
    for (const auto& K : sys.channels) CHECK(check_degradation(r.argmax, K).status == VerdictStatus::Holds);
}

TEST_CASE("counterexample 1 under the degradation oracle") {
    const auto [k1, k2] = counterexample1_channels();
    const auto r = maximize_mi(counterexample1_target(), degradation_feasible_oracle({k1, k2}), OptimizerConfig{});
    // Independent sequential-LP oracle value.
    CHECK(r.value == Approx(0.0024436624).epsilon(1e-6));
}

TEST_CASE("sampled oracle examples") {
    const auto [k1, k2] = counterexample1_channels();
    const double row[] = {0.5, 0.5};
    const Channel constant = Channel::constant(k1.input(), Alphabet::indexed(2), row);
    for (std::size_t m : {5u, 10u, 20u}) {
        const FeasibilityOracle ln = ln_sampled_oracle({k1, k2}, m);
        CHECK(ln.is_feasible(constant));
        CHECK(ln.is_feasible(k2));
        CHECK_FALSE(ln.is_feasible(k1));
    }
    const auto [k3, k4] = counterexample2_channels();
    const FeasibilityOracle mc = mc_sampled_oracle({k3, k4}, 10);
    CHECK(mc.is_feasible(Channel::constant(k3.input(), Alphabet::indexed(2), row)));
    CHECK_FALSE(mc.is_feasible(k3));
    CHECK(mc.is_feasible(k4));
    CHECK(less_noisy_pair_resolution(3, 10) == 10);
    CHECK(less_noisy_pair_resolution(9, 10) < 10);
}

TEST_CASE("self-redundancy, MMI cap and monotonicity in the bank") {
    testing::Rng rng(32);
    for (int trial = 0; trial < 6; ++trial) {
        const Dist p = testing::random_dist(rng, 3);
        const Channel a = testing::random_channel(rng, 3, 2, 0.2);
        const Channel b = testing::random_channel(rng, 3, 3, 0.2);
        const Dist extra[] = {p};
        const double ia = mutual_information(p, a), ib = mutual_information(p, b);
        std::vector<FeasibilityOracle> single{degradation_feasible_oracle({a}), mc_sampled_oracle({a}, 6, extra),
                                              ln_sampled_oracle({a}, 6, extra)};
        std::vector<FeasibilityOracle> pair{degradation_feasible_oracle({a, b}), mc_sampled_oracle({a, b}, 6, extra),
                                            ln_sampled_oracle({a, b}, 6, extra)};
        for (std::size_t k = 0; k < 3; ++k) {
            single[k].seeds = {a};
            pair[k].seeds = {a, b};
            const double one = maximize_mi(p, single[k], quick()).value;
            const double two = maximize_mi(p, pair[k], quick()).value;
            CHECK(one == Approx(ia).epsilon(1e-6));
            CHECK(two <= one + 1e-6);
            CHECK(two <= std::min(ia, ib) + 1e-6);
        }
    }
}

TEST_CASE("results are deterministic given the seed") {
    const auto [k3, k4] = counterexample2_channels();
    const Dist extra[] = {counterexample2_target()};
    const FeasibilityOracle o = mc_sampled_oracle({k3, k4}, 10, extra);
    const auto a = maximize_mi(counterexample2_target(), o, OptimizerConfig{});
    const auto b = maximize_mi(counterexample2_target(), o, OptimizerConfig{});
    CHECK(a.value == b.value);
    CHECK(a.argmax.matrix() == b.argmax.matrix());
}

TEST_CASE("an oracle that rejects everything is reported") {
    FeasibilityOracle none;
    none.name = "empty";
    none.is_feasible = [](const Channel&) { return false; };
    CHECK_THROWS_AS(maximize_mi(Dist(std::vector<double>{0.5, 0.5}), none, quick(2)), OptimizerError);
}
