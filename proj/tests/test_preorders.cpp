#include "pidchan/builtin.hpp"
#include "pidchan/channels.hpp"
#include "pidchan/preorders.hpp"
#include "pidchan/probcore.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace pidchan;
using doctest::Approx;

namespace {

const Channel& k3() {
    static const Channel k = counterexample2_channels().first;
    return k;
}
const Channel& k4() {
    static const Channel k = counterexample2_channels().second;
    return k;
}

}  // namespace

TEST_CASE("degradation examples") {
    const PreorderVerdict self = check_degradation(k3(), k3());
    REQUIRE(self.status == VerdictStatus::Holds);
    CHECK(verify(self, k3(), k3()));

    const PreorderVerdict no = check_degradation(k4(), k3());
    CHECK(no.status == VerdictStatus::Falsified);
    REQUIRE(no.counterexample);
    CHECK(*no.counterexample->residual > kDegradationTol);
    CHECK(verify(no, k4(), k3()));

    const auto [k1, k2] = counterexample1_channels();
    CHECK(check_degradation(k2, k1).status == VerdictStatus::Falsified);
    CHECK(check_degradation(k1, k2).status == VerdictStatus::Falsified);
}

TEST_CASE("garbled channels are degraded, with verified witnesses") {
    testing::Rng rng(20);
    for (int trial = 0; trial < 50; ++trial) {
        const Channel V = testing::random_channel(rng, 3, 3, 0.2);
        const Channel M = testing::random_channel(rng, 3, 2 + trial % 3, 0.3);
        const Channel W = compose(V, M);
        const PreorderVerdict v = check_degradation(W, V);
        REQUIRE(v.status == VerdictStatus::Holds);
        CHECK(verify(v, W, V));
        const auto& g = std::get<GarblingWitness>(*v.witness);
        CHECK(max_abs_diff(V.matrix() * g.garbling, W.matrix()) <= kDegradationTol);
    }
}

TEST_CASE("degradation rejects mismatched inputs") {
    CHECK_THROWS_AS(check_degradation(k3(), counterexample1_channels().first), AlphabetMismatch);
}

TEST_CASE("less noisy: explicit witness pairs") {
    const Dist p1(std::vector<double>{0, 0, 1}), q1(std::vector<double>{0.1, 0.1, 0.8});
    const auto a = less_noisy_pair(k3(), k4(), p1, q1);
    CHECK(a.violated);
    CHECK(a.w_side == Approx(0.0));
    CHECK(a.v_side == Approx(1.0 / 24.0));

    const Dist p2(std::vector<double>{0, 1, 0}), q2(std::vector<double>{0.1, 0, 0.9});
    const auto b = less_noisy_pair(k4(), k3(), p2, q2);
    CHECK(b.violated);
    CHECK(b.v_side == Approx(11.0 / 9.0));
    CHECK(b.w_side == Approx(9.0 / 11.0));

    const PreorderVerdict v1 = check_less_noisy_on(k3(), k4(), {{p1, q1}});
    CHECK(v1.status == VerdictStatus::Falsified);
    CHECK(verify(v1, k3(), k4()));
    const PreorderVerdict v2 = check_less_noisy_on(k4(), k3(), {{p2, q2}});
    CHECK(v2.status == VerdictStatus::Falsified);
    CHECK(verify(v2, k4(), k3()));
}

TEST_CASE("less noisy sampled") {
    CHECK(check_less_noisy_sampled(k3(), k4()).status == VerdictStatus::Falsified);
    CHECK(check_less_noisy_sampled(k4(), k3()).status == VerdictStatus::Falsified);
    for (std::size_t m : {1u, 3u, 10u}) {
        const PreorderVerdict v = check_less_noisy_sampled(k3(), k3(), m);
        CHECK(v.status == VerdictStatus::Unknown);
        CHECK(v.budget.grid_resolution == m);
    }
    // K2 is less noisy-dominated by K1 although it is not a degradation.
    const auto [k1, k2] = counterexample1_channels();
    for (std::size_t m = 1; m <= 20; ++m) CHECK(check_less_noisy_sampled(k1, k2, m).status == VerdictStatus::Unknown);
}

TEST_CASE("chi-square sentinel rules") {
    const Channel id = Channel::identity(Alphabet::indexed(2));
    const Dist p(std::vector<double>{1, 0}), q(std::vector<double>{0, 1});
    CHECK_FALSE(less_noisy_pair(id, id, p, q).violated);
    const double row[] = {0.5, 0.5};
    const Channel flat = Channel::constant(Alphabet::indexed(2), Alphabet::indexed(2), row);
    CHECK(less_noisy_pair(flat, id, p, q).violated);
    CHECK_FALSE(less_noisy_pair(id, flat, p, q).violated);
}

TEST_CASE("more capable sampled") {
    CHECK(check_more_capable_sampled(k3(), k3()).status == VerdictStatus::Unknown);
    for (std::size_t m : {2u, 5u, 10u, 20u}) {
        CHECK(check_more_capable_sampled(k4(), k3(), m).status == VerdictStatus::Unknown);
    }
    const double row[] = {0.5, 0.5};
    const Channel id = Channel::identity(Alphabet::indexed(2));
    const Channel flat = Channel::constant(Alphabet::indexed(2), Alphabet::indexed(2), row);
    const PreorderVerdict v = check_more_capable_sampled(id, flat);
    REQUIRE(v.status == VerdictStatus::Falsified);
    REQUIRE(v.counterexample->p);
    CHECK(entropy(*v.counterexample->p) > 0.0);
    CHECK(verify(v, id, flat));
    CHECK(check_more_capable_sampled(k3(), k4()).status == VerdictStatus::Falsified);
}

TEST_CASE("supermodular reachability") {
    const PreorderVerdict v = check_supermodular_reachable(k4(), k3(), 1);
    REQUIRE(v.status == VerdictStatus::Holds);
    const auto& steps = std::get<JoinMeetWitness>(*v.witness).steps;
    REQUIRE(steps.size() == 1);
    CHECK(steps[0] == JoinMeetStep{0, 1});
    CHECK(verify(v, k4(), k3()));
    CHECK(describe(v).find("⋄(1,2)") != std::string::npos);

    const PreorderVerdict self = check_supermodular_reachable(k3(), k3(), 0);
    REQUIRE(self.status == VerdictStatus::Holds);
    CHECK(std::get<JoinMeetWitness>(*self.witness).steps.empty());

    // Reachable set of V is {V, [[.8,.2],[.6,.4]], [[.2,.8],[.4,.6]], ...}: W is not in it.
    const Channel V = Channel::from_rows({{0.2, 0.8}, {0.6, 0.4}});
    const Channel W = Channel::from_rows({{0.5, 0.5}, {0.1, 0.9}});
    CHECK(check_supermodular_reachable(W, V, 8).status == VerdictStatus::Unknown);
    CHECK(check_supermodular_reachable(k3(), k4(), 8).status == VerdictStatus::Unknown);
}

TEST_CASE("ds search") {
    const PreorderVerdict v = check_ds_bounded(k4(), k3());
    REQUIRE(v.status == VerdictStatus::Holds);
    CHECK(verify(v, k4(), k3()));
    CHECK(describe(v).find("⋄(1,2)") != std::string::npos);

    testing::Rng rng(21);
    const Channel V = testing::random_channel(rng, 3, 3);
    const Channel W = compose(V, testing::random_channel(rng, 3, 2));
    const PreorderVerdict d = check_ds_bounded(W, V);
    REQUIRE(d.status == VerdictStatus::Holds);
    CHECK(verify(d, W, V));

    // The identity is more capable than any noisy channel, so no chain exists.
    const Channel id = Channel::identity(Alphabet::indexed(3));
    for (int trial = 0; trial < 5; ++trial) {
        const Channel noisy = testing::random_channel(rng, 3, 3);
        CHECK(check_ds_bounded(id, noisy, 2).status == VerdictStatus::Unknown);
    }
}

TEST_CASE("implication chain on random pairs") {
    testing::Rng rng(22);
    for (int trial = 0; trial < 30; ++trial) {
        const Channel V = testing::random_channel(rng, 3, 3, 0.2);
        const Channel W = compose(V, testing::random_channel(rng, 3, 3, 0.2));
        REQUIRE(check_degradation(W, V).status == VerdictStatus::Holds);
        CHECK(check_less_noisy_sampled(V, W, 6).status != VerdictStatus::Falsified);
        CHECK(check_more_capable_sampled(W, V, 10).status != VerdictStatus::Falsified);
        REQUIRE(check_ds_bounded(W, V).status == VerdictStatus::Holds);
    }
    // A JoinMeet image is ds-below and therefore never falsified in mc.
    for (int trial = 0; trial < 30; ++trial) {
        const Channel V = testing::random_channel(rng, 3, 3, 0.2);
        const Channel W = join_meet(V, trial % 3, (trial + 1) % 3);
        REQUIRE(check_ds_bounded(W, V).status == VerdictStatus::Holds);
        CHECK(check_more_capable_sampled(W, V, 10).status != VerdictStatus::Falsified);
    }
}

TEST_CASE("falsification certificates reproduce the violation") {
    testing::Rng rng(23);
    int falsified = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const Channel W = testing::random_channel(rng, 3, 2);
        const Channel V = testing::random_channel(rng, 3, 2);
        for (const auto& v : {check_degradation(W, V), check_less_noisy_sampled(W, V, 5),
                              check_more_capable_sampled(W, V, 5)}) {
            CHECK(verify(v, W, V));
            if (v.status == VerdictStatus::Falsified) ++falsified;
        }
    }
    CHECK(falsified > 0);
}
