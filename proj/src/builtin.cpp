#include "pidchan/builtin.hpp"

#include "pidchan/channels.hpp"

#include <functional>

namespace pidchan {

namespace {

/// Uniform independent binary inputs with target f(y1, y2) over `labels`.
JointTable gate(std::vector<std::string> labels, const std::function<std::size_t(int, int)>& f) {
    const std::size_t nt = labels.size();
    std::vector<double> probs(nt * 4, 0.0);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) probs[(f(a, b) * 2 + a) * 2 + b] = 0.25;
    }
    return JointTable({Alphabet(std::move(labels)), Alphabet::indexed(2), Alphabet::indexed(2)}, std::move(probs));
}

}  // namespace

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"and", "sum", "copy-target", "unq", "cex1", "cex2-ds"};
    return names;
}

std::pair<Channel, Channel> counterexample1_channels() {
    return {Channel::from_rows({{0.25, 0.75}, {0.35, 0.65}}), Channel::from_rows({{0.675, 0.325}, {0.745, 0.255}})};
}

Dist counterexample1_target() { return Dist(std::vector<double>{0.4, 0.6}); }

std::pair<Channel, Channel> counterexample2_channels() {
    Channel k3 = Channel::from_rows({{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}});
    Channel k4 = join_meet(k3, 0, 1);
    return {std::move(k3), std::move(k4)};
}

Dist counterexample2_target() { return Dist(std::vector<double>{0.3, 0.3, 0.4}); }

std::optional<BuiltinExample> builtin_example(const std::string& name) {
    if (name == "and") {
        return BuiltinExample{name, "T = Y1 AND Y2", gate({"0", "1"}, [](int a, int b) { return std::size_t(a & b); })};
    }
    if (name == "sum") {
        return BuiltinExample{name, "T = Y1 + Y2",
                              gate({"0", "1", "2"}, [](int a, int b) { return std::size_t(a + b); })};
    }
    if (name == "copy-target") {
        return BuiltinExample{name, "T = (Y1, Y2)",
                              gate({"0,0", "0,1", "1,0", "1,1"}, [](int a, int b) { return std::size_t(2 * a + b); })};
    }
    if (name == "unq") {
        return BuiltinExample{name, "T = Y1", gate({"0", "1"}, [](int a, int) { return std::size_t(a); })};
    }
    if (name == "cex1") {
        auto [k1, k2] = counterexample1_channels();
        const Channel ks[] = {k1, k2};
        return BuiltinExample{name, "counterexample 1: K2 is not a degradation of K1",
                              conditionally_independent_joint(counterexample1_target(), ks)};
    }
    if (name == "cex2-ds") {
        auto [k3, k4] = counterexample2_channels();
        const Channel ks[] = {k3, k4};
        return BuiltinExample{name, "counterexample 2: K4 = JoinMeet(K3), incomparable in less noisy",
                              conditionally_independent_joint(counterexample2_target(), ks)};
    }
    return std::nullopt;
}

}  // namespace pidchan
