#pragma once

// Reference systems: logic gates over uniform independent binary
// inputs, and the two channel counterexamples.

#include "pidchan/probcore.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pidchan {

struct BuiltinExample {
    std::string name;
    std::string description;
    JointTable table;
};

/// and, sum, copy-target, unq, cex1, cex2-ds.
const std::vector<std::string>& builtin_names();
std::optional<BuiltinExample> builtin_example(const std::string& name);

/// K1 = [[.25,.75],[.35,.65]], K2 = [[.675,.325],[.745,.255]]; p(t) = [.4,.6].
std::pair<Channel, Channel> counterexample1_channels();
Dist counterexample1_target();

/// K3 = [[1,0],[0,1],[.5,.5]], K4 = JoinMeet_(0,1)(K3); p(t) = [.3,.3,.4].
std::pair<Channel, Channel> counterexample2_channels();
Dist counterexample2_target();

}  // namespace pidchan
