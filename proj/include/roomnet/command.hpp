#pragma once

#include <algorithm>

namespace roomnet {

// Actuation interface between the policy and the robot base.
struct Command {
    double linear = 0.0;   // m/s
    double angular = 0.0;  // rad/s
};

inline Command clamp_command(const Command& c, double lin_max, double rot_max) {
    return {std::clamp(c.linear, -lin_max, lin_max), std::clamp(c.angular, -rot_max, rot_max)};
}

}  // namespace roomnet
