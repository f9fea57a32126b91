#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "roomnet/frame.hpp"
#include "roomnet/math.hpp"
#include "roomnet/rng.hpp"

namespace roomnet {

// Seed for the frozen stand-in backbone. Fixed across experiments: it plays
// the role of pretrained weights, not of run randomness.
inline constexpr uint64_t kBackboneSeed = 42;

struct BackboneParams {
    uint64_t seed = kBackboneSeed;
    std::size_t descriptor_dim = kDescriptorDim;
    std::size_t feature_dim = kFeatureDim;
    Mat projection;  // feature_dim x descriptor_dim, frozen
};

inline BackboneParams make_backbone(uint64_t seed = kBackboneSeed,
                                    std::size_t descriptor_dim = kDescriptorDim,
                                    std::size_t feature_dim = kFeatureDim) {
    BackboneParams b;
    b.seed = seed;
    b.descriptor_dim = descriptor_dim;
    b.feature_dim = feature_dim;
    b.projection = Mat(feature_dim, descriptor_dim);
    SplitMix64 rng(seed);
    for (auto& w : b.projection.a) w = rng.uniform(-1.0, 1.0);
    return b;
}

// Mean descriptor -> frozen projection -> tanh -> renormalize.
inline FrameFeature extract_feature(const Frame& frame, const BackboneParams& backbone) {
    if (frame.keypoints.empty()) throw std::invalid_argument("empty frame");

    Vec mean(backbone.descriptor_dim, 0.0);
    for (const auto& kp : frame.keypoints) {
        if (kp.descriptor.size() != backbone.descriptor_dim)
            throw std::invalid_argument("descriptor dimension mismatch");
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += kp.descriptor[i];
    }
    const double inv_count = 1.0 / static_cast<double>(frame.keypoints.size());
    for (auto& m : mean) m *= inv_count;

    Vec y = matvec(backbone.projection, mean);
    for (auto& v : y) v = std::tanh(v);

    const double n = norm2(y);
    if (n < 1e-12) {
        // Degenerate mean descriptor; emit a fixed unit vector.
        y.assign(backbone.feature_dim, 0.0);
        y[0] = 1.0;
    } else {
        for (auto& v : y) v /= n;
    }
    return FrameFeature{std::move(y)};
}

}  // namespace roomnet
