#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "roomnet/io.hpp"
#include "roomnet/math.hpp"

namespace roomnet {

inline constexpr std::size_t kDescriptorDim = 64;
inline constexpr std::size_t kFeatureDim = 32;

// Keypoint id reserved for the featureless-wall placeholder.
inline constexpr uint32_t kNullKeypointId = 0xFFFFFFFFu;

struct Keypoint {
    uint32_t id = 0;
    std::array<float, 2> position{0.0f, 0.0f};  // image plane, each in [0,1]
    std::vector<float> descriptor;              // unit Euclidean norm
};

struct Frame {
    uint32_t frame_id = 0;
    double timestamp = 0.0;
    std::vector<Keypoint> keypoints;
};

// Backbone output for one frame, unit norm.
struct FrameFeature {
    Vec v;
};

inline double descriptor_norm(const Keypoint& kp) {
    double acc = 0.0;
    for (float x : kp.descriptor) acc += static_cast<double>(x) * x;
    return std::sqrt(acc);
}

inline void validate_keypoint(const Keypoint& kp) {
    if (std::abs(descriptor_norm(kp) - 1.0) > 1e-6)
        throw std::invalid_argument("keypoint descriptor is not unit norm");
    for (float p : kp.position) {
        if (!(p >= 0.0f && p <= 1.0f))
            throw std::invalid_argument("keypoint position outside [0,1]");
    }
}

inline void validate_frame(const Frame& f) {
    std::unordered_set<uint32_t> seen;
    for (const auto& kp : f.keypoints) {
        validate_keypoint(kp);
        if (!seen.insert(kp.id).second)
            throw std::invalid_argument("duplicate keypoint id in frame");
    }
}

inline void write_frame(ByteWriter& w, const Frame& f) {
    w.magic("RNFR");
    w.u32(f.frame_id);
    w.f64(f.timestamp);
    w.u32(static_cast<uint32_t>(f.keypoints.size()));
    for (const auto& kp : f.keypoints) {
        w.u32(kp.id);
        w.f32(kp.position[0]);
        w.f32(kp.position[1]);
        for (float d : kp.descriptor) w.f32(d);
    }
}

inline Frame read_frame(ByteReader& r, std::size_t descriptor_dim = kDescriptorDim) {
    r.magic("RNFR");
    Frame f;
    f.frame_id = r.u32();
    f.timestamp = r.f64();
    const uint32_t count = r.u32();
    f.keypoints.resize(count);
    for (auto& kp : f.keypoints) {
        kp.id = r.u32();
        kp.position[0] = r.f32();
        kp.position[1] = r.f32();
        kp.descriptor.resize(descriptor_dim);
        for (auto& d : kp.descriptor) d = r.f32();
    }
    return f;
}

}  // namespace roomnet
