#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roomnet/command.hpp"
#include "roomnet/episode.hpp"
#include "roomnet/frame.hpp"
#include "roomnet/io.hpp"
#include "roomnet/rng.hpp"

namespace roomnet {

inline double wrap_angle(double a) { return std::atan2(std::sin(a), std::cos(a)); }

struct RoomRect {
    int id = 0;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    bool contains(double x, double y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
    double cx() const { return 0.5 * (x0 + x1); }
    double cy() const { return 0.5 * (y0 + y1); }
};

// Opening between two rooms, centered on their shared wall.
struct Doorway {
    int room_a = 0, room_b = 0;
    double cx = 0, cy = 0;
    bool vertical = true;     // wall runs along x = cx when true, else y = cy
    double half_width = 0.6;  // opening half-extent along the wall
};

struct Landmark {
    uint32_t id = 0;
    int room = 0;
    double x = 0, y = 0;
    std::vector<float> descriptor;  // unit norm
};

struct PerturbationParams {
    double descriptor_fraction = 0.0;  // p
    double position_fraction = 0.0;    // q
    uint64_t seed = 0;
};

struct World {
    std::vector<RoomRect> rooms;
    std::vector<Doorway> doorways;
    std::vector<Landmark> landmarks;
    double fov = M_PI / 2.0;
    double range = 6.0;
    double min_range = 0.5;           // camera blind zone; kills wall-nose views
    double doorway_visibility = 1.5;  // adjacent room visible within this distance of a door
    double frame_noise_sigma = 0.03;
    std::size_t landmarks_per_room = 40;
    uint64_t seed = 0;
    PerturbationParams perturbation;

    int room_count() const { return static_cast<int>(rooms.size()); }

    int room_of(double x, double y) const {
        for (const auto& r : rooms)
            if (r.contains(x, y)) return r.id;
        return -1;
    }

    const RoomRect& room(int id) const {
        for (const auto& r : rooms)
            if (r.id == id) return r;
        throw std::out_of_range("no room " + std::to_string(id));
    }
};

struct RobotPose {
    double x = 0, y = 0, theta = 0;
};

inline void generate_landmarks(World& w) {
    w.landmarks.clear();
    for (const auto& room : w.rooms) {
        SplitMix64 rng(mix_seed(w.seed, static_cast<uint64_t>(room.id)));
        const double margin = 0.3;
        for (std::size_t i = 0; i < w.landmarks_per_room; ++i) {
            Landmark lm;
            lm.id = static_cast<uint32_t>(room.id) * 1000 + static_cast<uint32_t>(i);
            lm.room = room.id;
            lm.x = rng.uniform(room.x0 + margin, room.x1 - margin);
            lm.y = rng.uniform(room.y0 + margin, room.y1 - margin);
            const auto d = rng.unit_vector(kDescriptorDim);
            lm.descriptor.assign(d.begin(), d.end());
            w.landmarks.push_back(std::move(lm));
        }
    }
}

// 2x2 layout of 5 m rooms joined in a cycle; every room has two doorways.
inline World make_default_world(uint64_t seed) {
    World w;
    w.seed = seed;
    w.rooms = {
        {0, 0.0, 0.0, 5.0, 5.0},
        {1, 5.0, 0.0, 10.0, 5.0},
        {2, 0.0, 5.0, 5.0, 10.0},
        {3, 5.0, 5.0, 10.0, 10.0},
    };
    w.doorways = {
        {0, 1, 5.0, 2.5, true, 0.6},
        {2, 3, 5.0, 7.5, true, 0.6},
        {0, 2, 2.5, 5.0, false, 0.6},
        {1, 3, 7.5, 5.0, false, 0.6},
    };
    generate_landmarks(w);
    return w;
}

inline uint64_t world_hash(const World& w) {
    ByteWriter b;
    b.u32(static_cast<uint32_t>(w.rooms.size()));
    for (const auto& r : w.rooms) {
        b.u32(static_cast<uint32_t>(r.id));
        b.f64(r.x0);
        b.f64(r.y0);
        b.f64(r.x1);
        b.f64(r.y1);
    }
    b.u32(static_cast<uint32_t>(w.doorways.size()));
    for (const auto& d : w.doorways) {
        b.u32(static_cast<uint32_t>(d.room_a));
        b.u32(static_cast<uint32_t>(d.room_b));
        b.f64(d.cx);
        b.f64(d.cy);
        b.u8(d.vertical ? 1 : 0);
        b.f64(d.half_width);
    }
    b.u32(static_cast<uint32_t>(w.landmarks.size()));
    for (const auto& lm : w.landmarks) {
        b.u32(lm.id);
        b.u32(static_cast<uint32_t>(lm.room));
        b.f64(lm.x);
        b.f64(lm.y);
        for (float v : lm.descriptor) b.f32(v);
    }
    b.f64(w.fov);
    b.f64(w.range);
    b.f64(w.min_range);
    b.f64(w.doorway_visibility);
    b.f64(w.frame_noise_sigma);
    b.u64(w.seed);
    return fnv1a64(b.data());
}

// Hash of the doorway graph alone; perturbation must leave it unchanged.
inline uint64_t doorway_graph_hash(const World& w) {
    ByteWriter b;
    b.u32(static_cast<uint32_t>(w.rooms.size()));
    for (const auto& d : w.doorways) {
        b.u32(static_cast<uint32_t>(std::min(d.room_a, d.room_b)));
        b.u32(static_cast<uint32_t>(std::max(d.room_a, d.room_b)));
    }
    return fnv1a64(b.data());
}

inline void validate_world(const World& w) {
    if (w.rooms.empty()) throw std::invalid_argument("world has no rooms");
    for (std::size_t i = 0; i < w.rooms.size(); ++i) {
        for (std::size_t j = i + 1; j < w.rooms.size(); ++j) {
            const auto& a = w.rooms[i];
            const auto& b = w.rooms[j];
            const bool overlap = a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
            if (overlap) throw std::invalid_argument("rooms overlap");
        }
    }
    const auto& p = w.perturbation;
    if (p.descriptor_fraction < 0 || p.descriptor_fraction > 1 || p.position_fraction < 0 ||
        p.position_fraction > 1)
        throw std::invalid_argument("perturbation fractions outside [0,1]");
    // doorway graph connectivity
    const int m = w.room_count();
    std::vector<std::vector<char>> adj(m, std::vector<char>(m, 0));
    for (const auto& d : w.doorways) {
        adj[d.room_a][d.room_b] = 1;
        adj[d.room_b][d.room_a] = 1;
    }
    std::vector<char> seen(m, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const int a = stack.back();
        stack.pop_back();
        for (int b = 0; b < m; ++b) {
            if (adj[a][b] && !seen[b]) {
                seen[b] = 1;
                ++reached;
                stack.push_back(b);
            }
        }
    }
    if (reached != m) throw std::invalid_argument("doorway graph not connected");
}

// Per-frame sensor model. Landmarks of the current room are candidates, plus
// those of the adjacent room when standing near a doorway. Candidates within
// [min_range, range] and the field of view project into the image; their
// descriptors get fresh seeded noise. Re-rendering the same (world, pose,
// counter) is bit-identical.
inline Frame render_frame(const World& w, const RobotPose& pose, uint32_t frame_counter,
                          double timestamp, uint64_t stream_salt = 0) {
    const int room = w.room_of(pose.x, pose.y);
    if (room < 0) throw std::invalid_argument("pose outside every room");

    std::vector<char> visible_rooms(w.rooms.size(), 0);
    visible_rooms[room] = 1;
    for (const auto& d : w.doorways) {
        if (d.room_a != room && d.room_b != room) continue;
        const double dx = pose.x - d.cx, dy = pose.y - d.cy;
        if (std::sqrt(dx * dx + dy * dy) <= w.doorway_visibility)
            visible_rooms[d.room_a == room ? d.room_b : d.room_a] = 1;
    }

    Frame f;
    f.frame_id = frame_counter;
    f.timestamp = timestamp;
    for (const auto& lm : w.landmarks) {
        if (!visible_rooms[lm.room]) continue;
        const double dx = lm.x - pose.x, dy = lm.y - pose.y;
        const double dist = std::sqrt(dx * dx + dy * dy);
        if (dist < w.min_range || dist > w.range) continue;
        const double bearing = wrap_angle(std::atan2(dy, dx) - pose.theta);
        if (std::abs(bearing) > w.fov / 2.0) continue;

        Keypoint kp;
        kp.id = lm.id;
        kp.position[0] = static_cast<float>(0.5 - bearing / w.fov);
        kp.position[1] = static_cast<float>(std::min(dist / w.range, 1.0));

        SplitMix64 noise(mix_seed(mix_seed(mix_seed(w.seed, stream_salt), frame_counter), lm.id));
        Vec d(kDescriptorDim);
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < kDescriptorDim; ++i) {
            d[i] = static_cast<double>(lm.descriptor[i]) + w.frame_noise_sigma * noise.gaussian();
            norm_sq += d[i] * d[i];
        }
        const double inv = 1.0 / std::sqrt(norm_sq);
        kp.descriptor.resize(kDescriptorDim);
        for (std::size_t i = 0; i < kDescriptorDim; ++i)
            kp.descriptor[i] = static_cast<float>(d[i] * inv);
        f.keypoints.push_back(std::move(kp));
    }

    if (f.keypoints.empty()) {
        // featureless wall: reserved null descriptor so matching degrades to ~0
        Keypoint kp;
        kp.id = kNullKeypointId;
        kp.position = {0.5f, 0.5f};
        kp.descriptor.assign(kDescriptorDim, 0.0f);
        kp.descriptor[kDescriptorDim - 1] = 1.0f;
        f.keypoints.push_back(std::move(kp));
    }
    return f;
}

namespace detail {

// Returns the doorway pierced by the segment, if its wall crossing lies
// inside the opening (with a small margin off the jambs).
inline bool crossing_allowed(const World& w, double x0, double y0, double x1, double y1,
                             int room_from, int room_to) {
    constexpr double kJambMargin = 0.1;
    for (const auto& d : w.doorways) {
        const bool joins = (d.room_a == room_from && d.room_b == room_to) ||
                           (d.room_b == room_from && d.room_a == room_to);
        if (!joins) continue;
        if (d.vertical) {
            if ((x0 - d.cx) * (x1 - d.cx) > 0.0) continue;  // no wall crossing
            const double s = std::abs(x1 - x0) < 1e-12 ? 0.0 : (d.cx - x0) / (x1 - x0);
            const double y_cross = y0 + s * (y1 - y0);
            if (std::abs(y_cross - d.cy) <= d.half_width - kJambMargin) return true;
        } else {
            if ((y0 - d.cy) * (y1 - d.cy) > 0.0) continue;
            const double s = std::abs(y1 - y0) < 1e-12 ? 0.0 : (d.cy - y0) / (y1 - y0);
            const double x_cross = x0 + s * (x1 - x0);
            if (std::abs(x_cross - d.cx) <= d.half_width - kJambMargin) return true;
        }
    }
    return false;
}

}  // namespace detail

// Unicycle kinematics; walls block translation except through doorways.
// Heading always updates.
inline RobotPose step_robot(const World& w, const RobotPose& pose, const Command& cmd,
                            double dt) {
    RobotPose next = pose;
    next.theta = wrap_angle(pose.theta + cmd.angular * dt);
    const double nx = pose.x + cmd.linear * std::cos(pose.theta) * dt;
    const double ny = pose.y + cmd.linear * std::sin(pose.theta) * dt;

    const int from = w.room_of(pose.x, pose.y);
    const int to = w.room_of(nx, ny);
    if (to >= 0 &&
        (to == from || detail::crossing_allowed(w, pose.x, pose.y, nx, ny, from, to))) {
        next.x = nx;
        next.y = ny;
    }
    return next;
}

// Applies scene change after mapping: per room, a fraction p of landmark
// descriptors are resampled and a fraction q of positions displaced. Rooms
// and doorways stay fixed.
inline World perturb_world(const World& w, double p, double q, uint64_t seed) {
    if (p < 0 || p > 1 || q < 0 || q > 1)
        throw std::invalid_argument("perturbation fractions outside [0,1]");
    World out = w;
    out.perturbation = {p, q, seed};
    for (const auto& room : w.rooms) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < out.landmarks.size(); ++i)
            if (out.landmarks[i].room == room.id) members.push_back(i);

        SplitMix64 rng(mix_seed(seed, static_cast<uint64_t>(room.id)));
        const auto count = [&](double frac) {
            return static_cast<std::size_t>(std::llround(frac * static_cast<double>(members.size())));
        };

        const std::size_t n_desc = count(p);
        if (n_desc > 0) {
            const auto order = rng.permutation(members.size());
            for (std::size_t k = 0; k < n_desc; ++k) {
                const auto d = rng.unit_vector(kDescriptorDim);
                out.landmarks[members[order[k]]].descriptor.assign(d.begin(), d.end());
            }
        }
        const std::size_t n_pos = count(q);
        if (n_pos > 0) {
            const auto order = rng.permutation(members.size());
            const double margin = 0.3;
            for (std::size_t k = 0; k < n_pos; ++k) {
                auto& lm = out.landmarks[members[order[k]]];
                lm.x = rng.uniform(room.x0 + margin, room.x1 - margin);
                lm.y = rng.uniform(room.y0 + margin, room.y1 - margin);
            }
        }
    }
    return out;
}

}  // namespace roomnet
