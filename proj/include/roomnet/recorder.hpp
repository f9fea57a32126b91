#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "roomnet/episode.hpp"
#include "roomnet/rng.hpp"
#include "roomnet/sim.hpp"

namespace roomnet {

struct ScriptStep {
    enum class Kind { Goto, TurnTo, Rotate, Pause };
    Kind kind = Kind::Pause;
    double x = 0, y = 0;  // Goto target
    double value = 0;     // TurnTo heading, Rotate sweep, Pause seconds
    double speed = 0;     // Goto override; 0 means the recorder default

    static ScriptStep go_to(double x, double y, double speed = 0) {
        return {Kind::Goto, x, y, 0, speed};
    }
    static ScriptStep turn_to(double heading) { return {Kind::TurnTo, 0, 0, heading, 0}; }
    static ScriptStep rotate(double sweep) { return {Kind::Rotate, 0, 0, sweep, 0}; }
    static ScriptStep pause(double seconds) { return {Kind::Pause, 0, 0, seconds, 0}; }
};

struct RecorderConfig {
    double rate = 10.0;  // Hz
    double lin_speed = 0.5;
    double door_speed = 1.0;  // doorway legs run faster so the transit window spans depth
    double rot_speed = 0.6;
    double turn_gain = 3.0;
    double waypoint_tolerance = 0.25;
    double heading_tolerance = 0.05;
    double transit_window = 1.0;  // w_t seconds around each crossing
    std::size_t max_steps = 60000;
};

// Follows the script with a proportional heading controller, sampling a frame
// per tick. Labels come from ground-truth room occupancy; records within w_t
// of a room change are relabeled transit.
inline Episode record_episode(const World& w, const RobotPose& start,
                              const std::vector<ScriptStep>& script, const RecorderConfig& cfg,
                              uint64_t episode_seed) {
    if (w.room_of(start.x, start.y) < 0)
        throw std::invalid_argument("episode start pose outside every room");

    const double dt = 1.0 / cfg.rate;
    Episode ep;
    ep.seed = episode_seed;
    ep.world_hash = world_hash(w);

    RobotPose pose = start;
    std::size_t cursor = 0;
    double step_budget = 0;  // remaining sweep or pause time for the active step
    bool step_initialized = false;
    std::size_t stuck_ticks = 0;

    std::vector<int> rooms;
    for (std::size_t tick = 0;; ++tick) {
        if (tick >= cfg.max_steps) throw std::runtime_error("script did not terminate");
        const double t = static_cast<double>(tick) * dt;

        EpisodeRecord rec;
        rec.frame = render_frame(w, pose, static_cast<uint32_t>(tick), t, episode_seed);
        rec.pose = {static_cast<float>(pose.x), static_cast<float>(pose.y),
                    static_cast<float>(pose.theta)};
        rooms.push_back(w.room_of(pose.x, pose.y));
        ep.records.push_back(std::move(rec));

        // advance past any steps that are already satisfied
        Command cmd;
        bool have_cmd = false;
        while (cursor < script.size() && !have_cmd) {
            const ScriptStep& step = script[cursor];
            switch (step.kind) {
                case ScriptStep::Kind::Goto: {
                    const double dx = step.x - pose.x, dy = step.y - pose.y;
                    const double dist = std::sqrt(dx * dx + dy * dy);
                    if (dist < cfg.waypoint_tolerance) {
                        ++cursor;
                        break;
                    }
                    const double err = wrap_angle(std::atan2(dy, dx) - pose.theta);
                    cmd.angular = std::clamp(cfg.turn_gain * err, -cfg.rot_speed, cfg.rot_speed);
                    cmd.linear = std::abs(err) < 0.5
                                     ? (step.speed > 0 ? step.speed : cfg.lin_speed)
                                     : 0.0;
                    have_cmd = true;
                    break;
                }
                case ScriptStep::Kind::TurnTo: {
                    const double err = wrap_angle(step.value - pose.theta);
                    if (std::abs(err) < cfg.heading_tolerance) {
                        ++cursor;
                        break;
                    }
                    cmd.angular = std::clamp(cfg.turn_gain * err, -cfg.rot_speed, cfg.rot_speed);
                    have_cmd = true;
                    break;
                }
                case ScriptStep::Kind::Rotate: {
                    if (!step_initialized) {
                        step_budget = std::abs(step.value);
                        step_initialized = true;
                    }
                    if (step_budget <= 0) {
                        ++cursor;
                        step_initialized = false;
                        break;
                    }
                    cmd.angular = step.value >= 0 ? cfg.rot_speed : -cfg.rot_speed;
                    step_budget -= cfg.rot_speed * dt;
                    have_cmd = true;
                    break;
                }
                case ScriptStep::Kind::Pause: {
                    if (!step_initialized) {
                        step_budget = step.value;
                        step_initialized = true;
                    }
                    if (step_budget <= 0) {
                        ++cursor;
                        step_initialized = false;
                        break;
                    }
                    step_budget -= dt;
                    have_cmd = true;
                    break;
                }
            }
        }
        if (!have_cmd) break;  // script exhausted

        const RobotPose next = step_robot(w, pose, cmd, dt);
        if (cmd.linear != 0.0 && next.x == pose.x && next.y == pose.y) {
            if (++stuck_ticks > 10 * static_cast<std::size_t>(cfg.rate))
                throw std::runtime_error("script stuck against a wall");
        } else {
            stuck_ticks = 0;
        }
        pose = next;
    }

    // room changes -> transit labels within the window
    std::vector<double> change_times;
    for (std::size_t i = 1; i < rooms.size(); ++i) {
        if (rooms[i] != rooms[i - 1])
            change_times.push_back(0.5 * (ep.records[i].frame.timestamp +
                                          ep.records[i - 1].frame.timestamp));
    }
    for (std::size_t i = 0; i < ep.records.size(); ++i) {
        auto& rec = ep.records[i];
        rec.label = static_cast<uint8_t>(rooms[i]);
        for (double tc : change_times) {
            if (std::abs(rec.frame.timestamp - tc) <= cfg.transit_window) {
                rec.label = kTransitLabel;
                break;
            }
        }
    }
    return ep;
}

namespace detail {

inline const Doorway* find_doorway(const World& w, int a, int b) {
    for (const auto& d : w.doorways) {
        if ((d.room_a == a && d.room_b == b) || (d.room_a == b && d.room_b == a)) return &d;
    }
    return nullptr;
}

// Point offset from the doorway center into the given room, along the wall
// normal.
inline std::pair<double, double> door_offset_point(const World& w, const Doorway& d, int room,
                                                   double dist) {
    const RoomRect& r = w.room(room);
    double nx = 0, ny = 0;
    if (d.vertical)
        nx = r.cx() > d.cx ? 1.0 : -1.0;
    else
        ny = r.cy() > d.cy ? 1.0 : -1.0;
    return {d.cx + nx * dist, d.cy + ny * dist};
}

}  // namespace detail

// Mapping tour: an initial in-place rotation, then a greedy walk that crosses
// every doorway in both directions, visiting room centers along the way.
// The variant seed jitters waypoints so episodes differ.
inline std::vector<ScriptStep> make_mapping_script(const World& w, int start_room,
                                                   uint64_t variant_seed,
                                                   const RecorderConfig& cfg = {}) {
    SplitMix64 rng(variant_seed);
    const int m = w.room_count();
    std::vector<std::vector<int>> neighbors(m);
    for (const auto& d : w.doorways) {
        neighbors[d.room_a].push_back(d.room_b);
        neighbors[d.room_b].push_back(d.room_a);
    }

    std::set<std::pair<int, int>> uncovered;
    for (const auto& d : w.doorways) {
        uncovered.insert({d.room_a, d.room_b});
        uncovered.insert({d.room_b, d.room_a});
    }

    std::vector<ScriptStep> script;
    auto center_jitter = [&](int room) {
        const RoomRect& r = w.room(room);
        return ScriptStep::go_to(r.cx() + rng.uniform(-0.6, 0.6),
                                 r.cy() + rng.uniform(-0.6, 0.6));
    };
    script.push_back(ScriptStep::rotate(2.0 * M_PI + rng.uniform(0.0, 0.6)));

    int current = start_room;
    auto add_crossing = [&](int from, int to) {
        const Doorway* d = detail::find_doorway(w, from, to);
        if (!d) throw std::logic_error("no doorway between adjacent rooms");
        const double approach = 1.6 + rng.uniform(0.0, 0.4);
        const auto [ax, ay] = detail::door_offset_point(w, *d, from, approach);
        const auto [ex, ey] = detail::door_offset_point(w, *d, to, approach);
        script.push_back(ScriptStep::go_to(ax, ay));
        script.push_back(ScriptStep::turn_to(std::atan2(d->cy - ay, d->cx - ax)));
        script.push_back(ScriptStep::go_to(ex, ey, cfg.door_speed));
        script.push_back(center_jitter(to));
        uncovered.erase({from, to});
        current = to;
    };

    while (!uncovered.empty()) {
        // an uncovered crossing straight from here?
        bool advanced = false;
        for (int next : neighbors[current]) {
            if (uncovered.count({current, next})) {
                add_crossing(current, next);
                advanced = true;
                break;
            }
        }
        if (advanced) continue;

        // walk one hop toward the nearest room with an uncovered outgoing edge
        std::vector<int> parent(m, -2);
        std::queue<int> frontier;
        frontier.push(current);
        parent[current] = -1;
        int found = -1;
        while (!frontier.empty() && found < 0) {
            const int a = frontier.front();
            frontier.pop();
            for (int b : neighbors[a]) {
                if (parent[b] != -2) continue;
                parent[b] = a;
                if (std::any_of(uncovered.begin(), uncovered.end(),
                                [&](const auto& e) { return e.first == b; })) {
                    found = b;
                    break;
                }
                frontier.push(b);
            }
        }
        if (found < 0) throw std::logic_error("uncovered doorway unreachable");
        int hop = found;
        while (parent[hop] != current) hop = parent[hop];
        add_crossing(current, hop);
    }
    return script;
}

}  // namespace roomnet
