#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "roomnet/episode.hpp"
#include "roomnet/frame.hpp"
#include "roomnet/io.hpp"
#include "roomnet/matching.hpp"

namespace roomnet {

// Sparse topological map: rooms as vertices, doorway transitions as edges.
// Each directed edge stores the frames seen around crossings in that travel
// direction; they serve as intermediate visual goals.
struct RoomGraph {
    int room_count = 0;
    std::vector<std::vector<uint8_t>> adjacency;                     // m x m
    std::map<std::pair<int, int>, std::vector<Frame>> transitions;  // directed

    bool adjacent(int a, int b) const { return adjacency[a][b] != 0; }

    const std::vector<Frame>& transition_frames(int from, int to) const {
        const auto it = transitions.find({from, to});
        if (it == transitions.end())
            throw std::out_of_range("no transition frames for edge " + std::to_string(from) +
                                    "->" + std::to_string(to));
        return it->second;
    }
};

struct Plan {
    std::vector<int> hierarchy;           // source first, goal room last
    std::vector<Frame> transition_targets;  // one per edge traversal
    Frame goal_image;
};

inline void validate_graph(const RoomGraph& g) {
    const int m = g.room_count;
    if (m <= 0) throw std::invalid_argument("graph has no rooms");
    if (g.adjacency.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("adjacency size mismatch");
    for (int a = 0; a < m; ++a) {
        if (g.adjacency[a].size() != static_cast<std::size_t>(m))
            throw std::invalid_argument("adjacency row size mismatch");
        if (g.adjacency[a][a] != 0) throw std::invalid_argument("adjacency diagonal not zero");
        for (int b = 0; b < m; ++b) {
            if (g.adjacency[a][b] != g.adjacency[b][a])
                throw std::invalid_argument("adjacency not symmetric");
            if (g.adjacency[a][b]) {
                const auto it = g.transitions.find({a, b});
                if (it == g.transitions.end() || it->second.empty())
                    throw std::invalid_argument("edge " + std::to_string(a) + "->" +
                                                std::to_string(b) + " has no transition frames");
            }
        }
    }
    // connectivity over rooms
    std::vector<char> seen(m, 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        const int a = frontier.front();
        frontier.pop();
        for (int b = 0; b < m; ++b) {
            if (g.adjacency[a][b] && !seen[b]) {
                seen[b] = 1;
                ++reached;
                frontier.push(b);
            }
        }
    }
    if (reached != m) throw std::runtime_error("graph not connected");
}

// Builds the graph from labeled mapping episodes. A room change at time t_c
// (midpoint between the last frame of the old room and the first of the new)
// contributes every frame within transition_window of t_c to the directed
// edge set for that travel direction.
inline RoomGraph build_graph(const std::vector<Episode>& episodes, int room_count,
                             double transition_window = 1.0) {
    RoomGraph g;
    g.room_count = room_count;
    g.adjacency.assign(room_count, std::vector<uint8_t>(room_count, 0));
    std::vector<char> covered(room_count, 0);

    for (const auto& ep : episodes) {
        validate_episode(ep, room_count);
        int prev_room = -1;
        std::size_t prev_index = 0;
        for (std::size_t i = 0; i < ep.records.size(); ++i) {
            const uint8_t label = ep.records[i].label;
            if (label == kTransitLabel) continue;
            covered[label] = 1;
            if (prev_room < 0) {
                prev_room = label;
                prev_index = i;
                continue;
            }
            if (label == prev_room) {
                prev_index = i;
                continue;
            }
            const int next_room = label;
            const double t_change = 0.5 * (ep.records[prev_index].frame.timestamp +
                                           ep.records[i].frame.timestamp);
            auto& frames = g.transitions[{prev_room, next_room}];
            for (const auto& rec : ep.records) {
                if (std::abs(rec.frame.timestamp - t_change) <= transition_window)
                    frames.push_back(rec.frame);
            }
            g.adjacency[prev_room][next_room] = 1;
            g.adjacency[next_room][prev_room] = 1;
            prev_room = next_room;
            prev_index = i;
        }
    }

    for (int r = 0; r < room_count; ++r) {
        if (!covered[r])
            throw std::runtime_error("room " + std::to_string(r) + " has no episode coverage");
    }
    validate_graph(g);
    return g;
}

// Hop-count Dijkstra with deterministic tie-breaking: among equal distances
// the lower room id is settled first, so parents resolve to the lowest-id
// predecessor.
inline std::vector<int> shortest_path(const RoomGraph& g, int source, int goal) {
    const int m = g.room_count;
    if (source < 0 || source >= m) throw std::invalid_argument("source not a graph vertex");
    if (goal < 0 || goal >= m) throw std::invalid_argument("goal not a graph vertex");

    constexpr int kInf = 1 << 29;
    std::vector<int> dist(m, kInf), parent(m, -1);
    using Item = std::pair<int, int>;  // (dist, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0;
    heap.push({0, source});
    while (!heap.empty()) {
        const auto [d, a] = heap.top();
        heap.pop();
        if (d != dist[a]) continue;
        for (int b = 0; b < m; ++b) {
            if (!g.adjacency[a][b]) continue;
            if (d + 1 < dist[b]) {
                dist[b] = d + 1;
                parent[b] = a;
                heap.push({dist[b], b});
            }
        }
    }
    if (dist[goal] == kInf) throw std::runtime_error("goal unreachable");

    std::vector<int> path;
    for (int v = goal; v != -1; v = parent[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

namespace detail {

// Most representative frame of a directed transition set: the one the other
// stored frames match best as a target. Ties break to the lowest index.
inline const Frame& pick_transition_target(const std::vector<Frame>& frames,
                                           const MatchConfig& cfg) {
    if (frames.size() == 1) return frames[0];
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        double total = 0.0;
        for (std::size_t q = 0; q < frames.size(); ++q) {
            if (q == f) continue;
            total += match_frames(frames[q], frames[f], cfg).score;
        }
        if (total > best_score) {
            best_score = total;
            best = f;
        }
    }
    return frames[best];
}

}  // namespace detail

struct PlanConfig {
    double goal_score_threshold = 0.35;  // m_s0 applied to goal recognition
    MatchConfig match;
};

inline Plan make_plan_to_room(const RoomGraph& g, int source, int goal_room,
                              const Frame& goal_image, const PlanConfig& cfg = {}) {
    Plan p;
    p.hierarchy = shortest_path(g, source, goal_room);
    for (std::size_t i = 0; i + 1 < p.hierarchy.size(); ++i) {
        const auto& frames = g.transition_frames(p.hierarchy[i], p.hierarchy[i + 1]);
        p.transition_targets.push_back(detail::pick_transition_target(frames, cfg.match));
    }
    p.goal_image = goal_image;
    return p;
}

// Re-route to the existing goal from a new source room; goal room and goal
// image are preserved.
inline Plan replan_route(const RoomGraph& g, int current_room, const Plan& existing,
                         const PlanConfig& cfg = {}) {
    if (existing.hierarchy.empty()) throw std::invalid_argument("replan without a plan");
    return make_plan_to_room(g, current_room, existing.hierarchy.back(), existing.goal_image,
                             cfg);
}

inline void validate_plan(const Plan& p, const RoomGraph& g) {
    if (p.hierarchy.empty()) throw std::invalid_argument("empty hierarchy");
    for (std::size_t i = 0; i + 1 < p.hierarchy.size(); ++i) {
        if (!g.adjacent(p.hierarchy[i], p.hierarchy[i + 1]))
            throw std::invalid_argument("hierarchy entries not adjacent");
    }
    if (p.transition_targets.size() + 1 != p.hierarchy.size())
        throw std::invalid_argument("transition target count mismatch");
}

inline Bytes serialize_graph(const RoomGraph& g) {
    ByteWriter w;
    w.magic("RNGR");
    w.u32(static_cast<uint32_t>(g.room_count));
    for (int a = 0; a < g.room_count; ++a)
        for (int b = 0; b < g.room_count; ++b) w.u8(g.adjacency[a][b]);
    // directed edge blocks in (from, to) order
    for (int a = 0; a < g.room_count; ++a) {
        for (int b = 0; b < g.room_count; ++b) {
            if (!g.adjacency[a][b]) continue;
            const auto& frames = g.transition_frames(a, b);
            w.u32(static_cast<uint32_t>(a));
            w.u32(static_cast<uint32_t>(b));
            w.u32(static_cast<uint32_t>(frames.size()));
            for (const auto& f : frames) write_frame(w, f);
        }
    }
    return w.take();
}

inline RoomGraph parse_graph(const Bytes& data, std::size_t descriptor_dim = kDescriptorDim) {
    ByteReader r(data);
    r.magic("RNGR");
    RoomGraph g;
    g.room_count = static_cast<int>(r.u32());
    g.adjacency.assign(g.room_count, std::vector<uint8_t>(g.room_count, 0));
    for (int a = 0; a < g.room_count; ++a)
        for (int b = 0; b < g.room_count; ++b) g.adjacency[a][b] = r.u8();
    while (!r.done()) {
        const int from = static_cast<int>(r.u32());
        const int to = static_cast<int>(r.u32());
        const uint32_t count = r.u32();
        auto& frames = g.transitions[{from, to}];
        for (uint32_t i = 0; i < count; ++i) frames.push_back(read_frame(r, descriptor_dim));
    }
    validate_graph(g);
    return g;
}

inline void save_graph(const std::string& path, const RoomGraph& g) {
    save_bytes(path, serialize_graph(g));
}

inline RoomGraph load_graph(const std::string& path,
                            std::size_t descriptor_dim = kDescriptorDim) {
    return parse_graph(load_bytes(path), descriptor_dim);
}

}  // namespace roomnet
