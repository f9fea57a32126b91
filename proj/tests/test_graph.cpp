#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "roomnet/graph.hpp"
#include "roomnet/rng.hpp"

using namespace roomnet;

namespace {

Frame tiny_frame(uint32_t id, double t, std::size_t axis = 0, std::size_t dim = 8) {
    Frame f;
    f.frame_id = id;
    f.timestamp = t;
    Keypoint kp;
    kp.id = 1 + static_cast<uint32_t>(axis);
    kp.position = {0.5f, 0.5f};
    kp.descriptor.assign(dim, 0.0f);
    kp.descriptor[axis % dim] = 1.0f;
    f.keypoints.push_back(kp);
    return f;
}

// Walks the room sequence at 10 Hz, dwelling `dwell` records per room with a
// short transit burst between rooms.
Episode tour_episode(const std::vector<int>& rooms, std::size_t dwell = 12,
                     std::size_t transit_len = 4) {
    Episode ep;
    uint32_t id = 0;
    double t = 0.0;
    for (std::size_t leg = 0; leg < rooms.size(); ++leg) {
        for (std::size_t i = 0; i < dwell; ++i) {
            EpisodeRecord rec;
            rec.frame = tiny_frame(id, t, rooms[leg]);
            rec.label = static_cast<uint8_t>(rooms[leg]);
            ep.records.push_back(rec);
            ++id;
            t += 0.1;
        }
        if (leg + 1 < rooms.size()) {
            for (std::size_t i = 0; i < transit_len; ++i) {
                EpisodeRecord rec;
                rec.frame = tiny_frame(id, t, rooms[leg]);
                rec.label = kTransitLabel;
                ep.records.push_back(rec);
                ++id;
                t += 0.1;
            }
        }
    }
    return ep;
}

RoomGraph adjacency_graph(int rooms, const std::vector<std::pair<int, int>>& edges,
                          bool with_frames = true) {
    RoomGraph g;
    g.room_count = rooms;
    g.adjacency.assign(rooms, std::vector<uint8_t>(rooms, 0));
    uint32_t id = 9000;
    for (const auto& [a, b] : edges) {
        g.adjacency[a][b] = 1;
        g.adjacency[b][a] = 1;
        if (with_frames) {
            g.transitions[{a, b}].push_back(tiny_frame(id++, 0.0));
            g.transitions[{b, a}].push_back(tiny_frame(id++, 0.0));
        }
    }
    return g;
}

// Exhaustive simple-path enumeration; the independent oracle for hop counts.
int min_hops_by_enumeration(const RoomGraph& g, int source, int goal) {
    std::vector<char> visited(g.room_count, 0);
    int best = -1;
    auto dfs = [&](auto&& self, int node, int depth) -> void {
        if (node == goal) {
            if (best < 0 || depth < best) best = depth;
            return;
        }
        visited[node] = 1;
        for (int next = 0; next < g.room_count; ++next) {
            if (g.adjacency[node][next] && !visited[next]) self(self, next, depth + 1);
        }
        visited[node] = 0;
    };
    dfs(dfs, source, 0);
    return best;
}

Bytes frame_bytes(const Frame& f) {
    ByteWriter w;
    write_frame(w, f);
    return w.take();
}

RoomGraph random_connected_graph(SplitMix64& rng, int rooms) {
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < rooms; ++v)
        edges.emplace_back(static_cast<int>(rng.next() % v), v);  // random spanning tree
    const int extra = static_cast<int>(rng.next() % (rooms + 1));
    for (int e = 0; e < extra; ++e) {
        const int a = static_cast<int>(rng.next() % rooms);
        const int b = static_cast<int>(rng.next() % rooms);
        if (a != b) edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    return adjacency_graph(rooms, edges);
}

}  // namespace

TEST(BuildGraph, TwoRoomTourProducesOneEdgeWithBothDirections) {
    const Episode ep = tour_episode({0, 1, 0});
    const RoomGraph g = build_graph({ep}, 2);
    EXPECT_EQ(g.room_count, 2);
    EXPECT_TRUE(g.adjacent(0, 1));
    EXPECT_FALSE(g.transition_frames(0, 1).empty());
    EXPECT_FALSE(g.transition_frames(1, 0).empty());

    // every stored frame sits within the window of some label change
    const Episode& e = ep;
    std::vector<double> change_times;
    int prev = -1;
    std::size_t prev_idx = 0;
    for (std::size_t i = 0; i < e.records.size(); ++i) {
        if (e.records[i].label == kTransitLabel) continue;
        if (prev >= 0 && e.records[i].label != prev)
            change_times.push_back(0.5 * (e.records[prev_idx].frame.timestamp +
                                          e.records[i].frame.timestamp));
        prev = e.records[i].label;
        prev_idx = i;
    }
    for (const auto& [edge, frames] : g.transitions) {
        (void)edge;
        for (const auto& f : frames) {
            bool in_window = false;
            for (double tc : change_times)
                if (std::abs(f.timestamp - tc) <= 1.0) in_window = true;
            EXPECT_TRUE(in_window);
        }
    }
}

TEST(BuildGraph, ChainTourGivesPathAdjacency) {
    const Episode there = tour_episode({0, 1, 2, 3});
    const Episode back = tour_episode({3, 2, 1, 0});
    const RoomGraph g = build_graph({there, back}, 4);

    std::vector<int> degrees;
    for (int r = 0; r < 4; ++r) {
        int d = 0;
        for (int c = 0; c < 4; ++c) d += g.adjacency[r][c];
        degrees.push_back(d);
    }
    EXPECT_EQ(degrees, (std::vector<int>{1, 2, 2, 1}));
    EXPECT_TRUE(g.adjacent(0, 1));
    EXPECT_TRUE(g.adjacent(1, 2));
    EXPECT_TRUE(g.adjacent(2, 3));
    EXPECT_FALSE(g.adjacent(0, 2));
    EXPECT_FALSE(g.adjacent(0, 3));
}

TEST(BuildGraph, UncoveredRoomIsRejected) {
    const Episode ep = tour_episode({0, 1, 0});
    EXPECT_THROW(build_graph({ep}, 3), std::runtime_error);
}

TEST(BuildGraph, DisconnectedGraphIsRejected) {
    // two separate components: rooms {0,1} and {2,3}
    const Episode a = tour_episode({0, 1, 0});
    const Episode b = tour_episode({2, 3, 2});
    EXPECT_THROW(build_graph({a, b}, 4), std::runtime_error);
}

TEST(BuildGraph, RebuildIsByteIdentical) {
    const Episode there = tour_episode({0, 1, 2, 3});
    const Episode back = tour_episode({3, 2, 1, 0});
    const RoomGraph g1 = build_graph({there, back}, 4);
    const RoomGraph g2 = build_graph({there, back}, 4);
    EXPECT_EQ(serialize_graph(g1), serialize_graph(g2));
}

TEST(GraphIo, RoundTripIsBitExact) {
    const RoomGraph g =
        adjacency_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    const Bytes first = serialize_graph(g);
    const RoomGraph loaded = parse_graph(first, 8);
    const Bytes second = serialize_graph(loaded);
    EXPECT_EQ(first, second);
    EXPECT_EQ(loaded.room_count, 4);
    EXPECT_TRUE(loaded.adjacent(0, 3));
}

TEST(ShortestPath, ChainHasUniquePath) {
    const RoomGraph g = adjacency_graph(4, {{0, 1}, {1, 2}, {2, 3}}, false);
    EXPECT_EQ(shortest_path(g, 0, 3), (std::vector<int>{0, 1, 2, 3}));
    EXPECT_EQ(shortest_path(g, 2, 2), (std::vector<int>{2}));
}

TEST(ShortestPath, TieBreaksToLowestRoomId) {
    // diamond: 0-1-3 and 0-2-3 both length 2
    const RoomGraph g = adjacency_graph(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, false);
    EXPECT_EQ(shortest_path(g, 0, 3), (std::vector<int>{0, 1, 3}));
}

TEST(ShortestPath, MatchesEnumerationOracleOnRandomGraphs) {
    SplitMix64 rng(88);
    for (int rep = 0; rep < 60; ++rep) {
        const int rooms = 2 + static_cast<int>(rng.next() % 5);
        const RoomGraph g = random_connected_graph(rng, rooms);
        for (int s = 0; s < rooms; ++s) {
            for (int t = 0; t < rooms; ++t) {
                const auto path = shortest_path(g, s, t);
                EXPECT_EQ(static_cast<int>(path.size()) - 1, min_hops_by_enumeration(g, s, t));
            }
        }
    }
}

TEST(PlanToRoom, ChainPlanHasTargetsPerEdge) {
    const RoomGraph g = adjacency_graph(4, {{0, 1}, {1, 2}, {2, 3}});
    const Frame goal = tiny_frame(12345, 0.0);
    const Plan p = make_plan_to_room(g, 0, 3, goal);
    EXPECT_EQ(p.hierarchy, (std::vector<int>{0, 1, 2, 3}));
    EXPECT_EQ(p.transition_targets.size(), 3u);
    EXPECT_NO_THROW(validate_plan(p, g));
}

TEST(PlanToRoom, SourceEqualsGoalRoom) {
    const RoomGraph g = adjacency_graph(3, {{0, 1}, {1, 2}});
    const Frame goal = tiny_frame(4567, 0.0);
    const Plan p = make_plan_to_room(g, 1, 1, goal);
    EXPECT_EQ(p.hierarchy, (std::vector<int>{1}));
    EXPECT_TRUE(p.transition_targets.empty());
    EXPECT_NO_THROW(validate_plan(p, g));
}

TEST(PlanToRoom, ShortcutEdgeBeatsLongWay) {
    // 5-room cycle with shortcut (0,3)
    const RoomGraph g = adjacency_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 3}});
    const Plan p = make_plan_to_room(g, 0, 4, tiny_frame(1, 0.0));
    EXPECT_EQ(static_cast<int>(p.hierarchy.size()) - 1, min_hops_by_enumeration(g, 0, 4));
    EXPECT_EQ(p.hierarchy, (std::vector<int>{0, 3, 4}));
}

TEST(Replan, SuffixFromRoomOnHierarchy) {
    const RoomGraph g = adjacency_graph(4, {{0, 1}, {1, 2}, {2, 3}});
    const Plan p = make_plan_to_room(g, 0, 3, tiny_frame(1, 0.0));
    const Plan r = replan_route(g, 2, p);
    EXPECT_EQ(r.hierarchy, (std::vector<int>{2, 3}));
    EXPECT_EQ(r.transition_targets.size(), 1u);
}

TEST(Replan, OffHierarchyInCycleMatchesOracle) {
    SplitMix64 rng(99);
    for (int rep = 0; rep < 40; ++rep) {
        const int rooms = 3 + static_cast<int>(rng.next() % 4);
        const RoomGraph g = random_connected_graph(rng, rooms);
        const int goal = static_cast<int>(rng.next() % rooms);
        const int source = static_cast<int>(rng.next() % rooms);
        const Plan p = make_plan_to_room(g, source, goal, tiny_frame(1, 0.0));
        const int off = static_cast<int>(rng.next() % rooms);
        const Plan r = replan_route(g, off, p);
        EXPECT_EQ(static_cast<int>(r.hierarchy.size()) - 1,
                  min_hops_by_enumeration(g, off, goal));
        EXPECT_EQ(r.hierarchy.back(), goal);  // goal room preserved
        EXPECT_EQ(frame_bytes(r.goal_image), frame_bytes(p.goal_image));
        EXPECT_NO_THROW(validate_plan(r, g));
    }
}

TEST(Replan, CurrentRoomEqualsGoal) {
    const RoomGraph g = adjacency_graph(3, {{0, 1}, {1, 2}});
    const Plan p = make_plan_to_room(g, 0, 2, tiny_frame(1, 0.0));
    const Plan r = replan_route(g, 2, p);
    EXPECT_EQ(r.hierarchy, (std::vector<int>{2}));
    EXPECT_TRUE(r.transition_targets.empty());
}

TEST(ShortestPath, InvalidVerticesThrow) {
    const RoomGraph g = adjacency_graph(3, {{0, 1}, {1, 2}}, false);
    EXPECT_THROW(shortest_path(g, -1, 2), std::invalid_argument);
    EXPECT_THROW(shortest_path(g, 0, 5), std::invalid_argument);
}
