#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "roomnet/graph.hpp"
#include "roomnet/model.hpp"

namespace roomnet {

// Mean of the top-3 matching scores between the goal image and every stored
// transition frame. Gates planning: a goal that matches nothing the robot
// ever saw cannot be recognized.
inline double goal_recognition_score(const RoomGraph& g, const Frame& goal_image,
                                     const MatchConfig& cfg) {
    std::vector<double> scores;
    for (const auto& [edge, frames] : g.transitions) {
        (void)edge;
        for (const auto& f : frames) scores.push_back(match_frames(goal_image, f, cfg).score);
    }
    if (scores.empty()) return 0.0;
    std::sort(scores.begin(), scores.end(), std::greater<>());
    const std::size_t k = std::min<std::size_t>(3, scores.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += scores[i];
    return sum / static_cast<double>(k);
}

// The classifier associates the goal image with a room id; queues warm up
// from the single goal feature exactly as early online inference does.
inline int classify_goal_room(const RoomGraph& g, const Frame& goal_image,
                              const RoomNetModel& model, std::size_t short_len = 8,
                              std::size_t long_len = 6) {
    const FrameFeature feat = extract_feature(goal_image, model.backbone);
    MemoryQueues q;
    q.short_len = short_len;
    q.long_len = long_len;
    q.current = feat.v;
    const Inference inf = infer(model, q);
    int best = 0;
    for (int r = 1; r < g.room_count; ++r)
        if (inf.probs[r] > inf.probs[best]) best = r;
    return best;
}

inline int resolve_goal_room(const RoomGraph& g, const Frame& goal_image,
                             const RoomNetModel& model, const PlanConfig& cfg = {}) {
    if (goal_recognition_score(g, goal_image, cfg.match) < cfg.goal_score_threshold)
        throw std::runtime_error("goal not recognized");
    return classify_goal_room(g, goal_image, model);
}

inline Plan plan_route(const RoomGraph& g, int source, const Frame& goal_image,
                       const RoomNetModel& model, const PlanConfig& cfg = {}) {
    const int goal_room = resolve_goal_room(g, goal_image, model, cfg);
    return make_plan_to_room(g, source, goal_room, goal_image, cfg);
}

}  // namespace roomnet
