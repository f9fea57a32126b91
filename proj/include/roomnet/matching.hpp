#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "roomnet/frame.hpp"

namespace roomnet {

struct MatchConfig {
    double ratio = 0.8;     // Lowe ratio: best/second-best
    double max_dist = 0.6;  // absolute descriptor-distance cap
};

struct MatchResult {
    std::vector<std::pair<uint32_t, uint32_t>> pairs;  // (query id, target id)
    double score = 0.0;                                // matched / query keypoints
};

namespace detail {

inline double descriptor_dist_sq(const Keypoint& a, const Keypoint& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.descriptor.size(); ++i) {
        const double d = static_cast<double>(a.descriptor[i]) - b.descriptor[i];
        acc += d * d;
    }
    return acc;
}

// Index of the nearest row keypoint for each column keypoint, distance ties
// broken by lowest keypoint id.
struct Nearest {
    std::size_t index;
    double dist_sq;
    double second_sq;  // +inf when the other side has a single keypoint
};

}  // namespace detail

// Mutual nearest neighbor with ratio test. Stand-in for learned matching;
// preserves the matched/detected score semantics.
inline MatchResult match_frames(const Frame& query, const Frame& target,
                                const MatchConfig& cfg = {}) {
    if (query.keypoints.empty() || target.keypoints.empty())
        throw std::invalid_argument("empty frame");
    const std::size_t nq = query.keypoints.size();
    const std::size_t nt = target.keypoints.size();
    if (query.keypoints[0].descriptor.size() != target.keypoints[0].descriptor.size())
        throw std::invalid_argument("descriptor dimension mismatch");

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<detail::Nearest> best_t(nq, {0, inf, inf});  // per query
    std::vector<detail::Nearest> best_q(nt, {0, inf, inf});  // per target

    for (std::size_t i = 0; i < nq; ++i) {
        for (std::size_t j = 0; j < nt; ++j) {
            const double d = detail::descriptor_dist_sq(query.keypoints[i], target.keypoints[j]);

            auto& bt = best_t[i];
            if (d < bt.dist_sq ||
                (d == bt.dist_sq && target.keypoints[j].id < target.keypoints[bt.index].id)) {
                bt.second_sq = bt.dist_sq;
                bt.index = j;
                bt.dist_sq = d;
            } else if (d < bt.second_sq) {
                bt.second_sq = d;
            }

            auto& bq = best_q[j];
            if (d < bq.dist_sq ||
                (d == bq.dist_sq && query.keypoints[i].id < query.keypoints[bq.index].id)) {
                bq.second_sq = bq.dist_sq;
                bq.index = i;
                bq.dist_sq = d;
            } else if (d < bq.second_sq) {
                bq.second_sq = d;
            }
        }
    }

    MatchResult result;
    const double cap_sq = cfg.max_dist * cfg.max_dist;
    const double ratio_sq = cfg.ratio * cfg.ratio;
    for (std::size_t i = 0; i < nq; ++i) {
        const auto& bt = best_t[i];
        const std::size_t j = bt.index;
        if (bt.dist_sq == inf || best_q[j].index != i) continue;
        if (bt.dist_sq > cap_sq) continue;
        // Exact duplicates pass; otherwise Lowe ratio against the runner-up.
        const bool ratio_ok = bt.dist_sq == 0.0 || bt.second_sq == inf ||
                              bt.dist_sq < ratio_sq * bt.second_sq;
        if (!ratio_ok) continue;
        result.pairs.emplace_back(query.keypoints[i].id, target.keypoints[j].id);
    }
    result.score = static_cast<double>(result.pairs.size()) / static_cast<double>(nq);
    return result;
}

}  // namespace roomnet
