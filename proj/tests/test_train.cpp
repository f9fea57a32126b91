#include <gtest/gtest.h>

#include <cmath>

#include "roomnet/train.hpp"

using namespace roomnet;

namespace {

// Synthetic labeled episodes: each room draws keypoints from its own pool of
// base descriptors, transit frames mix two rooms' pools.
struct SyntheticWorld {
    std::size_t desc_dim;
    std::vector<std::vector<std::vector<float>>> room_pools;  // room -> descriptors

    SyntheticWorld(SplitMix64& rng, int rooms, std::size_t dim, std::size_t pool = 12)
        : desc_dim(dim) {
        for (int r = 0; r < rooms; ++r) {
            std::vector<std::vector<float>> descs;
            for (std::size_t i = 0; i < pool; ++i) {
                auto v = rng.unit_vector(dim);
                descs.emplace_back(v.begin(), v.end());
            }
            room_pools.push_back(std::move(descs));
        }
    }

    // Draws without replacement so frames from one room form a tight cluster.
    Frame make_frame(SplitMix64& rng, int room_a, int room_b, uint32_t frame_id,
                     double t) const {
        Frame f;
        f.frame_id = frame_id;
        f.timestamp = t;
        const std::size_t per_room = room_b >= 0 ? 5 : 9;
        uint32_t id = 0;
        for (const int room : {room_a, room_b}) {
            if (room < 0) continue;
            const auto& pool = room_pools[room];
            const auto order = rng.permutation(pool.size());
            for (std::size_t k = 0; k < per_room; ++k) {
                Keypoint kp;
                kp.id = id++;
                kp.position = {0.5f, 0.5f};
                kp.descriptor = pool[order[k]];
                f.keypoints.push_back(kp);
            }
        }
        return f;
    }
};

Episode make_episode(SplitMix64& rng, const SyntheticWorld& world,
                     const std::vector<int>& room_tour, std::size_t frames_per_room) {
    Episode ep;
    uint32_t id = 0;
    double t = 0.0;
    for (std::size_t leg = 0; leg < room_tour.size(); ++leg) {
        const int room = room_tour[leg];
        for (std::size_t i = 0; i < frames_per_room; ++i) {
            EpisodeRecord rec;
            rec.frame = world.make_frame(rng, room, -1, id++, t);
            rec.label = static_cast<uint8_t>(room);
            ep.records.push_back(std::move(rec));
            t += 0.1;
        }
        if (leg + 1 < room_tour.size()) {
            for (int i = 0; i < 4; ++i) {  // doorway crossing
                EpisodeRecord rec;
                rec.frame = world.make_frame(rng, room, room_tour[leg + 1], id++, t);
                rec.label = kTransitLabel;
                ep.records.push_back(std::move(rec));
                t += 0.1;
            }
        }
    }
    return ep;
}

QueueConfig small_queues() {
    QueueConfig q;
    q.short_len = 4;
    q.short_period = 0.2;
    q.long_len = 3;
    q.long_period = 1.0;
    return q;
}

}  // namespace

// Full-model analytic gradients against central finite differences on a tiny
// instance: hidden = attn = 4, two rooms plus transit, sequences of length 3.
TEST(TrainGradients, FullModelMatchesFiniteDifferences) {
    SplitMix64 rng(314);
    const std::size_t feat = 4;
    const BackboneParams backbone = make_backbone(42, 8, feat);
    RoomNetModel m = init_model(99, 3, backbone, 4, 4);

    std::vector<MemoryQueues> queue_sets;
    for (int s = 0; s < 3; ++s) {
        MemoryQueues q;
        q.short_len = 3;
        q.long_len = 3;
        for (int i = 0; i < 3; ++i) q.q_short.push_back(rng.unit_vector(feat));
        for (int i = 0; i < 3; ++i) q.q_long.push_back(rng.unit_vector(feat));
        q.current = rng.unit_vector(feat);
        queue_sets.push_back(std::move(q));
    }
    const std::size_t targets[3] = {0, 1, 2};

    auto total_loss = [&](const RoomNetModel& model) {
        double acc = 0.0;
        for (int s = 0; s < 3; ++s)
            acc += loss_and_grads(model, queue_sets[s], targets[s], nullptr);
        return acc;
    };

    ModelGrads grads = make_grads(m);
    for (int s = 0; s < 3; ++s) loss_and_grads(m, queue_sets[s], targets[s], &grads);

    std::vector<Vec*> params, gvecs;
    for_each_param(m, [&](Vec& v) { params.push_back(&v); });
    for_each_grad(grads, [&](Vec& v) { gvecs.push_back(&v); });
    ASSERT_EQ(params.size(), gvecs.size());

    const double eps = 1e-4;
    double worst = 0.0;
    for (std::size_t t = 0; t < params.size(); ++t) {
        ASSERT_EQ(params[t]->size(), gvecs[t]->size());
        for (std::size_t k = 0; k < params[t]->size(); ++k) {
            double& theta = (*params[t])[k];
            const double orig = theta;
            theta = orig + eps;
            const double lp = total_loss(m);
            theta = orig - eps;
            const double lm = total_loss(m);
            theta = orig;
            const double fd = (lp - lm) / (2.0 * eps);
            const double got = (*gvecs[t])[k];
            const double rel = std::abs(got - fd) / std::max({std::abs(got), std::abs(fd), 1e-4});
            worst = std::max(worst, rel);
        }
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(Train, LossDropsOnSyntheticEpisodes) {
    SplitMix64 rng(500);
    const SyntheticWorld world(rng, 3, 16);
    const BackboneParams backbone = make_backbone(42, 16, 8);

    std::vector<Episode> episodes;
    for (int e = 0; e < 20; ++e)
        episodes.push_back(make_episode(rng, world, {e % 3, (e + 1) % 3, (e + 2) % 3}, 20));

    RoomNetModel m = init_model(1234, 4, backbone, 8, 8);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.learning_rate = 0.05;
    cfg.seed = 1234;
    cfg.sample_stride = 2;
    cfg.queues = small_queues();

    const TrainReport report = train_model(m, episodes, cfg);
    ASSERT_EQ(report.epoch_losses.size(), 30u);
    EXPECT_LT(report.epoch_losses.back(), 0.2 * report.epoch_losses.front());
    for (double l : report.epoch_losses) EXPECT_TRUE(std::isfinite(l));
}

TEST(Train, DeterministicGivenSeed) {
    SplitMix64 rng(501);
    const SyntheticWorld world(rng, 2, 16);
    const BackboneParams backbone = make_backbone(42, 16, 8);
    std::vector<Episode> episodes;
    for (int e = 0; e < 4; ++e) episodes.push_back(make_episode(rng, world, {0, 1}, 12));

    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 42;
    cfg.queues = small_queues();

    RoomNetModel a = init_model(55, 3, backbone, 6, 6);
    RoomNetModel b = init_model(55, 3, backbone, 6, 6);
    train_model(a, episodes, cfg);
    train_model(b, episodes, cfg);
    EXPECT_EQ(serialize_model(a), serialize_model(b));
}

TEST(Train, BackboneStaysFrozen) {
    SplitMix64 rng(502);
    const SyntheticWorld world(rng, 2, 16);
    const BackboneParams backbone = make_backbone(42, 16, 8);
    std::vector<Episode> episodes;
    episodes.push_back(make_episode(rng, world, {0, 1, 0}, 15));

    RoomNetModel m = init_model(66, 3, backbone, 6, 6);
    const Vec before = m.backbone.projection.a;
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.queues = small_queues();
    train_model(m, episodes, cfg);
    EXPECT_EQ(m.backbone.projection.a, before);  // bitwise
}

TEST(Train, ZeroEpochsRejected) {
    const BackboneParams backbone = make_backbone(42, 16, 8);
    RoomNetModel m = init_model(1, 3, backbone, 4, 4);
    TrainConfig cfg;
    cfg.epochs = 0;
    EXPECT_THROW(train_model(m, {Episode{}}, cfg), std::invalid_argument);
}

TEST(Train, MissingClassRejected) {
    SplitMix64 rng(503);
    const SyntheticWorld world(rng, 3, 16);
    const BackboneParams backbone = make_backbone(42, 16, 8);
    // tour never visits room 2
    std::vector<Episode> episodes{make_episode(rng, world, {0, 1, 0}, 10)};
    RoomNetModel m = init_model(2, 4, backbone, 4, 4);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.queues = small_queues();
    EXPECT_THROW(train_model(m, episodes, cfg), std::runtime_error);
}

TEST(Train, AccuracyHighOnHeldOutTour) {
    SplitMix64 rng(504);
    const SyntheticWorld world(rng, 3, 16);
    const BackboneParams backbone = make_backbone(42, 16, 8);
    std::vector<Episode> episodes;
    for (int e = 0; e < 12; ++e)
        episodes.push_back(make_episode(rng, world, {e % 3, (e + 1) % 3, (e + 2) % 3}, 20));
    const Episode held_out = make_episode(rng, world, {2, 0, 1}, 20);

    RoomNetModel m = init_model(321, 4, backbone, 8, 8);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.seed = 321;
    cfg.queues = small_queues();
    train_model(m, episodes, cfg);
    EXPECT_GT(evaluate_accuracy(m, held_out, cfg.queues), 0.8);
}
