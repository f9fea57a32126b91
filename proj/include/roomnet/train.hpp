#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "roomnet/episode.hpp"
#include "roomnet/model.hpp"
#include "roomnet/rng.hpp"

namespace roomnet {

struct TrainConfig {
    std::size_t epochs = 30;
    double learning_rate = 0.05;
    uint64_t seed = 1;
    std::size_t sample_stride = 2;  // take every k-th record as a sample
    QueueConfig queues;
};

struct TrainingSample {
    MemoryQueues queues;
    std::size_t target = 0;  // class index; transit maps to the last class
};

struct ModelGrads {
    LstmGrads lstm;
    AttentionGrads attention;
    Mat head_w;
    Vec head_b;
};

inline ModelGrads make_grads(const RoomNetModel& m) {
    ModelGrads g;
    g.lstm = make_lstm_grads(m.lstm);
    g.attention = make_attention_grads(m.attention);
    g.head_w = Mat(m.head_w.rows, m.head_w.cols);
    g.head_b.assign(m.head_b.size(), 0.0);
    return g;
}

// Trainable parameters in a fixed order shared by SGD and gradient checks.
// The backbone is frozen and deliberately absent.
template <typename Fn>
void for_each_param(RoomNetModel& m, Fn&& fn) {
    for (Mat* mat : {&m.lstm.w_i, &m.lstm.w_f, &m.lstm.w_o, &m.lstm.w_g, &m.lstm.u_i,
                     &m.lstm.u_f, &m.lstm.u_o, &m.lstm.u_g})
        fn(mat->a);
    for (Vec* v : {&m.lstm.b_i, &m.lstm.b_f, &m.lstm.b_o, &m.lstm.b_g}) fn(*v);
    for (Mat* mat : {&m.attention.w_q, &m.attention.w_k, &m.attention.w_v}) fn(mat->a);
    fn(m.head_w.a);
    fn(m.head_b);
}

template <typename Fn>
void for_each_grad(ModelGrads& g, Fn&& fn) {
    for (Mat* mat : {&g.lstm.w_i, &g.lstm.w_f, &g.lstm.w_o, &g.lstm.w_g, &g.lstm.u_i,
                     &g.lstm.u_f, &g.lstm.u_o, &g.lstm.u_g})
        fn(mat->a);
    for (Vec* v : {&g.lstm.b_i, &g.lstm.b_f, &g.lstm.b_o, &g.lstm.b_g}) fn(*v);
    for (Mat* mat : {&g.attention.w_q, &g.attention.w_k, &g.attention.w_v}) fn(mat->a);
    fn(g.head_w.a);
    fn(g.head_b);
}

// Cross-entropy loss for one sample; accumulates analytic gradients when a
// grads sink is provided.
inline double loss_and_grads(const RoomNetModel& m, const MemoryQueues& q, std::size_t target,
                             ModelGrads* grads) {
    if (target >= m.class_count) throw std::invalid_argument("target class out of range");
    ForwardCache cache;
    const Vec probs = model_forward(m, q, &cache);
    const double loss = -std::log(std::max(probs[target], 1e-300));
    if (!grads) return loss;

    Vec dlogits = probs;
    dlogits[target] -= 1.0;

    add_outer(grads->head_w, dlogits, cache.concat);
    axpy(grads->head_b, 1.0, dlogits);

    const Vec dz = matvec_t(m.head_w, dlogits);
    const std::size_t h_dim = m.lstm.hidden_dim;
    Vec dh(dz.begin(), dz.begin() + h_dim);
    Vec da(dz.begin() + h_dim, dz.end());

    lstm_backward(cache.lstm, m.lstm, dh, grads->lstm);
    attention_backward(cache.attention, m.attention, da, grads->attention);
    return loss;
}

inline void apply_sgd(RoomNetModel& m, ModelGrads& g, double lr) {
    std::vector<Vec*> params, grads;
    for_each_param(m, [&](Vec& v) { params.push_back(&v); });
    for_each_grad(g, [&](Vec& v) { grads.push_back(&v); });
    for (std::size_t i = 0; i < params.size(); ++i) {
        Vec& p = *params[i];
        const Vec& d = *grads[i];
        for (std::size_t k = 0; k < p.size(); ++k) p[k] -= lr * d[k];
    }
}

inline void zero_grads(ModelGrads& g) {
    for_each_grad(g, [](Vec& v) { std::fill(v.begin(), v.end(), 0.0); });
}

inline std::size_t label_to_class(uint8_t label, std::size_t class_count) {
    return label == kTransitLabel ? class_count - 1 : label;
}

// Replays the online queue sampler over an episode and snapshots every
// stride-th record, so training sees exactly the queue states navigation
// will produce.
inline std::vector<TrainingSample> build_samples(const Episode& ep, const RoomNetModel& m,
                                                 const QueueConfig& queues,
                                                 std::size_t stride = 1) {
    if (stride == 0) throw std::invalid_argument("stride must be positive");
    std::vector<TrainingSample> samples;
    QueueTracker tracker(queues);
    for (std::size_t i = 0; i < ep.records.size(); ++i) {
        const auto& rec = ep.records[i];
        const FrameFeature feat = extract_feature(rec.frame, m.backbone);
        tracker.update(feat.v, rec.frame.timestamp);
        if (i % stride != 0) continue;
        TrainingSample s;
        s.queues = tracker.snapshot();
        s.target = label_to_class(rec.label, m.class_count);
        samples.push_back(std::move(s));
    }
    return samples;
}

struct TrainReport {
    std::vector<double> epoch_losses;  // mean cross-entropy per epoch
};

// Plain per-sample SGD over shuffled samples; deterministic given the seed.
inline TrainReport train_model(RoomNetModel& m, const std::vector<Episode>& episodes,
                               const TrainConfig& cfg) {
    if (cfg.epochs == 0) throw std::invalid_argument("epochs must be at least 1");
    if (episodes.empty()) throw std::invalid_argument("no training episodes");

    std::vector<TrainingSample> samples;
    for (const auto& ep : episodes) {
        auto s = build_samples(ep, m, cfg.queues, cfg.sample_stride);
        samples.insert(samples.end(), std::make_move_iterator(s.begin()),
                       std::make_move_iterator(s.end()));
    }
    if (samples.empty()) throw std::invalid_argument("no training samples");

    std::vector<std::size_t> class_counts(m.class_count, 0);
    for (const auto& s : samples) ++class_counts[s.target];
    for (std::size_t c = 0; c < class_counts.size(); ++c) {
        if (class_counts[c] == 0)
            throw std::runtime_error("class with no examples: " + std::to_string(c));
    }

    TrainReport report;
    ModelGrads grads = make_grads(m);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        SplitMix64 shuffle_rng(mix_seed(cfg.seed, epoch));
        const auto order = shuffle_rng.permutation(samples.size());
        double total = 0.0;
        for (const std::size_t idx : order) {
            zero_grads(grads);
            const double loss =
                loss_and_grads(m, samples[idx].queues, samples[idx].target, &grads);
            if (!std::isfinite(loss)) throw std::runtime_error("training diverged");
            apply_sgd(m, grads, cfg.learning_rate);
            total += loss;
        }
        report.epoch_losses.push_back(total / static_cast<double>(samples.size()));
    }
    return report;
}

// Frame-level accuracy of the argmax class over one episode.
inline double evaluate_accuracy(const RoomNetModel& m, const Episode& ep,
                                const QueueConfig& queues) {
    if (ep.records.empty()) throw std::invalid_argument("empty episode");
    QueueTracker tracker(queues);
    std::size_t correct = 0;
    for (const auto& rec : ep.records) {
        const FrameFeature feat = extract_feature(rec.frame, m.backbone);
        tracker.update(feat.v, rec.frame.timestamp);
        const Inference inf = infer(m, tracker.snapshot());
        if (static_cast<std::size_t>(inf.room_id) == label_to_class(rec.label, m.class_count))
            ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(ep.records.size());
}

}  // namespace roomnet
