#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "roomnet/attention.hpp"
#include "roomnet/backbone.hpp"
#include "roomnet/graph.hpp"
#include "roomnet/io.hpp"
#include "roomnet/lstm.hpp"
#include "roomnet/math.hpp"

namespace roomnet {

struct QueueConfig {
    std::size_t short_len = 8;   // n1
    double short_period = 0.5;   // t1 seconds
    std::size_t long_len = 6;    // n2
    double long_period = 5.0;    // t2 seconds

    void validate() const {
        if (short_len == 0 || long_len == 0) throw std::invalid_argument("queue length zero");
        if (!(long_period > short_period))
            throw std::invalid_argument("long-term period must exceed short-term period");
    }
};

// Short-term and long-term memory banks plus the current frame feature.
// Oldest first.
struct MemoryQueues {
    std::size_t short_len = 8;
    std::size_t long_len = 6;
    std::vector<Vec> q_short;
    std::vector<Vec> q_long;
    Vec current;
};

// Online sampler filling both banks at their configured periods.
class QueueTracker {
  public:
    explicit QueueTracker(const QueueConfig& cfg = {}) : cfg_(cfg) { cfg_.validate(); }

    void update(const Vec& feature, double t) {
        constexpr double kEps = 1e-9;
        if (!has_short_ || t - last_short_ >= cfg_.short_period - kEps) {
            push(q_short_, feature, cfg_.short_len);
            last_short_ = t;
            has_short_ = true;
        }
        if (!has_long_ || t - last_long_ >= cfg_.long_period - kEps) {
            push(q_long_, feature, cfg_.long_len);
            last_long_ = t;
            has_long_ = true;
        }
        current_ = feature;
    }

    MemoryQueues snapshot() const {
        MemoryQueues q;
        q.short_len = cfg_.short_len;
        q.long_len = cfg_.long_len;
        q.q_short.assign(q_short_.begin(), q_short_.end());
        q.q_long.assign(q_long_.begin(), q_long_.end());
        q.current = current_;
        return q;
    }

    void reset() {
        q_short_.clear();
        q_long_.clear();
        current_.clear();
        has_short_ = has_long_ = false;
    }

  private:
    static void push(std::deque<Vec>& q, const Vec& f, std::size_t cap) {
        q.push_back(f);
        while (q.size() > cap) q.pop_front();
    }

    QueueConfig cfg_;
    std::deque<Vec> q_short_, q_long_;
    Vec current_;
    double last_short_ = 0.0, last_long_ = 0.0;
    bool has_short_ = false, has_long_ = false;
};

struct RoomNetModel {
    BackboneParams backbone;  // frozen
    LstmParams lstm;
    AttentionParams attention;
    Mat head_w;  // class_count x (hidden + attn)
    Vec head_b;
    std::size_t class_count = 0;  // m + 1; last index is the transit class
    uint64_t seed = 0;

    int transit_class() const { return static_cast<int>(class_count) - 1; }
    int room_count() const { return static_cast<int>(class_count) - 1; }
};

struct Inference {
    Vec probs;
    int room_id = 0;  // argmax class (may be the transit class)
    double p_m = 0.0;
};

// Uniform(-0.1, 0.1) init from the run seed, forget-gate bias +1; the
// backbone keeps its own fixed seed.
inline RoomNetModel init_model(uint64_t seed, std::size_t class_count,
                               const BackboneParams& backbone,
                               std::size_t hidden_dim = 32, std::size_t attn_dim = 32) {
    if (class_count < 2) throw std::invalid_argument("need at least one room plus transit");
    RoomNetModel m;
    m.backbone = backbone;
    m.seed = seed;
    m.class_count = class_count;
    const std::size_t feat = backbone.feature_dim;
    m.lstm = make_lstm(feat, hidden_dim);
    m.attention = make_attention(feat, attn_dim);
    m.head_w = Mat(class_count, hidden_dim + attn_dim);
    m.head_b.assign(class_count, 0.0);

    SplitMix64 rng(seed);
    auto fill = [&rng](Vec& v) {
        for (auto& x : v) x = rng.uniform(-0.1, 0.1);
    };
    for (Mat* mat : {&m.lstm.w_i, &m.lstm.w_f, &m.lstm.w_o, &m.lstm.w_g, &m.lstm.u_i,
                     &m.lstm.u_f, &m.lstm.u_o, &m.lstm.u_g})
        fill(mat->a);
    for (Vec* v : {&m.lstm.b_i, &m.lstm.b_f, &m.lstm.b_o, &m.lstm.b_g}) fill(*v);
    for (Mat* mat : {&m.attention.w_q, &m.attention.w_k, &m.attention.w_v}) fill(mat->a);
    fill(m.head_w.a);
    fill(m.head_b);
    for (auto& b : m.lstm.b_f) b += 1.0;
    return m;
}

namespace detail {

// Until a bank is full it is padded by repeating its oldest entry; an empty
// bank falls back to the current feature.
inline std::vector<Vec> padded_bank(const std::vector<Vec>& bank, const Vec& current,
                                    std::size_t target) {
    const Vec& oldest = bank.empty() ? current : bank.front();
    if (oldest.empty()) return {};
    std::vector<Vec> out;
    out.reserve(std::max(target, bank.size()));
    const std::size_t have = bank.empty() ? 1 : bank.size();
    for (std::size_t i = have; i < target; ++i) out.push_back(oldest);
    if (bank.empty())
        out.push_back(current);
    else
        out.insert(out.end(), bank.begin(), bank.end());
    return out;
}

}  // namespace detail

struct ForwardCache {
    LstmCache lstm;
    AttentionCache attention;
    Vec hidden, context, concat, probs;
};

inline Vec model_forward(const RoomNetModel& m, const MemoryQueues& q,
                         ForwardCache* cache = nullptr) {
    if (q.current.empty()) throw std::invalid_argument("no current feature");
    const auto short_bank = detail::padded_bank(q.q_short, q.current, q.short_len);
    const auto long_bank = detail::padded_bank(q.q_long, q.current, q.long_len);

    Vec h = lstm_forward(short_bank, m.lstm, cache ? &cache->lstm : nullptr);
    Vec a = attention_forward(long_bank, q.current, m.attention,
                              cache ? &cache->attention : nullptr);

    Vec z;
    z.reserve(h.size() + a.size());
    z.insert(z.end(), h.begin(), h.end());
    z.insert(z.end(), a.begin(), a.end());

    Vec logits = matvec(m.head_w, z);
    axpy(logits, 1.0, m.head_b);
    Vec probs = softmax(logits);
    if (cache) {
        cache->hidden = std::move(h);
        cache->context = std::move(a);
        cache->concat = std::move(z);
        cache->probs = probs;
    }
    return probs;
}

inline Inference infer(const RoomNetModel& m, const MemoryQueues& q) {
    Inference inf;
    inf.probs = model_forward(m, q);
    inf.room_id = static_cast<int>(argmax(inf.probs));
    inf.p_m = inf.probs[inf.room_id];
    return inf;
}

// Zeroes the probability of rooms that are neither the previous room nor its
// graph neighbors (the transit class always stays) and renormalizes. If the
// mask removes all mass the unmasked inference is returned.
inline Inference mask_with_graph(const Inference& inf, const RoomGraph& g, int prev_room) {
    if (prev_room < 0 || prev_room >= g.room_count)
        throw std::invalid_argument("previous room is not a graph vertex");
    if (inf.probs.size() != static_cast<std::size_t>(g.room_count) + 1)
        throw std::invalid_argument("inference size does not match graph");

    Inference out;
    out.probs.assign(inf.probs.size(), 0.0);
    double total = 0.0;
    for (std::size_t c = 0; c < inf.probs.size(); ++c) {
        const int room = static_cast<int>(c);
        const bool allowed = room == g.room_count ||  // transit
                             room == prev_room || g.adjacency[prev_room][room] != 0;
        if (allowed) {
            out.probs[c] = inf.probs[c];
            total += inf.probs[c];
        }
    }
    if (total <= 0.0) return inf;
    for (auto& p : out.probs) p /= total;
    out.room_id = static_cast<int>(argmax(out.probs));
    out.p_m = out.probs[out.room_id];
    return out;
}

// Model file: header, every parameter tensor row-major f32, then the seed.
inline Bytes serialize_model(const RoomNetModel& m) {
    ByteWriter w;
    w.magic("RNMD");
    w.u32(1);  // version
    w.u32(static_cast<uint32_t>(m.backbone.descriptor_dim));
    w.u32(static_cast<uint32_t>(m.backbone.feature_dim));
    w.u32(static_cast<uint32_t>(m.lstm.hidden_dim));
    w.u32(static_cast<uint32_t>(m.attention.attn_dim));
    w.u32(static_cast<uint32_t>(m.class_count));

    auto tensor = [&w](const Vec& v) {
        for (double x : v) w.f32(static_cast<float>(x));
    };
    tensor(m.backbone.projection.a);
    for (const Mat* mat : {&m.lstm.w_i, &m.lstm.w_f, &m.lstm.w_o, &m.lstm.w_g, &m.lstm.u_i,
                           &m.lstm.u_f, &m.lstm.u_o, &m.lstm.u_g})
        tensor(mat->a);
    for (const Vec* v : {&m.lstm.b_i, &m.lstm.b_f, &m.lstm.b_o, &m.lstm.b_g}) tensor(*v);
    for (const Mat* mat : {&m.attention.w_q, &m.attention.w_k, &m.attention.w_v})
        tensor(mat->a);
    tensor(m.head_w.a);
    tensor(m.head_b);
    w.u64(m.seed);
    return w.take();
}

inline RoomNetModel parse_model(const Bytes& data) {
    ByteReader r(data);
    r.magic("RNMD");
    const uint32_t version = r.u32();
    if (version != 1) throw std::runtime_error("unsupported model version");
    const std::size_t desc_dim = r.u32();
    const std::size_t feat_dim = r.u32();
    const std::size_t hidden_dim = r.u32();
    const std::size_t attn_dim = r.u32();
    const std::size_t class_count = r.u32();

    RoomNetModel m;
    m.class_count = class_count;
    m.backbone.descriptor_dim = desc_dim;
    m.backbone.feature_dim = feat_dim;
    m.backbone.projection = Mat(feat_dim, desc_dim);
    m.lstm = make_lstm(feat_dim, hidden_dim);
    m.attention = make_attention(feat_dim, attn_dim);
    m.head_w = Mat(class_count, hidden_dim + attn_dim);
    m.head_b.assign(class_count, 0.0);

    auto tensor = [&r](Vec& v) {
        for (auto& x : v) x = static_cast<double>(r.f32());
    };
    tensor(m.backbone.projection.a);
    for (Mat* mat : {&m.lstm.w_i, &m.lstm.w_f, &m.lstm.w_o, &m.lstm.w_g, &m.lstm.u_i,
                     &m.lstm.u_f, &m.lstm.u_o, &m.lstm.u_g})
        tensor(mat->a);
    for (Vec* v : {&m.lstm.b_i, &m.lstm.b_f, &m.lstm.b_o, &m.lstm.b_g}) tensor(*v);
    for (Mat* mat : {&m.attention.w_q, &m.attention.w_k, &m.attention.w_v}) tensor(mat->a);
    tensor(m.head_w.a);
    tensor(m.head_b);
    m.seed = r.u64();
    m.backbone.seed = m.seed;
    if (!r.done()) throw std::runtime_error("trailing bytes in model file");
    return m;
}

inline void save_model(const std::string& path, const RoomNetModel& m) {
    save_bytes(path, serialize_model(m));
}

inline RoomNetModel load_model(const std::string& path) {
    return parse_model(load_bytes(path));
}

}  // namespace roomnet
