#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "roomnet/math.hpp"

namespace roomnet {

// Scaled dot-product attention with a single query: the current frame
// feature attends over the long-term memory bank.
struct AttentionParams {
    std::size_t input_dim = 0;  // feature dim
    std::size_t attn_dim = 0;
    Mat w_q, w_k, w_v;  // attn x input
};

inline AttentionParams make_attention(std::size_t input_dim, std::size_t attn_dim) {
    AttentionParams p;
    p.input_dim = input_dim;
    p.attn_dim = attn_dim;
    for (Mat* m : {&p.w_q, &p.w_k, &p.w_v}) *m = Mat(attn_dim, input_dim);
    return p;
}

struct AttentionCache {
    Vec current;
    std::vector<Vec> context;
    Vec q;
    std::vector<Vec> k, v;
    Vec weights;  // softmax over scores
};

struct AttentionGrads {
    Mat w_q, w_k, w_v;
};

inline AttentionGrads make_attention_grads(const AttentionParams& p) {
    AttentionGrads g;
    for (Mat* m : {&g.w_q, &g.w_k, &g.w_v}) *m = Mat(p.attn_dim, p.input_dim);
    return g;
}

inline Vec attention_forward(const std::vector<Vec>& context, const Vec& current,
                             const AttentionParams& p, AttentionCache* cache = nullptr) {
    if (context.empty()) throw std::invalid_argument("empty long-term queue");
    if (current.size() != p.input_dim) throw std::invalid_argument("attention input dim mismatch");

    const double scale = 1.0 / std::sqrt(static_cast<double>(p.attn_dim));
    const Vec q = matvec(p.w_q, current);
    std::vector<Vec> keys, values;
    Vec scores(context.size());
    for (std::size_t j = 0; j < context.size(); ++j) {
        keys.push_back(matvec(p.w_k, context[j]));
        values.push_back(matvec(p.w_v, context[j]));
        scores[j] = dot(q, keys[j]) * scale;
    }
    const Vec weights = softmax(scores);

    Vec out(p.attn_dim, 0.0);
    for (std::size_t j = 0; j < context.size(); ++j) axpy(out, weights[j], values[j]);

    if (cache) {
        cache->current = current;
        cache->context = context;
        cache->q = q;
        cache->k = std::move(keys);
        cache->v = std::move(values);
        cache->weights = weights;
    }
    return out;
}

inline void attention_backward(const AttentionCache& cache, const AttentionParams& p,
                               const Vec& dout, AttentionGrads& grads) {
    const std::size_t n = cache.context.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(p.attn_dim));

    // d(weights) and softmax backward
    Vec dw(n);
    for (std::size_t j = 0; j < n; ++j) dw[j] = dot(cache.v[j], dout);
    double inner = 0.0;
    for (std::size_t j = 0; j < n; ++j) inner += cache.weights[j] * dw[j];
    Vec ds(n);
    for (std::size_t j = 0; j < n; ++j) ds[j] = cache.weights[j] * (dw[j] - inner);

    Vec dq(p.attn_dim, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        // values: dv_j = weights_j * dout
        Vec dv(p.attn_dim);
        for (std::size_t t = 0; t < p.attn_dim; ++t) dv[t] = cache.weights[j] * dout[t];
        add_outer(grads.w_v, dv, cache.context[j]);

        // keys: dk_j = ds_j * q * scale
        Vec dk(p.attn_dim);
        for (std::size_t t = 0; t < p.attn_dim; ++t) dk[t] = ds[j] * cache.q[t] * scale;
        add_outer(grads.w_k, dk, cache.context[j]);

        axpy(dq, ds[j] * scale, cache.k[j]);
    }
    add_outer(grads.w_q, dq, cache.current);
}

}  // namespace roomnet
