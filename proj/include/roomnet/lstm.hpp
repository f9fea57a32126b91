#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "roomnet/math.hpp"

namespace roomnet {

// Standard LSTM cell: input/forget/output gates plus tanh candidate,
// h_0 = c_0 = 0.
struct LstmParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    Mat w_i, w_f, w_o, w_g;  // hidden x input
    Mat u_i, u_f, u_o, u_g;  // hidden x hidden
    Vec b_i, b_f, b_o, b_g;  // hidden
};

inline LstmParams make_lstm(std::size_t input_dim, std::size_t hidden_dim) {
    LstmParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    for (Mat* m : {&p.w_i, &p.w_f, &p.w_o, &p.w_g}) *m = Mat(hidden_dim, input_dim);
    for (Mat* m : {&p.u_i, &p.u_f, &p.u_o, &p.u_g}) *m = Mat(hidden_dim, hidden_dim);
    for (Vec* v : {&p.b_i, &p.b_f, &p.b_o, &p.b_g}) v->assign(hidden_dim, 0.0);
    return p;
}

struct LstmStepCache {
    Vec x;       // input at this step
    Vec h_prev;  // hidden entering the step
    Vec c_prev;
    Vec gate_i, gate_f, gate_o, cand;
    Vec c, tanh_c;
};

struct LstmCache {
    std::vector<LstmStepCache> steps;
};

struct LstmGrads {
    Mat w_i, w_f, w_o, w_g;
    Mat u_i, u_f, u_o, u_g;
    Vec b_i, b_f, b_o, b_g;
};

inline LstmGrads make_lstm_grads(const LstmParams& p) {
    LstmGrads g;
    for (Mat* m : {&g.w_i, &g.w_f, &g.w_o, &g.w_g}) *m = Mat(p.hidden_dim, p.input_dim);
    for (Mat* m : {&g.u_i, &g.u_f, &g.u_o, &g.u_g}) *m = Mat(p.hidden_dim, p.hidden_dim);
    for (Vec* v : {&g.b_i, &g.b_f, &g.b_o, &g.b_g}) v->assign(p.hidden_dim, 0.0);
    return g;
}

// Returns the final hidden state; caches per-step activations when asked.
inline Vec lstm_forward(const std::vector<Vec>& seq, const LstmParams& p,
                        LstmCache* cache = nullptr) {
    if (seq.empty()) throw std::invalid_argument("empty short-term queue");
    const std::size_t h_dim = p.hidden_dim;
    Vec h(h_dim, 0.0), c(h_dim, 0.0);
    if (cache) cache->steps.clear();

    for (const Vec& x : seq) {
        if (x.size() != p.input_dim) throw std::invalid_argument("lstm input dim mismatch");
        Vec ai = matvec(p.w_i, x), af = matvec(p.w_f, x), ao = matvec(p.w_o, x),
            ag = matvec(p.w_g, x);
        axpy(ai, 1.0, matvec(p.u_i, h));
        axpy(af, 1.0, matvec(p.u_f, h));
        axpy(ao, 1.0, matvec(p.u_o, h));
        axpy(ag, 1.0, matvec(p.u_g, h));

        LstmStepCache step;
        step.x = x;
        step.h_prev = h;
        step.c_prev = c;
        step.gate_i.resize(h_dim);
        step.gate_f.resize(h_dim);
        step.gate_o.resize(h_dim);
        step.cand.resize(h_dim);
        step.c.resize(h_dim);
        step.tanh_c.resize(h_dim);

        for (std::size_t k = 0; k < h_dim; ++k) {
            step.gate_i[k] = sigmoid(ai[k] + p.b_i[k]);
            step.gate_f[k] = sigmoid(af[k] + p.b_f[k]);
            step.gate_o[k] = sigmoid(ao[k] + p.b_o[k]);
            step.cand[k] = std::tanh(ag[k] + p.b_g[k]);
            step.c[k] = step.gate_f[k] * c[k] + step.gate_i[k] * step.cand[k];
            step.tanh_c[k] = std::tanh(step.c[k]);
            h[k] = step.gate_o[k] * step.tanh_c[k];
        }
        c = step.c;
        if (cache) cache->steps.push_back(std::move(step));
    }
    return h;
}

// Backpropagation through time from the gradient of the final hidden state.
// Accumulates into `grads`; inputs are frozen features, so no dx is produced.
inline void lstm_backward(const LstmCache& cache, const LstmParams& p, const Vec& dh_last,
                          LstmGrads& grads) {
    const std::size_t h_dim = p.hidden_dim;
    Vec dh = dh_last;
    Vec dc(h_dim, 0.0);

    for (std::size_t s = cache.steps.size(); s-- > 0;) {
        const LstmStepCache& st = cache.steps[s];
        Vec da_i(h_dim), da_f(h_dim), da_o(h_dim), da_g(h_dim);
        for (std::size_t k = 0; k < h_dim; ++k) {
            const double d_o = dh[k] * st.tanh_c[k];
            const double dck = dc[k] + dh[k] * st.gate_o[k] * (1.0 - st.tanh_c[k] * st.tanh_c[k]);
            const double d_i = dck * st.cand[k];
            const double d_g = dck * st.gate_i[k];
            const double d_f = dck * st.c_prev[k];
            dc[k] = dck * st.gate_f[k];
            da_i[k] = d_i * st.gate_i[k] * (1.0 - st.gate_i[k]);
            da_f[k] = d_f * st.gate_f[k] * (1.0 - st.gate_f[k]);
            da_o[k] = d_o * st.gate_o[k] * (1.0 - st.gate_o[k]);
            da_g[k] = d_g * (1.0 - st.cand[k] * st.cand[k]);
        }

        add_outer(grads.w_i, da_i, st.x);
        add_outer(grads.w_f, da_f, st.x);
        add_outer(grads.w_o, da_o, st.x);
        add_outer(grads.w_g, da_g, st.x);
        add_outer(grads.u_i, da_i, st.h_prev);
        add_outer(grads.u_f, da_f, st.h_prev);
        add_outer(grads.u_o, da_o, st.h_prev);
        add_outer(grads.u_g, da_g, st.h_prev);
        axpy(grads.b_i, 1.0, da_i);
        axpy(grads.b_f, 1.0, da_f);
        axpy(grads.b_o, 1.0, da_o);
        axpy(grads.b_g, 1.0, da_g);

        Vec dh_prev = matvec_t(p.u_i, da_i);
        axpy(dh_prev, 1.0, matvec_t(p.u_f, da_f));
        axpy(dh_prev, 1.0, matvec_t(p.u_o, da_o));
        axpy(dh_prev, 1.0, matvec_t(p.u_g, da_g));
        dh = std::move(dh_prev);
    }
}

}  // namespace roomnet
