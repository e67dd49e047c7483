#pragma once

#include <cstdint>
#include <vector>

#include "nest/detmath.hpp"
#include "nest/errors.hpp"
#include "nest/nn.hpp"
#include "nest/render.hpp"
#include "nest/rng.hpp"
#include "nest/world.hpp"

namespace nest::ppo {

struct PpoConfig {
    double learning_rate = 3e-4;
    int batch_size = 500;
    int buffer_size = 2048;
    double beta = 0.01;     // entropy coefficient
    double epsilon = 0.2;   // clip range
    double lambda = 0.95;   // GAE
    double gamma = 0.99;
    std::int64_t max_steps = 1000000;
    int epochs_per_update = 3;
};

// lr = base * max(0, 1 - env_step / max_steps)
double lr_schedule(std::int64_t env_step, const PpoConfig& cfg);

// values has n+1 entries, the last being the bootstrap (0 if terminal);
// a done flag cuts both the TD target and the advantage accumulation
void gae(const std::vector<double>& rewards, const std::vector<double>& values,
         const std::vector<std::uint8_t>& dones, double gamma, double lambda,
         std::vector<double>& advantages, std::vector<double>& returns);

struct RolloutBuffer {
    int capacity = 0;
    int size = 0;
    std::vector<float> obs;  // size * 3*96*96, planar
    std::vector<world::Action> actions;
    std::vector<float> log_probs;
    std::vector<float> values;
    std::vector<float> rewards;
    std::vector<std::uint8_t> dones;

    explicit RolloutBuffer(int capacity_);
    void reset();
    bool full() const { return size == capacity; }
    void push(const float* obs_chw, world::Action a, float log_prob, float value, float reward,
              bool done);
    const float* obs_at(int i) const {
        return obs.data() + static_cast<std::size_t>(i) * 3 * render::kFramePixels;
    }
};

struct ActionSample {
    world::Action action;
    float log_prob = 0;
    float value = 0;
};

ActionSample select_action(const nn::PolicyNet<float>& net, const float* obs_chw, Rng& rng,
                           bool greedy = false);

// Per-sample clipped-surrogate loss and its gradient w.r.t. the raw head
// outputs. Templated so the double instantiation can be checked against
// finite differences.
template <typename T>
struct SampleLoss {
    T loss = T(0);
    T policy_loss = T(0), value_loss = T(0), entropy = T(0);
    T dlogits_t[3] = {}, dlogits_r[3] = {};
    T dvalue = T(0);
};

template <typename T>
SampleLoss<T> ppo_sample_loss(const T logits_t[3], const T logits_r[3], T value, int a_t, int a_r,
                              T old_log_prob, T advantage, T ret, T epsilon, T beta) {
    SampleLoss<T> out;
    T pt[3], pr[3], lpt[3], lpr[3];
    nn::softmax(logits_t, pt, 3);
    nn::softmax(logits_r, pr, 3);
    nn::log_softmax(logits_t, lpt, 3);
    nn::log_softmax(logits_r, lpr, 3);

    T log_prob = lpt[a_t] + lpr[a_r];
    T rho = detmath::exp_t(log_prob - old_log_prob);
    T clipped = rho < T(1) - epsilon ? T(1) - epsilon : (rho > T(1) + epsilon ? T(1) + epsilon : rho);
    T u = rho * advantage;
    T c = clipped * advantage;
    bool unclipped_active = u <= c;
    T surrogate = unclipped_active ? u : c;
    out.policy_loss = -surrogate;

    T vdiff = value - ret;
    out.value_loss = T(0.5) * vdiff * vdiff;

    T ht = T(0), hr = T(0);
    for (int i = 0; i < 3; ++i) {
        ht -= pt[i] * lpt[i];
        hr -= pr[i] * lpr[i];
    }
    out.entropy = ht + hr;
    out.loss = out.policy_loss + out.value_loss - beta * out.entropy;

    // d(-surrogate)/dlogits: rho*A through log-prob when the unclipped branch
    // is active, zero when the clip is flat
    T coef = unclipped_active ? rho * advantage : T(0);
    for (int i = 0; i < 3; ++i) {
        T onehot_t = i == a_t ? T(1) : T(0);
        T onehot_r = i == a_r ? T(1) : T(0);
        out.dlogits_t[i] = -coef * (onehot_t - pt[i]) + beta * pt[i] * (lpt[i] + ht);
        out.dlogits_r[i] = -coef * (onehot_r - pr[i]) + beta * pr[i] * (lpr[i] + hr);
    }
    out.dvalue = vdiff;
    return out;
}

struct UpdateDiagnostics {
    double policy_loss = 0, value_loss = 0, entropy = 0;
    int minibatches = 0;
};

// Normalizes advantages over the buffer (population std; all-equal -> zeros),
// then epochs_per_update passes of shuffled minibatches. The learning rate is
// taken from the schedule at env_step and held for the whole update.
UpdateDiagnostics ppo_update(nn::PolicyNet<float>& net, nn::ParamSet<float>& params,
                             nn::Adam<float>& opt, const RolloutBuffer& buffer,
                             float bootstrap_value, const PpoConfig& cfg, std::int64_t env_step,
                             Rng& rng);

}  // namespace nest::ppo
