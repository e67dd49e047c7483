#include "nest/ppo.hpp"

#include <cmath>
#include <numeric>

namespace nest::ppo {

double lr_schedule(std::int64_t env_step, const PpoConfig& cfg) {
    double frac = 1.0 - static_cast<double>(env_step) / static_cast<double>(cfg.max_steps);
    if (frac < 0.0) frac = 0.0;
    return cfg.learning_rate * frac;
}

void gae(const std::vector<double>& rewards, const std::vector<double>& values,
         const std::vector<std::uint8_t>& dones, double gamma, double lambda,
         std::vector<double>& advantages, std::vector<double>& returns) {
    std::size_t n = rewards.size();
    if (values.size() != n + 1 || dones.size() != n)
        throw std::invalid_argument("gae: length mismatch");
    advantages.assign(n, 0.0);
    returns.assign(n, 0.0);
    double acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        double not_done = dones[i] ? 0.0 : 1.0;
        double delta = rewards[i] + gamma * values[i + 1] * not_done - values[i];
        acc = delta + gamma * lambda * not_done * acc;
        advantages[i] = acc;
        returns[i] = acc + values[i];
    }
}

RolloutBuffer::RolloutBuffer(int capacity_) : capacity(capacity_) {
    obs.reserve(static_cast<std::size_t>(capacity) * 3 * render::kFramePixels);
    actions.reserve(capacity);
    log_probs.reserve(capacity);
    values.reserve(capacity);
    rewards.reserve(capacity);
    dones.reserve(capacity);
}

void RolloutBuffer::reset() {
    size = 0;
    obs.clear();
    actions.clear();
    log_probs.clear();
    values.clear();
    rewards.clear();
    dones.clear();
}

void RolloutBuffer::push(const float* obs_chw, world::Action a, float log_prob, float value,
                         float reward, bool done) {
    if (full()) throw std::logic_error("rollout buffer overflow");
    obs.insert(obs.end(), obs_chw, obs_chw + 3 * render::kFramePixels);
    actions.push_back(a);
    log_probs.push_back(log_prob);
    values.push_back(value);
    rewards.push_back(reward);
    dones.push_back(done ? 1 : 0);
    ++size;
}

ActionSample select_action(const nn::PolicyNet<float>& net, const float* obs_chw, Rng& rng,
                           bool greedy) {
    nn::PolicyNet<float>::Acts acts;
    net.forward(obs_chw, acts);
    float pt[3], pr[3], lpt[3], lpr[3];
    nn::softmax(acts.logits_t, pt, 3);
    nn::softmax(acts.logits_r, pr, 3);
    nn::log_softmax(acts.logits_t, lpt, 3);
    nn::log_softmax(acts.logits_r, lpr, 3);
    int it, ir;
    if (greedy) {
        it = 0;
        ir = 0;
        for (int i = 1; i < 3; ++i) {
            if (pt[i] > pt[it]) it = i;
            if (pr[i] > pr[ir]) ir = i;
        }
    } else {
        it = nn::sample_categorical(pt, 3, rng);
        ir = nn::sample_categorical(pr, 3, rng);
    }
    ActionSample s;
    s.action = {it - 1, ir - 1};
    s.log_prob = lpt[it] + lpr[ir];
    s.value = acts.value;
    return s;
}

UpdateDiagnostics ppo_update(nn::PolicyNet<float>& net, nn::ParamSet<float>& params,
                             nn::Adam<float>& opt, const RolloutBuffer& buffer,
                             float bootstrap_value, const PpoConfig& cfg, std::int64_t env_step,
                             Rng& rng) {
    if (!buffer.full()) throw std::logic_error("ppo_update: buffer not full");
    int n = buffer.size;

    std::vector<double> rewards(buffer.rewards.begin(), buffer.rewards.end());
    std::vector<double> values(n + 1);
    for (int i = 0; i < n; ++i) values[i] = buffer.values[i];
    values[n] = buffer.dones[n - 1] ? 0.0 : bootstrap_value;
    std::vector<double> adv, ret;
    gae(rewards, values, buffer.dones, cfg.gamma, cfg.lambda, adv, ret);

    double mean = 0.0;
    for (double a : adv) mean += a;
    mean /= n;
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    var /= n;
    double sd = std::sqrt(var);
    std::vector<float> adv_n(n), ret_f(n);
    for (int i = 0; i < n; ++i) {
        adv_n[i] = sd > 0.0 ? static_cast<float>((adv[i] - mean) / sd) : 0.0f;
        ret_f[i] = static_cast<float>(ret[i]);
    }

    double lr = lr_schedule(env_step, cfg);
    UpdateDiagnostics diag;
    double loss_p = 0.0, loss_v = 0.0, ent = 0.0;
    std::int64_t samples = 0;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    nn::PolicyNet<float>::Acts acts;

    for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
        rng.shuffle(order);
        for (int start = 0; start < n; start += cfg.batch_size) {
            int mb = std::min(cfg.batch_size, n - start);
            float scale = 1.0f / static_cast<float>(mb);
            params.zero_grads();
            for (int j = 0; j < mb; ++j) {
                int idx = order[start + j];
                const float* x = buffer.obs_at(idx);
                net.forward(x, acts);
                int at = buffer.actions[idx].translation + 1;
                int ar = buffer.actions[idx].rotation + 1;
                SampleLoss<float> sl = ppo_sample_loss<float>(
                    acts.logits_t, acts.logits_r, acts.value, at, ar, buffer.log_probs[idx],
                    adv_n[idx], ret_f[idx], static_cast<float>(cfg.epsilon),
                    static_cast<float>(cfg.beta));
                float dlt[3], dlr[3];
                for (int i = 0; i < 3; ++i) {
                    dlt[i] = sl.dlogits_t[i] * scale;
                    dlr[i] = sl.dlogits_r[i] * scale;
                }
                net.backward(x, acts, dlt, dlr, sl.dvalue * scale);
                loss_p += sl.policy_loss;
                loss_v += sl.value_loss;
                ent += sl.entropy;
                ++samples;
            }
            opt.step(params, lr);
            ++diag.minibatches;
        }
    }
    diag.policy_loss = loss_p / static_cast<double>(samples);
    diag.value_loss = loss_v / static_cast<double>(samples);
    diag.entropy = ent / static_cast<double>(samples);
    return diag;
}

}  // namespace nest::ppo
