#include "nest/intrinsic.hpp"

#include <algorithm>
#include <stdexcept>

#include "nest/errors.hpp"

namespace nest::intrinsic {

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "icm") return Algorithm::Icm;
    if (s == "rnd") return Algorithm::Rnd;
    if (s == "contrastive") return Algorithm::Contrastive;
    throw ConfigError("unknown algorithm: " + s);
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Icm: return "icm";
        case Algorithm::Rnd: return "rnd";
        default: return "contrastive";
    }
}

// ---------------------------------------------------------------------------

IcmModule::IcmModule(const IntrinsicConfig& cfg_, std::uint64_t seed) : cfg(cfg_) {
    Rng rng(mix_seed(seed, fnv1a64("icm-init")));
    nets.init(rng);
    nets.collect(params, "icm");
    opt.attach(params);
}

float IcmModule::step(const float* s_chw, world::Action a, const float* s2_chw) {
    params.zero_grads();
    IcmStepResult<float> r =
        icm_losses<float>(nets, s_chw, a.joint_index(), s2_chw, static_cast<float>(cfg.beta_fwd),
                          static_cast<float>(1.0 - cfg.beta_fwd), true);
    opt.step(params, cfg.learning_rate);
    last_forward_loss = r.forward_loss;
    last_inverse_loss = r.inverse_loss;
    return static_cast<float>(cfg.strength) * r.forward_loss;
}

void IcmModule::collect(nn::ParamSet<float>& ps) { nets.collect(ps, "icm"); }

// ---------------------------------------------------------------------------

RndModule::RndModule(const IntrinsicConfig& cfg_, std::uint64_t seed) : cfg(cfg_) {
    Rng tr(mix_seed(seed, fnv1a64("rnd-target")));
    target.init(tr);
    Rng pr(mix_seed(seed, fnv1a64("rnd-predictor")));
    predictor.init(pr);
    predictor.collect(pred_params, "rnd.predictor");
    opt.attach(pred_params);
}

double RndModule::raw_error(const float* s_chw) {
    nn::EncoderNet<float>::Acts pa, ta;
    predictor.forward(s_chw, pa);
    target.forward(s_chw, ta);
    double raw = 0.0;
    for (std::size_t i = 0; i < pa.out.size(); ++i) {
        double d = static_cast<double>(pa.out[i]) - static_cast<double>(ta.out[i]);
        raw += d * d;
    }
    return raw;
}

float RndModule::step(const float* /*s_chw*/, world::Action /*a*/, const float* s2_chw) {
    pred_params.zero_grads();
    float loss = rnd_predictor_loss<float>(predictor, target, s2_chw, true);
    double raw = 2.0 * static_cast<double>(loss);
    normalizer.push(raw);
    double reward = cfg.strength * raw / normalizer.divisor();
    opt.step(pred_params, cfg.learning_rate);
    return static_cast<float>(reward);
}

void RndModule::collect(nn::ParamSet<float>& ps) {
    target.collect(ps, "rnd.target");
    predictor.collect(ps, "rnd.predictor");
}

std::uint64_t RndModule::target_hash() const {
    nn::ParamSet<float> ps;
    const_cast<nn::EncoderNet<float>&>(target).collect(ps, "rnd.target");
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& p : ps.params) {
        std::uint64_t th =
            fnv1a64(reinterpret_cast<const unsigned char*>(p.value->data()),
                    p.value->size() * sizeof(float));
        h = mix_seed(h, th);
    }
    return h;
}

// ---------------------------------------------------------------------------

ContrastiveModule::ContrastiveModule(const IntrinsicConfig& cfg_, std::uint64_t seed)
    : cfg(cfg_), aug_rng(mix_seed(seed, fnv1a64("contrastive-aug"))) {
    Rng rng(mix_seed(seed, fnv1a64("contrastive-init")));
    enc.init(rng);
    proj.init({nn::EncoderNet<float>::kOut, 128, 128}, rng);
    enc.collect(params, "ctr.enc");
    proj.collect(params, "ctr.proj");
    opt.attach(params);
}

void ContrastiveModule::project(const float* s_chw, std::vector<float>& z_out) {
    nn::EncoderNet<float>::Acts ea;
    enc.forward(s_chw, ea);
    nn::Mlp<float>::Acts pa;
    proj.forward(ea.out.data(), pa);
    const std::vector<float>& raw = proj.output(pa);
    z_out.resize(raw.size());
    l2_normalize(raw.data(), static_cast<int>(raw.size()), z_out.data());
}

float ContrastiveModule::peek_reward(const float* s_chw) {
    std::vector<float> z;
    project(s_chw, z);
    if (memory.empty()) return static_cast<float>(cfg.strength);
    float best = -1.0f;
    for (const auto& m : memory) {
        float s = 0.0f;
        for (std::size_t i = 0; i < z.size(); ++i) s += z[i] * m[i];
        if (s > best) best = s;
    }
    return static_cast<float>(cfg.strength) * (1.0f - best);
}

float ContrastiveModule::step(const float* /*s_chw*/, world::Action /*a*/, const float* s2_chw) {
    float reward = peek_reward(s2_chw);

    std::vector<float> z;
    project(s2_chw, z);
    if (static_cast<int>(memory.size()) < cfg.memory_k) {
        memory.push_back(std::move(z));
    } else {
        memory[memory_head] = std::move(z);
        memory_head = (memory_head + 1) % memory.size();
    }

    std::vector<float> frame(s2_chw, s2_chw + 3 * render::kFramePixels);
    if (static_cast<int>(replay.size()) < cfg.replay_capacity) {
        replay.push_back(std::move(frame));
    } else {
        replay[replay_head] = std::move(frame);
        replay_head = (replay_head + 1) % replay.size();
    }

    ++step_count;
    if (step_count % cfg.update_period == 0 && !replay.empty()) nt_xent_update();
    return reward;
}

void ContrastiveModule::nt_xent_update() {
    const int b = cfg.pair_batch;
    const std::size_t frame_n = 3 * render::kFramePixels;
    std::vector<std::vector<float>> views(2 * b, std::vector<float>(frame_n));
    for (int i = 0; i < b; ++i) {
        const std::vector<float>& src =
            replay[aug_rng.next_below(static_cast<std::uint64_t>(replay.size()))];
        augment_chw(src.data(), views[2 * i].data(), aug_rng);
        augment_chw(src.data(), views[2 * i + 1].data(), aug_rng);
    }

    std::vector<nn::EncoderNet<float>::Acts> eacts(2 * b);
    std::vector<nn::Mlp<float>::Acts> pacts(2 * b);
    std::vector<std::vector<float>> raw(2 * b);
    for (int i = 0; i < 2 * b; ++i) {
        enc.forward(views[i].data(), eacts[i]);
        proj.forward(eacts[i].out.data(), pacts[i]);
        raw[i] = proj.output(pacts[i]);
    }

    std::vector<std::vector<float>> draw;
    last_nt_xent = nt_xent_loss<float>(raw, static_cast<float>(cfg.tau), &draw);

    params.zero_grads();
    std::vector<float> denc(nn::EncoderNet<float>::kOut);
    for (int i = 0; i < 2 * b; ++i) {
        proj.backward(eacts[i].out.data(), pacts[i], draw[i], denc.data());
        enc.backward(views[i].data(), eacts[i], denc, nullptr);
    }
    opt.step(params, cfg.learning_rate);
}

void ContrastiveModule::collect(nn::ParamSet<float>& ps) {
    enc.collect(ps, "ctr.enc");
    proj.collect(ps, "ctr.proj");
}

// ---------------------------------------------------------------------------

std::unique_ptr<IntrinsicModule> make_intrinsic(const IntrinsicConfig& cfg, std::uint64_t seed) {
    switch (cfg.algorithm) {
        case Algorithm::Icm: return std::make_unique<IcmModule>(cfg, seed);
        case Algorithm::Rnd: return std::make_unique<RndModule>(cfg, seed);
        default: return std::make_unique<ContrastiveModule>(cfg, seed);
    }
}

void augment_chw(const float* src, float* dst, Rng& rng) {
    const int n = render::kFrameSize;
    float frac = rng.uniform_f32(0.8f, 1.0f);
    float side = frac * static_cast<float>(n);
    float max_off = static_cast<float>(n) - side;
    float ox = rng.uniform_f32(0.0f, 1.0f) * max_off;
    float oy = rng.uniform_f32(0.0f, 1.0f) * max_off;
    float gain = rng.uniform_f32(0.8f, 1.2f);

    float scale = side / static_cast<float>(n);
    for (int c = 0; c < 3; ++c) {
        const float* sp = src + static_cast<std::size_t>(c) * n * n;
        float* dp = dst + static_cast<std::size_t>(c) * n * n;
        for (int y = 0; y < n; ++y) {
            float sy = oy + (static_cast<float>(y) + 0.5f) * scale - 0.5f;
            int y0 = static_cast<int>(std::floor(sy));
            float fy = sy - static_cast<float>(y0);
            int y0c = std::clamp(y0, 0, n - 1);
            int y1c = std::clamp(y0 + 1, 0, n - 1);
            for (int x = 0; x < n; ++x) {
                float sx = ox + (static_cast<float>(x) + 0.5f) * scale - 0.5f;
                int x0 = static_cast<int>(std::floor(sx));
                float fx = sx - static_cast<float>(x0);
                int x0c = std::clamp(x0, 0, n - 1);
                int x1c = std::clamp(x0 + 1, 0, n - 1);
                float v00 = sp[y0c * n + x0c], v01 = sp[y0c * n + x1c];
                float v10 = sp[y1c * n + x0c], v11 = sp[y1c * n + x1c];
                float top = v00 + (v01 - v00) * fx;
                float bot = v10 + (v11 - v10) * fx;
                float v = (top + (bot - top) * fy) * gain;
                dp[y * n + x] = std::clamp(v, 0.0f, 1.0f);
            }
        }
    }
}

RewardStats reward_stats(const std::vector<double>& rewards) {
    if (rewards.empty()) throw std::invalid_argument("reward_stats: empty input");
    RewardStats out;
    out.min = rewards[0];
    out.max = rewards[0];
    double sum = 0.0;
    for (double r : rewards) {
        sum += r;
        if (r < out.min) out.min = r;
        if (r > out.max) out.max = r;
    }
    out.mean = sum / static_cast<double>(rewards.size());
    if (rewards.size() > 1) {
        double ss = 0.0;
        for (double r : rewards) ss += (r - out.mean) * (r - out.mean);
        out.std_dev = std::sqrt(ss / static_cast<double>(rewards.size() - 1));
    }
    return out;
}

}  // namespace nest::intrinsic
