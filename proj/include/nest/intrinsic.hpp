#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nest/detmath.hpp"
#include "nest/nn.hpp"
#include "nest/render.hpp"
#include "nest/rng.hpp"
#include "nest/world.hpp"

namespace nest::intrinsic {

enum class Algorithm { Icm, Rnd, Contrastive };

Algorithm algorithm_from_string(const std::string& s);  // throws ConfigError
std::string algorithm_name(Algorithm a);

struct IntrinsicConfig {
    Algorithm algorithm = Algorithm::Icm;
    double strength = 1.0;
    double gamma = 0.99;
    double learning_rate = 3e-4;
    // icm
    double beta_fwd = 0.2;
    // contrastive
    int memory_k = 1024;
    double tau = 0.5;
    int update_period = 64;
    int pair_batch = 16;
    int replay_capacity = 256;
};

// Welford running variance
struct RunningStd {
    std::int64_t n = 0;
    double mean = 0.0, m2 = 0.0;
    void push(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    // sample std; divisor fallback 1 while undefined or degenerate
    double divisor() const {
        if (n < 2) return 1.0;
        double var = m2 / static_cast<double>(n - 1);
        double sd = std::sqrt(var);
        return sd > 0.0 ? sd : 1.0;
    }
};

// ---------------------------------------------------------------------------
// ICM: embedding encoder phi, forward model on (detached phi(s), one-hot a),
// inverse model on (phi(s), phi(s'))

template <typename T>
struct IcmNets {
    nn::EncoderNet<T> phi;
    nn::Mlp<T> fwd;  // 128+9 -> 128 -> 128
    nn::Mlp<T> inv;  // 256 -> 128 -> 9

    void init(Rng& rng) {
        phi.init(rng);
        fwd.init({nn::EncoderNet<T>::kOut + 9, 128, nn::EncoderNet<T>::kOut}, rng);
        inv.init({2 * nn::EncoderNet<T>::kOut, 128, 9}, rng);
    }
    void collect(nn::ParamSet<T>& ps, const std::string& prefix) {
        phi.collect(ps, prefix + ".phi");
        fwd.collect(ps, prefix + ".fwd");
        inv.collect(ps, prefix + ".inv");
    }
};

template <typename T>
struct IcmStepResult {
    T forward_loss = T(0);  // 1/2 ||f(phi(s),a) - phi(s')||^2, also the raw reward
    T inverse_loss = T(0);  // cross-entropy of the joint action
};

// Computes both losses; when w_fwd/w_inv are nonzero and accumulate is set,
// adds the weighted gradients. The forward loss is detached from the encoder:
// its gradient reaches only the forward-model parameters.
template <typename T>
IcmStepResult<T> icm_losses(IcmNets<T>& nets, const T* s_chw, int joint_action, const T* s2_chw,
                            T w_fwd, T w_inv, bool accumulate) {
    constexpr int kE = nn::EncoderNet<T>::kOut;
    typename nn::EncoderNet<T>::Acts e1, e2;
    nets.phi.forward(s_chw, e1);
    nets.phi.forward(s2_chw, e2);

    std::vector<T> fwd_in(kE + 9, T(0));
    for (int i = 0; i < kE; ++i) fwd_in[i] = e1.out[i];
    fwd_in[kE + joint_action] = T(1);
    typename nn::Mlp<T>::Acts facts;
    nets.fwd.forward(fwd_in.data(), facts);
    const std::vector<T>& pred = nets.fwd.output(facts);

    IcmStepResult<T> out;
    std::vector<T> diff(kE);
    for (int i = 0; i < kE; ++i) {
        diff[i] = pred[i] - e2.out[i];
        out.forward_loss += T(0.5) * diff[i] * diff[i];
    }

    std::vector<T> inv_in(2 * kE);
    for (int i = 0; i < kE; ++i) {
        inv_in[i] = e1.out[i];
        inv_in[kE + i] = e2.out[i];
    }
    typename nn::Mlp<T>::Acts iacts;
    nets.inv.forward(inv_in.data(), iacts);
    const std::vector<T>& logits = nets.inv.output(iacts);
    T lp[9];
    nn::log_softmax(logits.data(), lp, 9);
    out.inverse_loss = -lp[joint_action];

    if (accumulate) {
        if (w_fwd != T(0)) {
            std::vector<T> dpred(kE);
            for (int i = 0; i < kE; ++i) dpred[i] = w_fwd * diff[i];
            nets.fwd.backward(fwd_in.data(), facts, dpred, nullptr);
        }
        if (w_inv != T(0)) {
            T p[9];
            nn::softmax(logits.data(), p, 9);
            std::vector<T> dlog(9);
            for (int i = 0; i < 9; ++i)
                dlog[i] = w_inv * (p[i] - (i == joint_action ? T(1) : T(0)));
            std::vector<T> dinv_in(2 * kE);
            nets.inv.backward(inv_in.data(), iacts, dlog, dinv_in.data());
            std::vector<T> de1(dinv_in.begin(), dinv_in.begin() + kE);
            std::vector<T> de2(dinv_in.begin() + kE, dinv_in.end());
            nets.phi.backward(s_chw, e1, de1, nullptr);
            nets.phi.backward(s2_chw, e2, de2, nullptr);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// RND: loss = 1/2 ||pred(x) - target(x)||^2; gradient into predictor only

template <typename T>
T rnd_predictor_loss(nn::EncoderNet<T>& pred, const nn::EncoderNet<T>& target, const T* x_chw,
                     bool accumulate) {
    typename nn::EncoderNet<T>::Acts pa, ta;
    pred.forward(x_chw, pa);
    target.forward(x_chw, ta);
    T loss = T(0);
    std::vector<T> diff(pa.out.size());
    for (std::size_t i = 0; i < pa.out.size(); ++i) {
        diff[i] = pa.out[i] - ta.out[i];
        loss += T(0.5) * diff[i] * diff[i];
    }
    if (accumulate) pred.backward(x_chw, pa, diff, nullptr);
    return loss;
}

// ---------------------------------------------------------------------------
// NT-Xent over raw (unnormalized) embeddings; rows (2i, 2i+1) are positives

template <typename T>
T l2_normalize(const T* x, int n, T* z) {
    T sq = T(0);
    for (int i = 0; i < n; ++i) sq += x[i] * x[i];
    T norm = static_cast<T>(std::sqrt(static_cast<double>(sq)));
    if (!(norm > T(0))) {
        for (int i = 0; i < n; ++i) z[i] = T(0);
        return T(0);
    }
    T inv = T(1) / norm;
    for (int i = 0; i < n; ++i) z[i] = x[i] * inv;
    return norm;
}

template <typename T>
T nt_xent_loss(const std::vector<std::vector<T>>& raw, T tau,
               std::vector<std::vector<T>>* draw) {
    const int n = static_cast<int>(raw.size());
    const int d = static_cast<int>(raw[0].size());
    std::vector<std::vector<T>> z(n, std::vector<T>(d));
    std::vector<T> norms(n);
    for (int i = 0; i < n; ++i) norms[i] = l2_normalize(raw[i].data(), d, z[i].data());

    std::vector<std::vector<T>> sim(n, std::vector<T>(n, T(0)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            T s = T(0);
            for (int k = 0; k < d; ++k) s += z[i][k] * z[j][k];
            sim[i][j] = s;
        }

    T loss = T(0);
    std::vector<std::vector<T>> dz;
    if (draw != nullptr) dz.assign(n, std::vector<T>(d, T(0)));

    for (int i = 0; i < n; ++i) {
        int pos = (i % 2 == 0) ? i + 1 : i - 1;
        // log-sum-exp over k != i
        T mx = sim[i][pos] / tau;
        for (int k = 0; k < n; ++k)
            if (k != i && sim[i][k] / tau > mx) mx = sim[i][k] / tau;
        T denom = T(0);
        for (int k = 0; k < n; ++k)
            if (k != i) denom += detmath::exp_t(sim[i][k] / tau - mx);
        T lse = detmath::log_t(denom) + mx;
        loss += -(sim[i][pos] / tau) + lse;
        if (draw != nullptr) {
            for (int k = 0; k < n; ++k) {
                if (k == i) continue;
                T a = detmath::exp_t(sim[i][k] / tau - mx) / denom;
                T c = (a - (k == pos ? T(1) : T(0))) / (tau * static_cast<T>(n));
                for (int m = 0; m < d; ++m) {
                    dz[i][m] += c * z[k][m];
                    dz[k][m] += c * z[i][m];
                }
            }
        }
    }
    loss /= static_cast<T>(n);

    if (draw != nullptr) {
        draw->assign(n, std::vector<T>(d, T(0)));
        for (int i = 0; i < n; ++i) {
            if (!(norms[i] > T(0))) continue;
            T proj = T(0);
            for (int m = 0; m < d; ++m) proj += z[i][m] * dz[i][m];
            for (int m = 0; m < d; ++m) (*draw)[i][m] = (dz[i][m] - z[i][m] * proj) / norms[i];
        }
    }
    return loss;
}

// ---------------------------------------------------------------------------
// runtime modules

class IntrinsicModule {
  public:
    virtual ~IntrinsicModule() = default;
    // observe one transition, return the reward, take one learning step
    virtual float step(const float* s_chw, world::Action a, const float* s2_chw) = 0;
    // every tensor that belongs in a checkpoint (frozen ones included)
    virtual void collect(nn::ParamSet<float>& ps) = 0;
    virtual Algorithm algorithm() const = 0;
};

class IcmModule : public IntrinsicModule {
  public:
    IcmModule(const IntrinsicConfig& cfg, std::uint64_t seed);
    float step(const float* s_chw, world::Action a, const float* s2_chw) override;
    void collect(nn::ParamSet<float>& ps) override;
    Algorithm algorithm() const override { return Algorithm::Icm; }

    IntrinsicConfig cfg;
    IcmNets<float> nets;
    nn::ParamSet<float> params;
    nn::Adam<float> opt;
    float last_forward_loss = 0, last_inverse_loss = 0;
};

class RndModule : public IntrinsicModule {
  public:
    RndModule(const IntrinsicConfig& cfg, std::uint64_t seed);
    float step(const float* s_chw, world::Action a, const float* s2_chw) override;
    void collect(nn::ParamSet<float>& ps) override;
    Algorithm algorithm() const override { return Algorithm::Rnd; }

    // raw squared error against the frozen target, no learning, no normalizer push
    double raw_error(const float* s_chw);
    std::uint64_t target_hash() const;

    IntrinsicConfig cfg;
    nn::EncoderNet<float> target, predictor;
    nn::ParamSet<float> pred_params;
    nn::Adam<float> opt;
    RunningStd normalizer;
};

class ContrastiveModule : public IntrinsicModule {
  public:
    ContrastiveModule(const IntrinsicConfig& cfg, std::uint64_t seed);
    float step(const float* s_chw, world::Action a, const float* s2_chw) override;
    void collect(nn::ParamSet<float>& ps) override;
    Algorithm algorithm() const override { return Algorithm::Contrastive; }

    // reward for a frame with current weights and memory, no side effects
    float peek_reward(const float* s_chw);

    IntrinsicConfig cfg;
    nn::EncoderNet<float> enc;
    nn::Mlp<float> proj;  // 128 -> 128 -> 128
    nn::ParamSet<float> params;
    nn::Adam<float> opt;
    std::vector<std::vector<float>> memory;  // normalized projections, FIFO
    std::size_t memory_head = 0;
    std::vector<std::vector<float>> replay;  // recent raw frames (chw)
    std::size_t replay_head = 0;
    std::int64_t step_count = 0;
    Rng aug_rng;
    float last_nt_xent = 0;

  private:
    void project(const float* s_chw, std::vector<float>& z_out);
    void nt_xent_update();
};

std::unique_ptr<IntrinsicModule> make_intrinsic(const IntrinsicConfig& cfg, std::uint64_t seed);

// per-episode reward summary; std is the sample standard deviation (0 when
// fewer than two rewards)
struct RewardStats {
    double mean = 0, min = 0, max = 0, std_dev = 0;
};
RewardStats reward_stats(const std::vector<double>& rewards);  // throws on empty input

// random crop (side fraction 0.8-1.0, bilinear resize back) + multiplicative
// brightness in [0.8, 1.2], clamped to [0,1]; operates on planar [3][96][96]
void augment_chw(const float* src, float* dst, Rng& rng);

}  // namespace nest::intrinsic
