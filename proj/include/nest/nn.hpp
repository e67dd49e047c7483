#pragma once

// Minimal neural substrate: explicit forward/backward passes, no autodiff.
// Everything is templated on the scalar type so tests can instantiate the
// exact same code in double precision for finite-difference checks while
// the runtime uses float.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nest/detmath.hpp"
#include "nest/rng.hpp"

namespace nest::nn {

template <typename T>
struct ParamRef {
    std::string name;
    std::vector<T>* value = nullptr;
    std::vector<T>* grad = nullptr;
    std::vector<int> shape;
};

template <typename T>
struct ParamSet {
    std::vector<ParamRef<T>> params;

    void add(const std::string& name, std::vector<T>& value, std::vector<T>& grad,
             std::vector<int> shape) {
        params.push_back({name, &value, &grad, std::move(shape)});
    }
    void zero_grads() {
        for (auto& p : params) std::fill(p.grad->begin(), p.grad->end(), T(0));
    }
    std::size_t total_size() const {
        std::size_t n = 0;
        for (const auto& p : params) n += p.value->size();
        return n;
    }
    bool all_finite() const {
        for (const auto& p : params)
            for (T x : *p.value)
                if (!std::isfinite(static_cast<double>(x))) return false;
        return true;
    }
};

template <typename T>
T uniform_scalar(Rng& rng, double lo, double hi) {
    return static_cast<T>(rng.uniform(lo, hi));
}

// ---------------------------------------------------------------------------
// layers

template <typename T>
struct Dense {
    int in = 0, out = 0;
    std::vector<T> w, b, gw, gb;  // w row-major [out][in]

    void init(int in_, int out_, Rng& rng) {
        in = in_;
        out = out_;
        w.resize(static_cast<std::size_t>(in) * out);
        gw.assign(w.size(), T(0));
        b.assign(out, T(0));
        gb.assign(out, T(0));
        double limit = std::sqrt(6.0 / in);
        for (auto& x : w) x = uniform_scalar<T>(rng, -limit, limit);
    }

    void forward(const T* x, T* y) const {
        for (int o = 0; o < out; ++o) {
            const T* wr = w.data() + static_cast<std::size_t>(o) * in;
            T acc = b[o];
            for (int i = 0; i < in; ++i) acc += wr[i] * x[i];
            y[o] = acc;
        }
    }

    // accumulates gw/gb; writes dx if non-null (overwrites)
    void backward(const T* x, const T* dy, T* dx) {
        if (dx != nullptr)
            for (int i = 0; i < in; ++i) dx[i] = T(0);
        for (int o = 0; o < out; ++o) {
            T d = dy[o];
            gb[o] += d;
            T* gr = gw.data() + static_cast<std::size_t>(o) * in;
            const T* wr = w.data() + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) gr[i] += d * x[i];
            if (dx != nullptr)
                for (int i = 0; i < in; ++i) dx[i] += wr[i] * d;
        }
    }

    void collect(ParamSet<T>& ps, const std::string& prefix) {
        ps.add(prefix + ".w", w, gw, {out, in});
        ps.add(prefix + ".b", b, gb, {out});
    }
};

template <typename T>
struct Conv2d {
    int in_ch = 0, out_ch = 0, k = 0, stride = 1;
    std::vector<T> w, b, gw, gb;  // w [out_ch][in_ch][k][k]

    static int out_dim(int in_dim, int k, int stride) { return (in_dim - k) / stride + 1; }

    void init(int in_ch_, int out_ch_, int k_, int stride_, Rng& rng) {
        in_ch = in_ch_;
        out_ch = out_ch_;
        k = k_;
        stride = stride_;
        w.resize(static_cast<std::size_t>(out_ch) * in_ch * k * k);
        gw.assign(w.size(), T(0));
        b.assign(out_ch, T(0));
        gb.assign(out_ch, T(0));
        double limit = std::sqrt(6.0 / (static_cast<double>(in_ch) * k * k));
        for (auto& x : w) x = uniform_scalar<T>(rng, -limit, limit);
    }

    // x: [in_ch][h][wd], y: [out_ch][oh][ow]
    void forward(const T* x, int h, int wd, T* y) const {
        int oh = out_dim(h, k, stride), ow = out_dim(wd, k, stride);
        for (int oc = 0; oc < out_ch; ++oc) {
            T* yp = y + static_cast<std::size_t>(oc) * oh * ow;
            for (int i = 0; i < oh * ow; ++i) yp[i] = b[oc];
            for (int ic = 0; ic < in_ch; ++ic) {
                const T* xp = x + static_cast<std::size_t>(ic) * h * wd;
                const T* wp = w.data() + (static_cast<std::size_t>(oc) * in_ch + ic) * k * k;
                for (int ky = 0; ky < k; ++ky) {
                    for (int kx = 0; kx < k; ++kx) {
                        T wv = wp[ky * k + kx];
                        for (int oy = 0; oy < oh; ++oy) {
                            const T* xrow = xp + (oy * stride + ky) * wd + kx;
                            T* yrow = yp + oy * ow;
                            for (int ox = 0; ox < ow; ++ox) yrow[ox] += wv * xrow[ox * stride];
                        }
                    }
                }
            }
        }
    }

    // accumulates gw/gb; writes dx if non-null (overwrites)
    void backward(const T* x, int h, int wd, const T* dy, T* dx) {
        int oh = out_dim(h, k, stride), ow = out_dim(wd, k, stride);
        if (dx != nullptr) {
            std::size_t n = static_cast<std::size_t>(in_ch) * h * wd;
            for (std::size_t i = 0; i < n; ++i) dx[i] = T(0);
        }
        for (int oc = 0; oc < out_ch; ++oc) {
            const T* dyp = dy + static_cast<std::size_t>(oc) * oh * ow;
            T acc = T(0);
            for (int i = 0; i < oh * ow; ++i) acc += dyp[i];
            gb[oc] += acc;
            for (int ic = 0; ic < in_ch; ++ic) {
                const T* xp = x + static_cast<std::size_t>(ic) * h * wd;
                T* dxp = dx == nullptr ? nullptr : dx + static_cast<std::size_t>(ic) * h * wd;
                T* gwp = gw.data() + (static_cast<std::size_t>(oc) * in_ch + ic) * k * k;
                const T* wp = w.data() + (static_cast<std::size_t>(oc) * in_ch + ic) * k * k;
                for (int ky = 0; ky < k; ++ky) {
                    for (int kx = 0; kx < k; ++kx) {
                        T gacc = T(0);
                        T wv = wp[ky * k + kx];
                        for (int oy = 0; oy < oh; ++oy) {
                            const T* xrow = xp + (oy * stride + ky) * wd + kx;
                            const T* dyrow = dyp + oy * ow;
                            for (int ox = 0; ox < ow; ++ox) gacc += dyrow[ox] * xrow[ox * stride];
                        }
                        gwp[ky * k + kx] += gacc;
                        if (dxp != nullptr) {
                            for (int oy = 0; oy < oh; ++oy) {
                                T* dxrow = dxp + (oy * stride + ky) * wd + kx;
                                const T* dyrow = dyp + oy * ow;
                                for (int ox = 0; ox < ow; ++ox) dxrow[ox * stride] += wv * dyrow[ox];
                            }
                        }
                    }
                }
            }
        }
    }

    void collect(ParamSet<T>& ps, const std::string& prefix) {
        ps.add(prefix + ".w", w, gw, {out_ch, in_ch, k, k});
        ps.add(prefix + ".b", b, gb, {out_ch});
    }
};

template <typename T>
void relu_forward(const T* x, T* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

// y is the post-activation output; subgradient at 0 is 0
template <typename T>
void relu_backward_inplace(const T* y, T* dy, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!(y[i] > T(0))) dy[i] = T(0);
}

template <typename T>
void softmax(const T* logits, T* p, int n) {
    T mx = logits[0];
    for (int i = 1; i < n; ++i) mx = logits[i] > mx ? logits[i] : mx;
    T sum = T(0);
    for (int i = 0; i < n; ++i) {
        p[i] = detmath::exp_t(logits[i] - mx);
        sum += p[i];
    }
    T inv = T(1) / sum;
    for (int i = 0; i < n; ++i) p[i] *= inv;
}

template <typename T>
void log_softmax(const T* logits, T* lp, int n) {
    T mx = logits[0];
    for (int i = 1; i < n; ++i) mx = logits[i] > mx ? logits[i] : mx;
    T sum = T(0);
    for (int i = 0; i < n; ++i) sum += detmath::exp_t(logits[i] - mx);
    T lse = detmath::log_t(sum) + mx;
    for (int i = 0; i < n; ++i) lp[i] = logits[i] - lse;
}

template <typename T>
int sample_categorical(const T* probs, int n, Rng& rng) {
    T r = static_cast<T>(rng.next_f64());
    T cum = T(0);
    for (int i = 0; i < n; ++i) {
        cum += probs[i];
        if (r < cum) return i;
    }
    return n - 1;
}

// ---------------------------------------------------------------------------
// small multi-layer perceptron: ReLU between layers, raw output at the end

template <typename T>
struct Mlp {
    std::vector<Dense<T>> layers;

    void init(const std::vector<int>& sizes, Rng& rng) {
        layers.resize(sizes.size() - 1);
        for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
            layers[i].init(sizes[i], sizes[i + 1], rng);
    }

    struct Acts {
        std::vector<std::vector<T>> h;  // output of each layer (hidden ones post-ReLU)
    };

    void forward(const T* x, Acts& a) const {
        a.h.resize(layers.size());
        const T* cur = x;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            a.h[i].resize(layers[i].out);
            layers[i].forward(cur, a.h[i].data());
            if (i + 1 < layers.size()) relu_forward(a.h[i].data(), a.h[i].data(), a.h[i].size());
            cur = a.h[i].data();
        }
    }

    const std::vector<T>& output(const Acts& a) const { return a.h.back(); }

    // dout: gradient w.r.t. the raw last-layer output; dx optional
    void backward(const T* x, Acts& a, const std::vector<T>& dout, T* dx) {
        std::vector<T> dcur = dout;
        for (std::size_t ii = layers.size(); ii-- > 0;) {
            const T* input = ii == 0 ? x : a.h[ii - 1].data();
            std::vector<T> dprev(ii == 0 ? 0 : layers[ii - 1].out);
            layers[ii].backward(input, dcur.data(), ii == 0 ? dx : dprev.data());
            if (ii > 0) {
                relu_backward_inplace(a.h[ii - 1].data(), dprev.data(), dprev.size());
                dcur = std::move(dprev);
            }
        }
    }

    void collect(ParamSet<T>& ps, const std::string& prefix) {
        for (std::size_t i = 0; i < layers.size(); ++i)
            layers[i].collect(ps, prefix + ".l" + std::to_string(i));
    }
};

// ---------------------------------------------------------------------------
// the shared two-conv visual encoder: 96x96x3 -> 128

template <typename T>
struct EncoderNet {
    static constexpr int kInC = 3, kInDim = 96;
    static constexpr int kC1 = 16, kK1 = 8, kS1 = 4;
    static constexpr int kC2 = 32, kK2 = 4, kS2 = 2;
    static constexpr int kD1 = (kInDim - kK1) / kS1 + 1;  // 23
    static constexpr int kD2 = (kD1 - kK2) / kS2 + 1;     // 10
    static constexpr int kFlat = kC2 * kD2 * kD2;         // 3200
    static constexpr int kOut = 128;

    Conv2d<T> conv1, conv2;
    Dense<T> fc;

    void init(Rng& rng) {
        conv1.init(kInC, kC1, kK1, kS1, rng);
        conv2.init(kC1, kC2, kK2, kS2, rng);
        fc.init(kFlat, kOut, rng);
    }

    struct Acts {
        std::vector<T> r1, r2, out;  // post-ReLU activations
        Acts()
            : r1(static_cast<std::size_t>(kC1) * kD1 * kD1),
              r2(static_cast<std::size_t>(kC2) * kD2 * kD2),
              out(kOut) {}
    };

    // x: [3][96][96]
    void forward(const T* x, Acts& a) const {
        conv1.forward(x, kInDim, kInDim, a.r1.data());
        relu_forward(a.r1.data(), a.r1.data(), a.r1.size());
        conv2.forward(a.r1.data(), kD1, kD1, a.r2.data());
        relu_forward(a.r2.data(), a.r2.data(), a.r2.size());
        fc.forward(a.r2.data(), a.out.data());
        relu_forward(a.out.data(), a.out.data(), a.out.size());
    }

    // dout modified in place; dx optional ([3][96][96])
    void backward(const T* x, Acts& a, std::vector<T>& dout, T* dx) {
        relu_backward_inplace(a.out.data(), dout.data(), dout.size());
        std::vector<T> dr2(a.r2.size());
        fc.backward(a.r2.data(), dout.data(), dr2.data());
        relu_backward_inplace(a.r2.data(), dr2.data(), dr2.size());
        std::vector<T> dr1(a.r1.size());
        conv2.backward(a.r1.data(), kD1, kD1, dr2.data(), dr1.data());
        relu_backward_inplace(a.r1.data(), dr1.data(), dr1.size());
        conv1.backward(x, kInDim, kInDim, dr1.data(), dx);
    }

    void collect(ParamSet<T>& ps, const std::string& prefix) {
        conv1.collect(ps, prefix + ".conv1");
        conv2.collect(ps, prefix + ".conv2");
        fc.collect(ps, prefix + ".fc");
    }
};

// ---------------------------------------------------------------------------
// policy/value network: encoder -> 2 hidden layers of 128 -> 3 heads

template <typename T>
struct PolicyNet {
    EncoderNet<T> enc;
    Dense<T> h1, h2, head_t, head_r, head_v;

    void init(Rng& rng) {
        enc.init(rng);
        h1.init(EncoderNet<T>::kOut, 128, rng);
        h2.init(128, 128, rng);
        head_t.init(128, 3, rng);
        head_r.init(128, 3, rng);
        head_v.init(128, 1, rng);
    }

    struct Acts {
        typename EncoderNet<T>::Acts enc;
        std::vector<T> a1, a2;  // post-ReLU
        T logits_t[3] = {}, logits_r[3] = {};
        T value = T(0);
        Acts() : a1(128), a2(128) {}
    };

    void forward(const T* x, Acts& a) const {
        enc.forward(x, a.enc);
        h1.forward(a.enc.out.data(), a.a1.data());
        relu_forward(a.a1.data(), a.a1.data(), a.a1.size());
        h2.forward(a.a1.data(), a.a2.data());
        relu_forward(a.a2.data(), a.a2.data(), a.a2.size());
        head_t.forward(a.a2.data(), a.logits_t);
        head_r.forward(a.a2.data(), a.logits_r);
        T v;
        head_v.forward(a.a2.data(), &v);
        a.value = v;
    }

    void backward(const T* x, Acts& a, const T dlt[3], const T dlr[3], T dv) {
        std::vector<T> da2(128, T(0));
        std::vector<T> tmp(128);
        head_t.backward(a.a2.data(), dlt, tmp.data());
        for (int i = 0; i < 128; ++i) da2[i] += tmp[i];
        head_r.backward(a.a2.data(), dlr, tmp.data());
        for (int i = 0; i < 128; ++i) da2[i] += tmp[i];
        head_v.backward(a.a2.data(), &dv, tmp.data());
        for (int i = 0; i < 128; ++i) da2[i] += tmp[i];
        relu_backward_inplace(a.a2.data(), da2.data(), da2.size());
        std::vector<T> da1(128);
        h2.backward(a.a1.data(), da2.data(), da1.data());
        relu_backward_inplace(a.a1.data(), da1.data(), da1.size());
        std::vector<T> denc(EncoderNet<T>::kOut);
        h1.backward(a.enc.out.data(), da1.data(), denc.data());
        enc.backward(x, a.enc, denc, nullptr);
    }

    void collect(ParamSet<T>& ps, const std::string& prefix) {
        enc.collect(ps, prefix + ".enc");
        h1.collect(ps, prefix + ".h1");
        h2.collect(ps, prefix + ".h2");
        head_t.collect(ps, prefix + ".head_t");
        head_r.collect(ps, prefix + ".head_r");
        head_v.collect(ps, prefix + ".head_v");
    }
};

// ---------------------------------------------------------------------------
// Adam; moment arithmetic in double regardless of T

template <typename T>
struct Adam {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-7;
    std::int64_t t = 0;
    double b1t = 1.0, b2t = 1.0;  // running beta powers
    std::vector<std::vector<double>> m, v;

    void attach(const ParamSet<T>& ps) {
        m.clear();
        v.clear();
        for (const auto& p : ps.params) {
            m.emplace_back(p.value->size(), 0.0);
            v.emplace_back(p.value->size(), 0.0);
        }
    }

    void step(ParamSet<T>& ps, double lr) {
        ++t;
        b1t *= beta1;
        b2t *= beta2;
        double c1 = 1.0 - b1t, c2 = 1.0 - b2t;
        for (std::size_t i = 0; i < ps.params.size(); ++i) {
            auto& w = *ps.params[i].value;
            auto& g = *ps.params[i].grad;
            auto& mi = m[i];
            auto& vi = v[i];
            for (std::size_t j = 0; j < w.size(); ++j) {
                double gj = static_cast<double>(g[j]);
                mi[j] = beta1 * mi[j] + (1.0 - beta1) * gj;
                vi[j] = beta2 * vi[j] + (1.0 - beta2) * gj * gj;
                double upd = lr * (mi[j] / c1) / (std::sqrt(vi[j] / c2) + eps);
                w[j] = static_cast<T>(static_cast<double>(w[j]) - upd);
            }
        }
    }
};

}  // namespace nest::nn
