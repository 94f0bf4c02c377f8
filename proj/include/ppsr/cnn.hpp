#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppsr/image.hpp"
#include "ppsr/rng.hpp"
#include "ppsr/util.hpp"

namespace ppsr {

// Desk-scale symmetric encoder-decoder residual denoiser, trained from
// scratch. Encoder blocks are stride-2 convolutions (+ batch norm + ReLU)
// that raise channel counts while halving the spatial dimensions; decoder
// blocks are stride-2 transposed convolutions that mirror them, with
// elementwise skip additions between matching levels. The network predicts
// the noise component, so the denoised estimate is input minus output.
// All convolutions use circular boundaries.

struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_, double fill = 0.0)
        : n(n_), c(c_), h(h_), w(w_), v(std::size_t(n_) * c_ * h_ * w_, fill) {}

    double& at(int in, int ic, int y, int x) {
        return v[((std::size_t(in) * c + ic) * h + y) * w + x];
    }
    double at(int in, int ic, int y, int x) const {
        return v[((std::size_t(in) * c + ic) * h + y) * w + x];
    }
    std::size_t size() const { return v.size(); }
};

struct ConvParams {
    int in_c = 0, out_c = 0, k = 3;
    std::vector<double> w;  // conv: (out_c, in_c, k, k); deconv: (in_c, out_c, k, k)
    std::vector<double> b;  // per output channel
};

struct BnParams {
    int c = 0;
    std::vector<double> gamma, beta, run_mean, run_var;
    static constexpr double eps = 1e-5;
};

struct CnnModel {
    std::vector<int> channels;  // encoder output channels per block
    int ksize = 3;
    std::vector<ConvParams> enc_conv;
    std::vector<BnParams> enc_bn;
    std::vector<ConvParams> dec_conv;
    std::vector<BnParams> dec_bn;
    ConvParams final_conv;  // stride 1, maps to one channel, no activation
    double bn_momentum = 0.9;

    int num_blocks() const { return int(channels.size()); }
    int spatial_divisor() const { return 1 << num_blocks(); }

    bool loaded() const { return !channels.empty(); }
};

// Channel plan: decoder block j mirrors encoder activation B-1-j, so its
// output channel count equals that activation's; the deepest decoder block
// has no 1-channel mirror and reuses the first encoder width.
inline int decoder_out_channels(const std::vector<int>& ch, int j) {
    const int b = int(ch.size());
    return j <= b - 2 ? ch[b - 2 - j] : ch[0];
}

namespace detail {

inline void he_init(std::vector<double>& w, int fan_in, NormalSampler& rng) {
    const double std = std::sqrt(2.0 / double(fan_in));
    for (double& x : w) x = std * rng.normal();
}

}  // namespace detail

inline CnnModel make_cnn_model(const std::vector<int>& channels, int ksize, std::uint64_t seed) {
    if (channels.empty()) throw std::invalid_argument("make_cnn_model: need at least one block");
    for (int c : channels)
        if (c <= 0) throw std::invalid_argument("make_cnn_model: channel counts must be positive");
    if (ksize <= 0 || ksize % 2 == 0)
        throw std::invalid_argument("make_cnn_model: kernel size must be odd positive");

    CnnModel m;
    m.channels = channels;
    m.ksize = ksize;
    NormalSampler rng(seed);
    const int b = m.num_blocks();

    for (int i = 0; i < b; ++i) {
        ConvParams conv;
        conv.in_c = i == 0 ? 1 : channels[i - 1];
        conv.out_c = channels[i];
        conv.k = ksize;
        conv.w.resize(std::size_t(conv.out_c) * conv.in_c * ksize * ksize);
        conv.b.assign(conv.out_c, 0.0);
        detail::he_init(conv.w, conv.in_c * ksize * ksize, rng);
        m.enc_conv.push_back(std::move(conv));

        BnParams bn;
        bn.c = channels[i];
        bn.gamma.assign(bn.c, 1.0);
        bn.beta.assign(bn.c, 0.0);
        bn.run_mean.assign(bn.c, 0.0);
        bn.run_var.assign(bn.c, 1.0);
        m.enc_bn.push_back(std::move(bn));
    }
    for (int j = 0; j < b; ++j) {
        ConvParams conv;
        conv.in_c = j == 0 ? channels[b - 1] : decoder_out_channels(channels, j - 1);
        conv.out_c = decoder_out_channels(channels, j);
        conv.k = ksize;
        conv.w.resize(std::size_t(conv.in_c) * conv.out_c * ksize * ksize);
        conv.b.assign(conv.out_c, 0.0);
        detail::he_init(conv.w, conv.in_c * ksize * ksize, rng);
        m.dec_conv.push_back(std::move(conv));

        BnParams bn;
        bn.c = conv.out_c;
        bn.gamma.assign(bn.c, 1.0);
        bn.beta.assign(bn.c, 0.0);
        bn.run_mean.assign(bn.c, 0.0);
        bn.run_var.assign(bn.c, 1.0);
        m.dec_bn.push_back(std::move(bn));
    }
    m.final_conv.in_c = decoder_out_channels(channels, b - 1);
    m.final_conv.out_c = 1;
    m.final_conv.k = ksize;
    m.final_conv.w.resize(std::size_t(m.final_conv.in_c) * ksize * ksize);
    m.final_conv.b.assign(1, 0.0);
    detail::he_init(m.final_conv.w, m.final_conv.in_c * ksize * ksize, rng);
    return m;
}

// Trainable arrays in their documented order: per encoder block conv weight,
// conv bias, bn gamma, bn beta; decoder blocks likewise; then the final
// convolution's weight and bias. Running statistics are not trainable.
inline std::vector<std::vector<double>*> trainable_arrays(CnnModel& m) {
    std::vector<std::vector<double>*> out;
    for (int i = 0; i < m.num_blocks(); ++i) {
        out.push_back(&m.enc_conv[i].w);
        out.push_back(&m.enc_conv[i].b);
        out.push_back(&m.enc_bn[i].gamma);
        out.push_back(&m.enc_bn[i].beta);
    }
    for (int j = 0; j < m.num_blocks(); ++j) {
        out.push_back(&m.dec_conv[j].w);
        out.push_back(&m.dec_conv[j].b);
        out.push_back(&m.dec_bn[j].gamma);
        out.push_back(&m.dec_bn[j].beta);
    }
    out.push_back(&m.final_conv.w);
    out.push_back(&m.final_conv.b);
    return out;
}

inline std::vector<const std::vector<double>*> trainable_arrays(const CnnModel& m) {
    auto mutable_view = trainable_arrays(const_cast<CnnModel&>(m));
    return {mutable_view.begin(), mutable_view.end()};
}

inline std::size_t param_count(CnnModel& m) {
    std::size_t n = 0;
    for (auto* a : trainable_arrays(m)) n += a->size();
    return n;
}

inline CnnModel clone_zeroed(const CnnModel& m) {
    CnnModel z = m;
    for (auto* a : trainable_arrays(z)) std::fill(a->begin(), a->end(), 0.0);
    return z;
}

// ---- layer primitives ---------------------------------------------------------

namespace detail {

// Index tables for circular strided access: tap u of output row i reads input
// row table[i*k + u].
inline std::vector<int> stride_taps(int out_n, int in_n, int stride, int k) {
    std::vector<int> t(std::size_t(out_n) * k);
    const int c = k / 2;
    for (int i = 0; i < out_n; ++i)
        for (int u = 0; u < k; ++u)
            t[std::size_t(i) * k + u] = wrap_index(stride * i + u - c, in_n);
    return t;
}

inline Tensor conv2d(const Tensor& in, const ConvParams& p, int stride) {
    const int ho = in.h / stride, wo = in.w / stride, k = p.k;
    Tensor out(in.n, p.out_c, ho, wo);
    const auto rows = stride_taps(ho, in.h, stride, k);
    const auto cols = stride_taps(wo, in.w, stride, k);
    for (int n = 0; n < in.n; ++n) {
        for (int oc = 0; oc < p.out_c; ++oc) {
            const double* wbase = &p.w[std::size_t(oc) * p.in_c * k * k];
            for (int i = 0; i < ho; ++i) {
                for (int j = 0; j < wo; ++j) {
                    double acc = p.b[oc];
                    for (int ic = 0; ic < p.in_c; ++ic) {
                        const double* wic = wbase + std::size_t(ic) * k * k;
                        for (int u = 0; u < k; ++u) {
                            const int si = rows[std::size_t(i) * k + u];
                            const double* row = &in.v[((std::size_t(n) * in.c + ic) * in.h + si) * in.w];
                            for (int v = 0; v < k; ++v)
                                acc += wic[u * k + v] * row[cols[std::size_t(j) * k + v]];
                        }
                    }
                    out.at(n, oc, i, j) = acc;
                }
            }
        }
    }
    return out;
}

inline void conv2d_backward(const Tensor& in, const ConvParams& p, int stride,
                            const Tensor& gout, Tensor* gin, ConvParams& gp) {
    const int ho = gout.h, wo = gout.w, k = p.k;
    const auto rows = stride_taps(ho, in.h, stride, k);
    const auto cols = stride_taps(wo, in.w, stride, k);
    for (int n = 0; n < in.n; ++n) {
        for (int oc = 0; oc < p.out_c; ++oc) {
            double* gwbase = &gp.w[std::size_t(oc) * p.in_c * k * k];
            const double* wbase = &p.w[std::size_t(oc) * p.in_c * k * k];
            for (int i = 0; i < ho; ++i) {
                for (int j = 0; j < wo; ++j) {
                    const double g = gout.at(n, oc, i, j);
                    gp.b[oc] += g;
                    for (int ic = 0; ic < p.in_c; ++ic) {
                        double* gwic = gwbase + std::size_t(ic) * k * k;
                        const double* wic = wbase + std::size_t(ic) * k * k;
                        for (int u = 0; u < k; ++u) {
                            const int si = rows[std::size_t(i) * k + u];
                            const double* irow = &in.v[((std::size_t(n) * in.c + ic) * in.h + si) * in.w];
                            double* grow = gin ? &gin->v[((std::size_t(n) * in.c + ic) * in.h + si) * in.w]
                                               : nullptr;
                            for (int v = 0; v < k; ++v) {
                                const int sj = cols[std::size_t(j) * k + v];
                                gwic[u * k + v] += g * irow[sj];
                                if (grow) grow[sj] += g * wic[u * k + v];
                            }
                        }
                    }
                }
            }
        }
    }
}

// Transposed convolution: scatters each input pixel through the kernel onto a
// stride-times larger output. Weight layout (in_c, out_c, k, k).
inline Tensor deconv2d(const Tensor& in, const ConvParams& p, int stride) {
    const int ho = in.h * stride, wo = in.w * stride, k = p.k;
    Tensor out(in.n, p.out_c, ho, wo);
    const auto rows = stride_taps(in.h, ho, stride, k);
    const auto cols = stride_taps(in.w, wo, stride, k);
    for (int n = 0; n < in.n; ++n) {
        for (int ic = 0; ic < p.in_c; ++ic) {
            const double* wbase = &p.w[std::size_t(ic) * p.out_c * k * k];
            for (int i = 0; i < in.h; ++i) {
                for (int j = 0; j < in.w; ++j) {
                    const double x = in.at(n, ic, i, j);
                    for (int oc = 0; oc < p.out_c; ++oc) {
                        const double* woc = wbase + std::size_t(oc) * k * k;
                        for (int u = 0; u < k; ++u) {
                            const int oi = rows[std::size_t(i) * k + u];
                            double* orow = &out.v[((std::size_t(n) * out.c + oc) * ho + oi) * wo];
                            for (int v = 0; v < k; ++v)
                                orow[cols[std::size_t(j) * k + v]] += x * woc[u * k + v];
                        }
                    }
                }
            }
        }
    }
    for (int n = 0; n < in.n; ++n)
        for (int oc = 0; oc < p.out_c; ++oc) {
            double* base = &out.v[(std::size_t(n) * out.c + oc) * ho * wo];
            for (int i = 0; i < ho * wo; ++i) base[i] += p.b[oc];
        }
    return out;
}

inline void deconv2d_backward(const Tensor& in, const ConvParams& p, int stride,
                              const Tensor& gout, Tensor* gin, ConvParams& gp) {
    const int ho = gout.h, wo = gout.w, k = p.k;
    const auto rows = stride_taps(in.h, ho, stride, k);
    const auto cols = stride_taps(in.w, wo, stride, k);
    for (int n = 0; n < in.n; ++n) {
        for (int ic = 0; ic < p.in_c; ++ic) {
            const double* wbase = &p.w[std::size_t(ic) * p.out_c * k * k];
            double* gwbase = &gp.w[std::size_t(ic) * p.out_c * k * k];
            for (int i = 0; i < in.h; ++i) {
                for (int j = 0; j < in.w; ++j) {
                    const double x = in.at(n, ic, i, j);
                    double acc = 0.0;
                    for (int oc = 0; oc < p.out_c; ++oc) {
                        const double* woc = wbase + std::size_t(oc) * k * k;
                        double* gwoc = gwbase + std::size_t(oc) * k * k;
                        for (int u = 0; u < k; ++u) {
                            const int oi = rows[std::size_t(i) * k + u];
                            const double* grow = &gout.v[((std::size_t(n) * gout.c + oc) * ho + oi) * wo];
                            for (int v = 0; v < k; ++v) {
                                const double g = grow[cols[std::size_t(j) * k + v]];
                                acc += g * woc[u * k + v];
                                gwoc[u * k + v] += g * x;
                            }
                        }
                    }
                    if (gin) gin->at(n, ic, i, j) = acc;
                }
            }
        }
    }
    for (int n = 0; n < gout.n; ++n)
        for (int oc = 0; oc < p.out_c; ++oc) {
            const double* base = &gout.v[(std::size_t(n) * gout.c + oc) * ho * wo];
            double acc = 0.0;
            for (int i = 0; i < ho * wo; ++i) acc += base[i];
            gp.b[oc] += acc;
        }
}

struct BnCache {
    Tensor xhat;
    std::vector<double> inv_std;
};

inline Tensor bn_forward_train(const Tensor& in, BnParams& p, BnCache& cache,
                               double momentum, bool update_running) {
    const std::size_t plane = std::size_t(in.h) * in.w;
    const double m = double(in.n) * double(plane);
    Tensor out(in.n, in.c, in.h, in.w);
    cache.xhat = Tensor(in.n, in.c, in.h, in.w);
    cache.inv_std.assign(in.c, 0.0);
    for (int c = 0; c < in.c; ++c) {
        double mean = 0.0;
        for (int n = 0; n < in.n; ++n) {
            const double* base = &in.v[(std::size_t(n) * in.c + c) * plane];
            for (std::size_t i = 0; i < plane; ++i) mean += base[i];
        }
        mean /= m;
        double var = 0.0;
        for (int n = 0; n < in.n; ++n) {
            const double* base = &in.v[(std::size_t(n) * in.c + c) * plane];
            for (std::size_t i = 0; i < plane; ++i) {
                const double d = base[i] - mean;
                var += d * d;
            }
        }
        var /= m;
        const double inv_std = 1.0 / std::sqrt(var + BnParams::eps);
        cache.inv_std[c] = inv_std;
        if (update_running) {
            p.run_mean[c] = momentum * p.run_mean[c] + (1.0 - momentum) * mean;
            p.run_var[c] = momentum * p.run_var[c] + (1.0 - momentum) * var;
        }
        const double g = p.gamma[c], b = p.beta[c];
        for (int n = 0; n < in.n; ++n) {
            const double* base = &in.v[(std::size_t(n) * in.c + c) * plane];
            double* xb = &cache.xhat.v[(std::size_t(n) * in.c + c) * plane];
            double* ob = &out.v[(std::size_t(n) * in.c + c) * plane];
            for (std::size_t i = 0; i < plane; ++i) {
                xb[i] = (base[i] - mean) * inv_std;
                ob[i] = g * xb[i] + b;
            }
        }
    }
    return out;
}

inline Tensor bn_forward_eval(const Tensor& in, const BnParams& p) {
    const std::size_t plane = std::size_t(in.h) * in.w;
    Tensor out(in.n, in.c, in.h, in.w);
    for (int c = 0; c < in.c; ++c) {
        const double inv_std = 1.0 / std::sqrt(p.run_var[c] + BnParams::eps);
        const double g = p.gamma[c], b = p.beta[c], mean = p.run_mean[c];
        for (int n = 0; n < in.n; ++n) {
            const double* base = &in.v[(std::size_t(n) * in.c + c) * plane];
            double* ob = &out.v[(std::size_t(n) * in.c + c) * plane];
            for (std::size_t i = 0; i < plane; ++i) ob[i] = g * (base[i] - mean) * inv_std + b;
        }
    }
    return out;
}

inline Tensor bn_backward(const BnParams& p, const BnCache& cache, const Tensor& gout,
                          BnParams& gp) {
    const std::size_t plane = std::size_t(gout.h) * gout.w;
    const double m = double(gout.n) * double(plane);
    Tensor gin(gout.n, gout.c, gout.h, gout.w);
    for (int c = 0; c < gout.c; ++c) {
        double sum_g = 0.0, sum_gx = 0.0;
        for (int n = 0; n < gout.n; ++n) {
            const double* gb = &gout.v[(std::size_t(n) * gout.c + c) * plane];
            const double* xb = &cache.xhat.v[(std::size_t(n) * gout.c + c) * plane];
            for (std::size_t i = 0; i < plane; ++i) {
                sum_g += gb[i];
                sum_gx += gb[i] * xb[i];
            }
        }
        gp.beta[c] += sum_g;
        gp.gamma[c] += sum_gx;
        const double scale = p.gamma[c] * cache.inv_std[c] / m;
        for (int n = 0; n < gout.n; ++n) {
            const double* gb = &gout.v[(std::size_t(n) * gout.c + c) * plane];
            const double* xb = &cache.xhat.v[(std::size_t(n) * gout.c + c) * plane];
            double* ib = &gin.v[(std::size_t(n) * gout.c + c) * plane];
            for (std::size_t i = 0; i < plane; ++i)
                ib[i] = scale * (m * gb[i] - sum_g - xb[i] * sum_gx);
        }
    }
    return gin;
}

inline void relu_inplace(Tensor& t) {
    for (double& x : t.v)
        if (x < 0.0) x = 0.0;
}

// gin = gout masked by the pre-activation sign.
inline void relu_backward_inplace(const Tensor& pre, Tensor& g) {
    for (std::size_t i = 0; i < g.v.size(); ++i)
        if (pre.v[i] <= 0.0) g.v[i] = 0.0;
}

}  // namespace detail

// ---- whole-network forward/backward --------------------------------------------

struct CnnForwardCache {
    std::vector<Tensor> enc_in;      // input of each encoder conv
    std::vector<Tensor> enc_pre;     // batch-norm output before ReLU
    std::vector<detail::BnCache> enc_bn;
    std::vector<Tensor> enc_act;     // post-ReLU encoder activations (skip sources)
    std::vector<Tensor> dec_in;      // input of each decoder deconv
    std::vector<Tensor> dec_pre;
    std::vector<detail::BnCache> dec_bn;
    Tensor final_in;
};

// Training-mode batch forward (batch-statistics batch norm). The cache holds
// everything the backward pass needs.
inline Tensor cnn_batch_forward_train(const Tensor& in, CnnModel& model, CnnForwardCache& cache,
                                      bool update_running = true) {
    if (in.c != 1) throw std::invalid_argument("cnn forward: expected a single input channel");
    const int b = model.num_blocks();
    if (in.h % model.spatial_divisor() != 0 || in.w % model.spatial_divisor() != 0)
        throw std::invalid_argument("cnn forward: spatial dims must divide 2^num_blocks");

    cache = CnnForwardCache{};
    Tensor a = in;
    for (int i = 0; i < b; ++i) {
        cache.enc_in.push_back(a);
        Tensor conv = detail::conv2d(a, model.enc_conv[i], 2);
        detail::BnCache bnc;
        Tensor pre = detail::bn_forward_train(conv, model.enc_bn[i], bnc, model.bn_momentum,
                                              update_running);
        cache.enc_bn.push_back(std::move(bnc));
        cache.enc_pre.push_back(pre);
        detail::relu_inplace(pre);
        cache.enc_act.push_back(pre);
        a = std::move(pre);
    }
    for (int j = 0; j < b; ++j) {
        cache.dec_in.push_back(a);
        Tensor conv = detail::deconv2d(a, model.dec_conv[j], 2);
        detail::BnCache bnc;
        Tensor pre = detail::bn_forward_train(conv, model.dec_bn[j], bnc, model.bn_momentum,
                                              update_running);
        cache.dec_bn.push_back(std::move(bnc));
        cache.dec_pre.push_back(pre);
        detail::relu_inplace(pre);
        if (j <= b - 2) {
            const Tensor& skip = cache.enc_act[b - 2 - j];
            for (std::size_t t = 0; t < pre.v.size(); ++t) pre.v[t] += skip.v[t];
        }
        a = std::move(pre);
    }
    cache.final_in = a;
    return detail::conv2d(a, model.final_conv, 1);
}

// Inference-mode forward using frozen running statistics.
inline Tensor cnn_batch_forward_eval(const Tensor& in, const CnnModel& model) {
    if (in.c != 1) throw std::invalid_argument("cnn forward: expected a single input channel");
    const int b = model.num_blocks();
    if (in.h % model.spatial_divisor() != 0 || in.w % model.spatial_divisor() != 0)
        throw std::invalid_argument("cnn forward: spatial dims must divide 2^num_blocks");

    std::vector<Tensor> skips;
    Tensor a = in;
    for (int i = 0; i < b; ++i) {
        Tensor pre = detail::bn_forward_eval(detail::conv2d(a, model.enc_conv[i], 2), model.enc_bn[i]);
        detail::relu_inplace(pre);
        skips.push_back(pre);
        a = std::move(pre);
    }
    for (int j = 0; j < b; ++j) {
        Tensor pre = detail::bn_forward_eval(detail::deconv2d(a, model.dec_conv[j], 2), model.dec_bn[j]);
        detail::relu_inplace(pre);
        if (j <= b - 2) {
            const Tensor& skip = skips[b - 2 - j];
            for (std::size_t t = 0; t < pre.v.size(); ++t) pre.v[t] += skip.v[t];
        }
        a = std::move(pre);
    }
    return detail::conv2d(a, model.final_conv, 1);
}

// Accumulates parameter gradients into `grads` (a zeroed clone of the model).
inline void cnn_batch_backward(const Tensor& gout, const CnnModel& model,
                               const CnnForwardCache& cache, CnnModel& grads) {
    const int b = model.num_blocks();

    Tensor g(cache.final_in.n, cache.final_in.c, cache.final_in.h, cache.final_in.w);
    detail::conv2d_backward(cache.final_in, model.final_conv, 1, gout, &g, grads.final_conv);

    std::vector<Tensor> enc_act_grads(b);  // skip contributions into encoder activations
    for (int j = b - 1; j >= 0; --j) {
        if (j <= b - 2) {
            const Tensor& skip = cache.enc_act[b - 2 - j];
            Tensor& sg = enc_act_grads[b - 2 - j];
            sg = Tensor(skip.n, skip.c, skip.h, skip.w);
            sg.v = g.v;  // identity branch of the addition
        }
        detail::relu_backward_inplace(cache.dec_pre[j], g);
        Tensor gbn = detail::bn_backward(model.dec_bn[j], cache.dec_bn[j], g, grads.dec_bn[j]);
        Tensor gin(cache.dec_in[j].n, cache.dec_in[j].c, cache.dec_in[j].h, cache.dec_in[j].w);
        detail::deconv2d_backward(cache.dec_in[j], model.dec_conv[j], 2, gbn, &gin,
                                  grads.dec_conv[j]);
        g = std::move(gin);
    }
    for (int i = b - 1; i >= 0; --i) {
        if (enc_act_grads[i].size() > 0)
            for (std::size_t t = 0; t < g.v.size(); ++t) g.v[t] += enc_act_grads[i].v[t];
        detail::relu_backward_inplace(cache.enc_pre[i], g);
        Tensor gbn = detail::bn_backward(model.enc_bn[i], cache.enc_bn[i], g, grads.enc_bn[i]);
        if (i > 0) {
            Tensor gin(cache.enc_in[i].n, cache.enc_in[i].c, cache.enc_in[i].h, cache.enc_in[i].w);
            detail::conv2d_backward(cache.enc_in[i], model.enc_conv[i], 2, gbn, &gin,
                                    grads.enc_conv[i]);
            g = std::move(gin);
        } else {
            detail::conv2d_backward(cache.enc_in[i], model.enc_conv[i], 2, gbn, nullptr,
                                    grads.enc_conv[i]);
        }
    }
}

// ---- single-image inference -----------------------------------------------------

// Residual map for one image: circular-pads to the divisibility requirement,
// runs the network with frozen statistics, crops back.
inline Image cnn_forward(const Image& x, const CnnModel& model) {
    if (!model.loaded()) throw std::runtime_error("cnn_forward: model not loaded");
    const int d = model.spatial_divisor();
    const int ph = (x.height() + d - 1) / d * d;
    const int pw = (x.width() + d - 1) / d * d;
    Tensor in(1, 1, ph, pw);
    for (int i = 0; i < ph; ++i)
        for (int j = 0; j < pw; ++j)
            in.at(0, 0, i, j) = x(i % x.height(), j % x.width());
    const Tensor out = cnn_batch_forward_eval(in, model);
    Image res(x.height(), x.width());
    for (int i = 0; i < x.height(); ++i)
        for (int j = 0; j < x.width(); ++j)
            res(i, j) = out.at(0, 0, i, j);
    return res;
}

}  // namespace ppsr
