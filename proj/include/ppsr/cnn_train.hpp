#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppsr/cnn.hpp"
#include "ppsr/image.hpp"
#include "ppsr/rng.hpp"
#include "ppsr/util.hpp"

namespace ppsr {

// From-scratch denoiser training: random clean patches from a small image set,
// synthetic Gaussian noise, residual (noise-prediction) loss
//   L = 1/(2N) * sum_i ||net(clean_i + noise_i) - noise_i||^2
// minimized with Adam. Everything is seeded and single threaded, so a given
// configuration always produces the same model.

struct TrainConfig {
    int patch_size = 35;
    int batch_size = 16;
    int epochs = 30;
    int steps_per_epoch = 50;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double noise_sigma_min = 2.0;
    double noise_sigma_max = 8.0;
    std::uint64_t seed = 0;
    std::vector<int> channels{16, 32, 32, 32, 32};
    int ksize = 3;

    void validate() const {
        if (patch_size <= 0) throw std::invalid_argument("train: patch_size must be positive");
        if (batch_size <= 0) throw std::invalid_argument("train: batch_size must be positive");
        if (epochs <= 0) throw std::invalid_argument("train: epochs must be positive");
        if (steps_per_epoch <= 0) throw std::invalid_argument("train: steps_per_epoch must be positive");
        if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be positive");
        if (noise_sigma_min < 0.0 || noise_sigma_max < noise_sigma_min)
            throw std::invalid_argument("train: invalid noise sigma range");
        if (channels.empty()) throw std::invalid_argument("train: need at least one block");
    }
};

// The shipped desk-scale recipe: 32x32 patches pass through the default
// five-block network's 2^5 spatial divisor without padding, and 600 short
// Adam steps converge to a useful denoiser in well under a minute on one
// CPU core.
inline TrainConfig desk_train_config() {
    TrainConfig tc;
    tc.patch_size = 32;
    tc.batch_size = 8;
    tc.epochs = 6;
    tc.steps_per_epoch = 100;
    return tc;
}

struct TrainResult {
    CnnModel model;
    std::vector<double> epoch_loss;
};

namespace detail {

struct Batch {
    Tensor noisy;   // circularly padded to the network's divisibility requirement
    Tensor target;  // the injected noise, unpadded
    int crop_h = 0, crop_w = 0;
};

inline Batch sample_batch(const std::vector<Image>& images, const TrainConfig& cfg,
                          int divisor, NormalSampler& rng) {
    const int p = cfg.patch_size;
    const int ph = (p + divisor - 1) / divisor * divisor;
    Batch batch;
    batch.crop_h = batch.crop_w = p;
    batch.noisy = Tensor(cfg.batch_size, 1, ph, ph);
    batch.target = Tensor(cfg.batch_size, 1, p, p);
    for (int n = 0; n < cfg.batch_size; ++n) {
        const Image& img = images[std::size_t(rng.bounded(images.size()))];
        const int top = int(rng.bounded(std::uint64_t(img.height() - p + 1)));
        const int left = int(rng.bounded(std::uint64_t(img.width() - p + 1)));
        const double sigma =
            cfg.noise_sigma_min + (cfg.noise_sigma_max - cfg.noise_sigma_min) * rng.uniform();
        std::vector<double> noisy_patch(std::size_t(p) * p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                const double noise = sigma * rng.normal();
                batch.target.at(n, 0, i, j) = noise;
                noisy_patch[std::size_t(i) * p + j] = img(top + i, left + j) + noise;
            }
        for (int i = 0; i < ph; ++i)
            for (int j = 0; j < ph; ++j)
                batch.noisy.at(n, 0, i, j) = noisy_patch[std::size_t(i % p) * p + (j % p)];
    }
    return batch;
}

}  // namespace detail

// Mean residual loss over a batch; fills `grads` (a zeroed clone) when given.
inline double cnn_loss_and_grads(CnnModel& model, const detail::Batch& batch, CnnModel* grads,
                                 bool update_running = true) {
    CnnForwardCache cache;
    const Tensor out = cnn_batch_forward_train(batch.noisy, model, cache, update_running);
    const int nb = batch.noisy.n;
    double loss = 0.0;
    Tensor gout(out.n, out.c, out.h, out.w);
    for (int n = 0; n < nb; ++n)
        for (int i = 0; i < batch.crop_h; ++i)
            for (int j = 0; j < batch.crop_w; ++j) {
                const double d = out.at(n, 0, i, j) - batch.target.at(n, 0, i, j);
                loss += d * d;
                gout.at(n, 0, i, j) = d / double(nb);
            }
    loss /= 2.0 * double(nb);
    if (!std::isfinite(loss)) throw std::runtime_error("training loss diverged");
    if (grads) cnn_batch_backward(gout, model, cache, *grads);
    return loss;
}

struct AdamState {
    std::vector<double> m, v;
    long t = 0;
};

inline void adam_step(CnnModel& model, CnnModel& grads, AdamState& state, const TrainConfig& cfg) {
    auto params = trainable_arrays(model);
    auto gs = trainable_arrays(grads);
    if (state.m.empty()) {
        const std::size_t n = param_count(model);
        state.m.assign(n, 0.0);
        state.v.assign(n, 0.0);
    }
    ++state.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.t));
    std::size_t off = 0;
    for (std::size_t a = 0; a < params.size(); ++a) {
        std::vector<double>& p = *params[a];
        std::vector<double>& g = *gs[a];
        for (std::size_t i = 0; i < p.size(); ++i, ++off) {
            state.m[off] = cfg.beta1 * state.m[off] + (1.0 - cfg.beta1) * g[i];
            state.v[off] = cfg.beta2 * state.v[off] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = state.m[off] / bc1;
            const double vhat = state.v[off] / bc2;
            p[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
            g[i] = 0.0;
        }
    }
}

inline TrainResult cnn_train(const std::vector<Image>& images, const TrainConfig& cfg) {
    cfg.validate();
    if (images.empty()) throw std::invalid_argument("train: empty image set");
    for (const Image& img : images)
        if (img.height() < cfg.patch_size || img.width() < cfg.patch_size)
            throw std::invalid_argument("train: image smaller than patch size");

    TrainResult result;
    result.model = make_cnn_model(cfg.channels, cfg.ksize, cfg.seed);
    CnnModel grads = clone_zeroed(result.model);
    AdamState adam;
    NormalSampler data_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    const int divisor = result.model.spatial_divisor();

    for (int e = 0; e < cfg.epochs; ++e) {
        double epoch_loss = 0.0;
        for (int s = 0; s < cfg.steps_per_epoch; ++s) {
            const detail::Batch batch = detail::sample_batch(images, cfg, divisor, data_rng);
            epoch_loss += cnn_loss_and_grads(result.model, batch, &grads);
            adam_step(result.model, grads, adam, cfg);
        }
        result.epoch_loss.push_back(epoch_loss / double(cfg.steps_per_epoch));
    }
    return result;
}

// ---- model serialization ---------------------------------------------------------
//
// Binary layout (little endian): 8-byte magic "PPSRCNN1", u32 version, u32
// kernel size, u32 block count, u32 channels[], f64 bn momentum, then all
// trainable arrays in their documented order followed by each block's batch
// norm running mean and variance (encoder blocks then decoder blocks), and a
// trailing fnv1a-64 checksum of everything before it.

namespace detail {

inline constexpr char kModelMagic[8] = {'P', 'P', 'S', 'R', 'C', 'N', 'N', '1'};
inline constexpr std::uint32_t kModelVersion = 1;

inline void put_f64_array(std::vector<unsigned char>& out, const std::vector<double>& a) {
    for (double x : a) put_f64(out, x);
}

}  // namespace detail

inline void save_model(const CnnModel& model, const std::string& path) {
    std::vector<unsigned char> buf;
    buf.insert(buf.end(), detail::kModelMagic, detail::kModelMagic + 8);
    put_u32(buf, detail::kModelVersion);
    put_u32(buf, std::uint32_t(model.ksize));
    put_u32(buf, std::uint32_t(model.channels.size()));
    for (int c : model.channels) put_u32(buf, std::uint32_t(c));
    put_f64(buf, model.bn_momentum);
    for (const auto* a : trainable_arrays(model)) detail::put_f64_array(buf, *a);
    for (const BnParams& bn : model.enc_bn) {
        detail::put_f64_array(buf, bn.run_mean);
        detail::put_f64_array(buf, bn.run_var);
    }
    for (const BnParams& bn : model.dec_bn) {
        detail::put_f64_array(buf, bn.run_mean);
        detail::put_f64_array(buf, bn.run_var);
    }
    put_u64(buf, fnv1a64(buf.data(), buf.size()));
    write_file_atomic(path, reinterpret_cast<const char*>(buf.data()), buf.size());
}

inline CnnModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::vector<unsigned char> buf{std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>()};
    if (buf.size() < 8 + 4 + 4 + 4 + 8) throw std::runtime_error("corrupt model file: " + path);
    if (!std::equal(detail::kModelMagic, detail::kModelMagic + 8, buf.begin()))
        throw std::runtime_error("not a model file: " + path);
    const std::uint64_t stored = get_u64(buf.data() + buf.size() - 8);
    if (fnv1a64(buf.data(), buf.size() - 8) != stored)
        throw std::runtime_error("corrupt model file: " + path);

    std::size_t off = 8;
    const std::uint32_t version = get_u32(buf.data() + off);
    off += 4;
    if (version != detail::kModelVersion)
        throw std::runtime_error("unsupported model version in: " + path);
    const std::uint32_t ksize = get_u32(buf.data() + off);
    off += 4;
    const std::uint32_t nblocks = get_u32(buf.data() + off);
    off += 4;
    if (nblocks == 0 || nblocks > 16 || ksize == 0 || ksize % 2 == 0)
        throw std::runtime_error("corrupt model file: " + path);
    if (buf.size() < off + 4 * nblocks + 8 + 8) throw std::runtime_error("corrupt model file: " + path);
    std::vector<int> channels;
    for (std::uint32_t i = 0; i < nblocks; ++i) {
        channels.push_back(int(get_u32(buf.data() + off)));
        off += 4;
    }
    for (int c : channels)
        if (c <= 0) throw std::runtime_error("corrupt model file: " + path);

    CnnModel model = make_cnn_model(channels, int(ksize), 0);
    model.bn_momentum = get_f64(buf.data() + off);
    off += 8;

    auto read_array = [&](std::vector<double>& a) {
        if (off + 8 * a.size() > buf.size() - 8)
            throw std::runtime_error("corrupt model file: " + path);
        for (double& x : a) {
            x = get_f64(buf.data() + off);
            off += 8;
        }
    };
    for (auto* a : trainable_arrays(model)) read_array(*a);
    for (BnParams& bn : model.enc_bn) {
        read_array(bn.run_mean);
        read_array(bn.run_var);
    }
    for (BnParams& bn : model.dec_bn) {
        read_array(bn.run_mean);
        read_array(bn.run_var);
    }
    if (off != buf.size() - 8) throw std::runtime_error("corrupt model file: " + path);
    return model;
}

}  // namespace ppsr
