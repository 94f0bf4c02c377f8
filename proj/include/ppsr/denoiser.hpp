#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "ppsr/cnn.hpp"
#include "ppsr/degradation.hpp"
#include "ppsr/image.hpp"
#include "ppsr/operators.hpp"

namespace ppsr {

// Pluggable denoiser used for the z-update of the splitting iteration. Every
// kind treats `sigma` as a noise standard deviation in intensity units
// ([0,255] scale) and is an exact pass-through at sigma == 0.

enum class DenoiserKind { identity, gaussian_smooth, tv_chambolle, cnn };

inline std::string to_string(DenoiserKind kind) {
    switch (kind) {
        case DenoiserKind::identity: return "identity";
        case DenoiserKind::gaussian_smooth: return "gaussian_smooth";
        case DenoiserKind::tv_chambolle: return "tv_chambolle";
        case DenoiserKind::cnn: return "cnn";
    }
    throw std::logic_error("unreachable");
}

inline DenoiserKind denoiser_kind_from_string(const std::string& s) {
    if (s == "identity") return DenoiserKind::identity;
    if (s == "gauss" || s == "gaussian_smooth") return DenoiserKind::gaussian_smooth;
    if (s == "tv" || s == "tv_chambolle") return DenoiserKind::tv_chambolle;
    if (s == "cnn") return DenoiserKind::cnn;
    throw std::invalid_argument("unknown denoiser: " + s);
}

struct DenoiserHandle {
    DenoiserKind kind = DenoiserKind::identity;
    // gaussian_smooth: spatial kernel width = smooth_scale * sigma.
    double smooth_scale = 0.1;
    // tv_chambolle: ROF regularization weight = tv_weight_scale * sigma^2.
    double tv_weight_scale = 1.0;
    int tv_iters = 30;
    double tv_step = 0.248;
    std::shared_ptr<const CnnModel> model;
};

inline DenoiserHandle identity_denoiser() { return DenoiserHandle{}; }

inline DenoiserHandle gaussian_denoiser(double smooth_scale = 0.1) {
    DenoiserHandle h;
    h.kind = DenoiserKind::gaussian_smooth;
    h.smooth_scale = smooth_scale;
    return h;
}

inline DenoiserHandle tv_denoiser(double weight_scale = 1.0, int iters = 30, double step = 0.248) {
    DenoiserHandle h;
    h.kind = DenoiserKind::tv_chambolle;
    h.tv_weight_scale = weight_scale;
    h.tv_iters = iters;
    h.tv_step = step;
    return h;
}

inline DenoiserHandle cnn_denoiser(std::shared_ptr<const CnnModel> model) {
    DenoiserHandle h;
    h.kind = DenoiserKind::cnn;
    h.model = std::move(model);
    return h;
}

// Chambolle's dual projection for the ROF model
//   min_u  ||u - f||^2 / 2 + weight * TV(u),
// iterating p <- (p + step*grad(div p - f/weight)) / (1 + step*|grad(...)|)
// and returning u = f - weight * div p. Circular boundaries throughout.
inline Image tv_chambolle_denoise(const Image& f, double weight, int iters, double step) {
    if (!(weight > 0.0)) return f;
    if (iters <= 0 || !(step > 0.0))
        throw std::invalid_argument("tv_chambolle_denoise: bad iteration settings");
    GradientField p{Image(f.height(), f.width()), Image(f.height(), f.width())};
    const double inv_w = 1.0 / weight;
    for (int it = 0; it < iters; ++it) {
        Image r = divergence(p);
        axpy(r, -inv_w, f);
        const GradientField g = gradient(r);
        for (int i = 0; i < f.height(); ++i)
            for (int j = 0; j < f.width(); ++j) {
                const double gx = g.dx(i, j), gy = g.dy(i, j);
                const double denom = 1.0 + step * std::sqrt(gx * gx + gy * gy);
                p.dx(i, j) = (p.dx(i, j) + step * gx) / denom;
                p.dy(i, j) = (p.dy(i, j) + step * gy) / denom;
            }
    }
    Image u = f;
    axpy(u, -weight, divergence(p));
    return u;
}

inline Image denoise(const Image& x, double sigma, const DenoiserHandle& handle) {
    if (sigma < 0.0 || !std::isfinite(sigma))
        throw std::invalid_argument("denoise: sigma must be finite and non-negative");
    if (sigma == 0.0) return x;
    switch (handle.kind) {
        case DenoiserKind::identity:
            return x;
        case DenoiserKind::gaussian_smooth: {
            const double spatial = handle.smooth_scale * sigma;
            if (!(spatial > 0.0)) return x;
            const int size = std::max(3, 2 * int(std::ceil(3.0 * spatial)) + 1);
            return convolve(x, make_kernel(KernelType::gaussian, size, spatial));
        }
        case DenoiserKind::tv_chambolle:
            return tv_chambolle_denoise(x, handle.tv_weight_scale * sigma * sigma,
                                        handle.tv_iters, handle.tv_step);
        case DenoiserKind::cnn: {
            if (!handle.model || !handle.model->loaded())
                throw std::runtime_error("denoise: cnn denoiser has no loaded model");
            Image out = x;
            axpy(out, -1.0, cnn_forward(x, *handle.model));
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace ppsr
