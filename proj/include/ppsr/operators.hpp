#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ppsr/image.hpp"

namespace ppsr {

// Linear operators of the observation model: blur H, decimation D, the
// composite W = DH, the first-difference gradient and the 5-point Laplacian,
// each paired with its exact adjoint. All stencils use circular (periodic)
// boundaries so every adjoint identity holds to rounding error and the
// normal-equation operator below is exactly symmetric.

/// Small odd square convolution stencil, normalized to sum 1.
struct Kernel {
    int size = 1;
    std::vector<double> taps{1.0};

    double at(int u, int v) const { return taps[std::size_t(u) * size + v]; }

    void validate() const {
        if (size <= 0 || size % 2 == 0) throw std::invalid_argument("Kernel: size must be odd positive");
        if (taps.size() != std::size_t(size) * size)
            throw std::invalid_argument("Kernel: tap count does not match size");
        double sum = 0.0;
        for (double t : taps) {
            if (!std::isfinite(t)) throw std::invalid_argument("Kernel: non-finite tap");
            sum += t;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("Kernel: taps must sum to 1");
    }
};

inline Kernel identity_kernel() { return Kernel{}; }

inline Kernel rotate180(const Kernel& k) {
    Kernel r = k;
    for (int u = 0; u < k.size; ++u)
        for (int v = 0; v < k.size; ++v)
            r.taps[std::size_t(u) * k.size + v] = k.at(k.size - 1 - u, k.size - 1 - v);
    return r;
}

/// Blur kernel + decimation factor + HR geometry: everything needed to apply
/// W = DH and its transpose.
struct OperatorSpec {
    Kernel kernel;
    int factor = 1;
    int hr_height = 0;
    int hr_width = 0;

    int lr_height() const { return hr_height / factor; }
    int lr_width() const { return hr_width / factor; }

    void validate() const {
        kernel.validate();
        if (factor <= 0) throw std::invalid_argument("OperatorSpec: factor must be positive");
        if (hr_height <= 0 || hr_width <= 0)
            throw std::invalid_argument("OperatorSpec: HR dimensions must be positive");
        if (hr_height % factor != 0 || hr_width % factor != 0)
            throw std::invalid_argument("OperatorSpec: HR dimensions must be divisible by factor");
    }
};

/// Forward-difference gradient field of an image.
struct GradientField {
    Image dx;
    Image dy;
};

/// Relative importance of the intensity / gradient / Laplacian consistency
/// terms of the data fidelity.
struct FidelityWeights {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double lambda3 = 1.0;

    void validate() const {
        if (lambda1 < 0 || lambda2 < 0 || lambda3 < 0 ||
            !std::isfinite(lambda1) || !std::isfinite(lambda2) || !std::isfinite(lambda3))
            throw std::invalid_argument("FidelityWeights: weights must be finite and >= 0");
    }
};

// ---- blur -------------------------------------------------------------------

// Circular 2-D convolution; output size equals input size.
inline Image convolve(const Image& img, const Kernel& k) {
    k.validate();
    if (k.size == 1) {
        Image out = img;
        if (k.taps[0] != 1.0)
            for (double& x : out.data()) x *= k.taps[0];
        return out;
    }
    const int h = img.height(), w = img.width();
    const int c = k.size / 2;
    Image out(h, w);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int u = 0; u < k.size; ++u) {
                const int si = wrap_index(i - (u - c), h);
                for (int v = 0; v < k.size; ++v) {
                    const int sj = wrap_index(j - (v - c), w);
                    acc += k.at(u, v) * img(si, sj);
                }
            }
            out(i, j) = acc;
        }
    }
    return out;
}

// Adjoint of convolve: circular convolution with the 180-degree rotation.
inline Image convolve_adjoint(const Image& img, const Kernel& k) {
    return convolve(img, rotate180(k));
}

// ---- decimation ---------------------------------------------------------------

// Keeps every s-th row and column starting at index 0.
inline Image decimate(const Image& img, int s) {
    if (s <= 0) throw std::invalid_argument("decimate: factor must be positive");
    if (s == 1) return img;
    if (img.height() % s != 0 || img.width() % s != 0)
        throw std::invalid_argument("decimate: dimensions not divisible by factor");
    Image out(img.height() / s, img.width() / s);
    for (int i = 0; i < out.height(); ++i)
        for (int j = 0; j < out.width(); ++j)
            out(i, j) = img(s * i, s * j);
    return out;
}

// Zero-fill upsampling, the exact adjoint of decimate.
inline Image decimate_adjoint(const Image& img, int s, int hr_h, int hr_w) {
    if (s <= 0) throw std::invalid_argument("decimate_adjoint: factor must be positive");
    if (hr_h != s * img.height() || hr_w != s * img.width())
        throw std::invalid_argument("decimate_adjoint: HR dimensions inconsistent with factor");
    if (s == 1) return img;
    Image out(hr_h, hr_w, 0.0);
    for (int i = 0; i < img.height(); ++i)
        for (int j = 0; j < img.width(); ++j)
            out(s * i, s * j) = img(i, j);
    return out;
}

// ---- composite W = DH ---------------------------------------------------------

inline Image apply_W(const Image& x, const OperatorSpec& spec) {
    spec.validate();
    if (x.height() != spec.hr_height || x.width() != spec.hr_width)
        throw std::invalid_argument("apply_W: input is not HR-sized");
    return decimate(convolve(x, spec.kernel), spec.factor);
}

inline Image apply_Wt(const Image& y, const OperatorSpec& spec) {
    spec.validate();
    if (y.height() != spec.lr_height() || y.width() != spec.lr_width())
        throw std::invalid_argument("apply_Wt: input is not LR-sized");
    return convolve_adjoint(decimate_adjoint(y, spec.factor, spec.hr_height, spec.hr_width),
                            spec.kernel);
}

// ---- gradient and Laplacian ---------------------------------------------------

// Forward differences with circular wrap.
inline GradientField gradient(const Image& img) {
    const int h = img.height(), w = img.width();
    GradientField g{Image(h, w), Image(h, w)};
    for (int i = 0; i < h; ++i) {
        const int in = (i + 1 == h) ? 0 : i + 1;
        for (int j = 0; j < w; ++j) {
            const int jn = (j + 1 == w) ? 0 : j + 1;
            g.dx(i, j) = img(i, jn) - img(i, j);
            g.dy(i, j) = img(in, j) - img(i, j);
        }
    }
    return g;
}

// Backward-difference divergence; satisfies <gradient(a), g> = <a, -divergence(g)>.
inline Image divergence(const GradientField& g) {
    require_same_size(g.dx, g.dy, "divergence");
    const int h = g.dx.height(), w = g.dx.width();
    Image out(h, w);
    for (int i = 0; i < h; ++i) {
        const int ip = (i == 0) ? h - 1 : i - 1;
        for (int j = 0; j < w; ++j) {
            const int jp = (j == 0) ? w - 1 : j - 1;
            out(i, j) = g.dx(i, j) - g.dx(i, jp) + g.dy(i, j) - g.dy(ip, j);
        }
    }
    return out;
}

// The transpose the solver actually uses.
inline Image gradient_transpose(const GradientField& g) {
    Image out = divergence(g);
    for (double& x : out.data()) x = -x;
    return out;
}

// Circular 5-point stencil [[0,1,0],[1,-4,1],[0,1,0]]; self-adjoint.
inline Image laplacian(const Image& img) {
    const int h = img.height(), w = img.width();
    Image out(h, w);
    for (int i = 0; i < h; ++i) {
        const int ip = (i == 0) ? h - 1 : i - 1;
        const int in = (i + 1 == h) ? 0 : i + 1;
        for (int j = 0; j < w; ++j) {
            const int jp = (j == 0) ? w - 1 : j - 1;
            const int jn = (j + 1 == w) ? 0 : j + 1;
            out(i, j) = img(ip, j) + img(in, j) + img(i, jp) + img(i, jn) - 4.0 * img(i, j);
        }
    }
    return out;
}

// ---- normal-equation operator -------------------------------------------------

// Applies the feature-weighted LR-grid metric: l1*u + l2*grad^T grad u + l3*lap^T lap u.
inline Image apply_lr_metric(const Image& u, const FidelityWeights& wts) {
    Image acc = wts.lambda1 * u;
    if (wts.lambda2 != 0.0) axpy(acc, wts.lambda2, gradient_transpose(gradient(u)));
    if (wts.lambda3 != 0.0) axpy(acc, wts.lambda3, laplacian(laplacian(u)));
    return acc;
}

// A x = l1 W^T W x + l2 W^T grad^T grad W x + l3 W^T lap^T lap W x + gamma x.
// Gradient and Laplacian act on the LR grid. Symmetric, and positive definite
// for gamma > 0.
inline Image apply_normal_operator(const Image& x, const OperatorSpec& spec,
                                   const FidelityWeights& wts, double gamma) {
    wts.validate();
    if (!(gamma > 0.0)) throw std::invalid_argument("apply_normal_operator: gamma must be > 0");
    Image out = apply_Wt(apply_lr_metric(apply_W(x, spec), wts), spec);
    axpy(out, gamma, x);
    return out;
}

// Exact diagonal of the normal operator, recovered from s^2 probe images; the
// diagonal is periodic with period factor x factor under circular boundaries.
inline Image normal_operator_diagonal(const OperatorSpec& spec, const FidelityWeights& wts,
                                      double gamma) {
    spec.validate();
    const int s = spec.factor;
    Image diag(spec.hr_height, spec.hr_width);
    for (int pi = 0; pi < s; ++pi) {
        for (int pj = 0; pj < s; ++pj) {
            Image probe(spec.hr_height, spec.hr_width, 0.0);
            probe(pi, pj) = 1.0;
            const Image col = apply_normal_operator(probe, spec, wts, gamma);
            const double d = col(pi, pj);
            for (int i = pi; i < spec.hr_height; i += s)
                for (int j = pj; j < spec.hr_width; j += s)
                    diag(i, j) = d;
        }
    }
    return diag;
}

}  // namespace ppsr
