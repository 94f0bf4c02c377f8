#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "ppsr/image.hpp"
#include "ppsr/operators.hpp"
#include "ppsr/rng.hpp"

namespace ppsr {

// Observation simulator: blur, decimate, add seeded white Gaussian noise.

enum class KernelType { gaussian, average };

inline std::string to_string(KernelType t) {
    return t == KernelType::gaussian ? "gaussian" : "average";
}

inline KernelType kernel_type_from_string(const std::string& s) {
    if (s == "gaussian") return KernelType::gaussian;
    if (s == "average") return KernelType::average;
    throw std::invalid_argument("unknown kernel type '" + s + "'");
}

struct DegradationSpec {
    KernelType kernel_type = KernelType::gaussian;
    int kernel_size = 3;
    double kernel_sigma = 1.0;  // Gaussian kernels only
    int factor = 2;
    double noise_sigma = 0.0;   // standard deviation in [0, 255] intensity units
    std::uint64_t seed = 0;

    void validate() const {
        if (kernel_size <= 0 || kernel_size % 2 == 0)
            throw std::invalid_argument("DegradationSpec: kernel_size must be odd positive");
        if (kernel_type == KernelType::gaussian && !(kernel_sigma > 0.0))
            throw std::invalid_argument("DegradationSpec: kernel_sigma must be > 0");
        if (factor <= 0) throw std::invalid_argument("DegradationSpec: factor must be positive");
        if (noise_sigma < 0.0 || !std::isfinite(noise_sigma))
            throw std::invalid_argument("DegradationSpec: noise_sigma must be finite and >= 0");
    }
};

inline Kernel make_kernel(KernelType type, int size, double sigma) {
    if (size <= 0 || size % 2 == 0)
        throw std::invalid_argument("make_kernel: size must be odd positive");
    if (type == KernelType::gaussian && !(sigma > 0.0))
        throw std::invalid_argument("make_kernel: sigma must be > 0");
    Kernel k;
    k.size = size;
    k.taps.assign(std::size_t(size) * size, 0.0);
    if (type == KernelType::average) {
        const double t = 1.0 / double(size * size);
        for (double& tap : k.taps) tap = t;
    } else {
        const int c = size / 2;
        double sum = 0.0;
        for (int u = 0; u < size; ++u) {
            for (int v = 0; v < size; ++v) {
                const double du = u - c, dv = v - c;
                const double t = std::exp(-(du * du + dv * dv) / (2.0 * sigma * sigma));
                k.taps[std::size_t(u) * size + v] = t;
                sum += t;
            }
        }
        for (double& tap : k.taps) tap /= sum;
    }
    return k;
}

inline Kernel make_kernel(const DegradationSpec& spec) {
    spec.validate();
    return make_kernel(spec.kernel_type, spec.kernel_size, spec.kernel_sigma);
}

// Crops bottom/right so both dimensions divide the factor.
inline Image crop_to_multiple(const Image& img, int factor) {
    if (factor <= 0) throw std::invalid_argument("crop_to_multiple: factor must be positive");
    const int h = img.height() - img.height() % factor;
    const int w = img.width() - img.width() % factor;
    if (h <= 0 || w <= 0) throw std::invalid_argument("crop_to_multiple: image smaller than factor");
    if (h == img.height() && w == img.width()) return img;
    Image out(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
            out(i, j) = img(i, j);
    return out;
}

inline OperatorSpec operator_spec_for(const DegradationSpec& spec, int hr_h, int hr_w) {
    OperatorSpec op;
    op.kernel = make_kernel(spec);
    op.factor = spec.factor;
    op.hr_height = hr_h;
    op.hr_width = hr_w;
    op.validate();
    return op;
}

// y = D H x + n with n ~ N(0, noise_sigma^2) i.i.d. from the seeded stream;
// the input is cropped bottom/right if its dimensions do not divide the factor.
inline Image degrade(const Image& x, const DegradationSpec& spec) {
    spec.validate();
    const Image cropped = crop_to_multiple(x, spec.factor);
    const OperatorSpec op = operator_spec_for(spec, cropped.height(), cropped.width());
    Image y = apply_W(cropped, op);
    if (spec.noise_sigma > 0.0) {
        NormalSampler rng(spec.seed);
        for (double& v : y.data()) v += spec.noise_sigma * rng.normal();
    }
    return y;
}

}  // namespace ppsr
