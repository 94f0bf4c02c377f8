#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ppsr/image.hpp"

namespace ppsr {

namespace detail {

// Catmull-Rom cubic (a = -0.5), support [-2, 2].
inline double cubic_tap(double t) {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return a * (((t - 5.0) * t + 8.0) * t - 4.0);
    return 0.0;
}

}  // namespace detail

// Integer-factor bicubic upsampling with circular boundary. HR pixel s*i maps
// exactly onto LR pixel i, matching the phase of decimation.
inline Image bicubic_upsample(const Image& lr, int s) {
    if (s <= 0) throw std::invalid_argument("bicubic_upsample: factor must be positive");
    if (s == 1) return lr;

    // Per-phase weights over the four nearest LR taps.
    std::vector<double> weights(std::size_t(s) * 4);
    for (int phase = 0; phase < s; ++phase) {
        const double f = double(phase) / s;
        for (int m = 0; m < 4; ++m)
            weights[std::size_t(phase) * 4 + m] = detail::cubic_tap(f - double(m - 1));
    }

    const int lh = lr.height(), lw = lr.width();
    Image out(lh * s, lw * s);
    for (int i = 0; i < out.height(); ++i) {
        const int bi = i / s, pi = i % s;
        const double* wi = &weights[std::size_t(pi) * 4];
        for (int j = 0; j < out.width(); ++j) {
            const int bj = j / s, pj = j % s;
            const double* wj = &weights[std::size_t(pj) * 4];
            double acc = 0.0;
            for (int m = 0; m < 4; ++m) {
                const int si = wrap_index(bi + m - 1, lh);
                for (int n = 0; n < 4; ++n) {
                    const int sj = wrap_index(bj + n - 1, lw);
                    acc += wi[m] * wj[n] * lr(si, sj);
                }
            }
            out(i, j) = acc;
        }
    }
    return out;
}

}  // namespace ppsr
