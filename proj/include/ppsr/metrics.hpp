#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "ppsr/image.hpp"

namespace ppsr {

/// Statistics of the absolute error |a - b| over all pixels.
/// var_abs is the population variance (divide by N).
struct ErrorStats {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    double var_abs = 0.0;
};

// Peak signal-to-noise ratio against a 255 peak, in dB. Identical images
// yield +infinity, distinguishable from every finite result.
inline double psnr(const Image& a, const Image& b) {
    require_same_size(a, b, "psnr");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.pixels(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        acc += d * d;
    }
    const double mse = acc / double(a.pixels());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace detail {

// 11x11 Gaussian window, sigma 1.5, normalized to sum 1.
inline const std::vector<double>& ssim_window() {
    static const std::vector<double> taps = [] {
        std::vector<double> w(11 * 11);
        double sum = 0.0;
        for (int i = 0; i < 11; ++i)
            for (int j = 0; j < 11; ++j) {
                const double di = i - 5, dj = j - 5;
                w[i * 11 + j] = std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
                sum += w[i * 11 + j];
            }
        for (double& t : w) t /= sum;
        return w;
    }();
    return taps;
}

}  // namespace detail

// Mean local SSIM over fully interior 11x11 windows with the usual constants
// C1 = (0.01*255)^2, C2 = (0.03*255)^2. Requires both images >= 11x11.
inline double ssim(const Image& a, const Image& b) {
    require_same_size(a, b, "ssim");
    constexpr int win = 11;
    if (a.height() < win || a.width() < win)
        throw std::invalid_argument("ssim: image smaller than 11x11 window");

    const auto& w = detail::ssim_window();
    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);

    double total = 0.0;
    long count = 0;
    for (int top = 0; top + win <= a.height(); ++top) {
        for (int left = 0; left + win <= a.width(); ++left) {
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int i = 0; i < win; ++i) {
                for (int j = 0; j < win; ++j) {
                    const double t = w[i * win + j];
                    const double x = a(top + i, left + j);
                    const double y = b(top + i, left + j);
                    mx += t * x;
                    my += t * y;
                    sxx += t * x * x;
                    syy += t * y * y;
                    sxy += t * x * y;
                }
            }
            const double vx = sxx - mx * mx;
            const double vy = syy - my * my;
            const double cxy = sxy - mx * my;
            const double num = (2.0 * mx * my + c1) * (2.0 * cxy + c2);
            const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
            total += num / den;
            ++count;
        }
    }
    return total / double(count);
}

inline ErrorStats error_stats(const Image& a, const Image& b) {
    require_same_size(a, b, "error_stats");
    ErrorStats s;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.pixels(); ++i) {
        const double d = std::abs(a.data()[i] - b.data()[i]);
        s.max_abs = std::max(s.max_abs, d);
        sum += d;
    }
    s.mean_abs = sum / double(a.pixels());
    double var = 0.0;
    for (std::size_t i = 0; i < a.pixels(); ++i) {
        const double d = std::abs(a.data()[i] - b.data()[i]) - s.mean_abs;
        var += d * d;
    }
    s.var_abs = var / double(a.pixels());
    return s;
}

// |a - b| stretched so that full_scale maps to white; larger error, brighter.
inline Image error_map(const Image& a, const Image& b, double full_scale = 50.0) {
    require_same_size(a, b, "error_map");
    Image out(a.height(), a.width());
    for (std::size_t i = 0; i < a.pixels(); ++i) {
        const double d = std::abs(a.data()[i] - b.data()[i]);
        out.data()[i] = std::clamp(d * (255.0 / full_scale), 0.0, 255.0);
    }
    return out;
}

// One CSV row "max_abs,mean_abs,var_abs" at 6 significant digits.
inline std::string error_stats_csv(const ErrorStats& s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g", s.max_abs, s.mean_abs, s.var_abs);
    return buf;
}

}  // namespace ppsr
