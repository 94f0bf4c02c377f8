// Generates the deterministic grayscale test corpus committed under data/:
// six 64x64 evaluation crops, four 128x128 training images, and one 256x256
// reference image. Everything is drawn analytically (plus a fixed-seed
// sampler for layouts), so regenerating yields byte-identical files.

#include <cmath>
#include <iostream>
#include <string>

#include "ppsr/image.hpp"
#include "ppsr/rng.hpp"

using ppsr::Image;

namespace {

constexpr double kPi = 3.14159265358979323846;

double smoothstep(double e0, double e1, double x) {
    const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

Image ramp(int n, double lo, double hi, double di, double dj) {
    Image img(n, n);
    const double denom = std::max(1.0, (std::abs(di) + std::abs(dj)) * (n - 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            img(i, j) = lo + (hi - lo) * (di * i + dj * j + (di < 0 ? -(n - 1.0) * di : 0.0) +
                                          (dj < 0 ? -(n - 1.0) * dj : 0.0)) /
                                 denom;
    return img;
}

// Alpha-blends `value` inside a soft-edged disc (1.5 px transition).
void add_disc(Image& img, double ci, double cj, double r, double value) {
    for (int i = 0; i < img.height(); ++i)
        for (int j = 0; j < img.width(); ++j) {
            const double d = std::hypot(i - ci, j - cj);
            const double a = smoothstep(r + 1.5, r - 1.5, d);
            img(i, j) = (1.0 - a) * img(i, j) + a * value;
        }
}

// Alpha-blends `value` inside a soft-edged axis-aligned rectangle.
void add_rect(Image& img, double i0, double j0, double i1, double j1, double value) {
    for (int i = 0; i < img.height(); ++i)
        for (int j = 0; j < img.width(); ++j) {
            const double ai = smoothstep(i0 - 1.0, i0 + 1.0, i) * smoothstep(i1 + 1.0, i1 - 1.0, i);
            const double aj = smoothstep(j0 - 1.0, j0 + 1.0, j) * smoothstep(j1 + 1.0, j1 - 1.0, j);
            const double a = ai * aj;
            img(i, j) = (1.0 - a) * img(i, j) + a * value;
        }
}

void add_gaussian_bump(Image& img, double ci, double cj, double sigma, double amp) {
    for (int i = 0; i < img.height(); ++i)
        for (int j = 0; j < img.width(); ++j) {
            const double d2 = (i - ci) * (i - ci) + (j - cj) * (j - cj);
            img(i, j) += amp * std::exp(-d2 / (2.0 * sigma * sigma));
        }
}

void clamp_range(Image& img, double lo, double hi) {
    for (double& v : img.data()) v = std::clamp(v, lo, hi);
}

// ---- 64x64 evaluation crops ------------------------------------------------------

Image make_discs64() {
    Image img = ramp(64, 40, 200, 1, 1);
    add_disc(img, 16, 16, 10, 230);
    add_disc(img, 20, 44, 8, 60);
    add_disc(img, 44, 24, 12, 120);
    add_disc(img, 50, 50, 6, 180);
    return img;
}

Image make_bars64() {
    Image img = ramp(64, 30, 170, 0, 1);
    add_rect(img, 0, 8, 63, 14, 220);
    add_rect(img, 0, 24, 63, 28, 70);
    add_rect(img, 40, 0, 48, 63, 200);
    add_rect(img, 54, 0, 58, 63, 90);
    return img;
}

Image make_waves64() {
    Image img(64, 64);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
            img(i, j) = 120.0 + 50.0 * std::sin(2.0 * kPi * 3.0 * j / 64.0) +
                        35.0 * std::sin(2.0 * kPi * (2.0 * i + j) / 64.0 + 1.0) +
                        20.0 * std::sin(2.0 * kPi * 5.0 * i / 64.0 + 2.0);
    clamp_range(img, 10, 245);
    return img;
}

Image make_bumps64() {
    Image img(64, 64, 140.0);
    add_gaussian_bump(img, 12, 14, 6, 80);
    add_gaussian_bump(img, 18, 44, 9, -70);
    add_gaussian_bump(img, 40, 12, 5, -60);
    add_gaussian_bump(img, 46, 36, 10, 75);
    add_gaussian_bump(img, 30, 30, 4, 55);
    add_gaussian_bump(img, 56, 56, 7, -65);
    clamp_range(img, 10, 245);
    return img;
}

Image make_blocks64() {
    Image img(64, 64, 50.0);
    add_rect(img, 0, 0, 31, 31, 90);
    add_rect(img, 0, 32, 19, 63, 160);
    add_rect(img, 32, 0, 63, 23, 210);
    add_rect(img, 40, 30, 60, 58, 120);
    add_rect(img, 20, 40, 31, 56, 60);
    return img;
}

Image make_scene64() {
    Image img(64, 64);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
            img(i, j) = 110.0 + 25.0 * std::sin(2.0 * kPi * 4.0 * j / 64.0) +
                        0.8 * i;
    add_rect(img, 8, 8, 18, 40, 190);
    add_rect(img, 36, 8, 56, 24, 45);
    add_disc(img, 40, 44, 9, 210);
    clamp_range(img, 10, 245);
    return img;
}

// ---- 128x128 training images -----------------------------------------------------

Image make_plaid128() {
    Image img(128, 128);
    for (int i = 0; i < 128; ++i)
        for (int j = 0; j < 128; ++j)
            img(i, j) = 130.0 + 45.0 * std::sin(2.0 * kPi * 5.0 * j / 128.0 + 0.5) +
                        35.0 * std::sin(2.0 * kPi * 3.0 * i / 128.0) +
                        25.0 * std::sin(2.0 * kPi * (2.0 * i + 3.0 * j) / 128.0 + 1.2);
    clamp_range(img, 10, 245);
    return img;
}

Image make_bumpfield128() {
    Image img(128, 128, 128.0);
    ppsr::NormalSampler rng(101);
    for (int b = 0; b < 24; ++b) {
        const double ci = double(rng.bounded(128));
        const double cj = double(rng.bounded(128));
        const double sigma = 4.0 + 8.0 * rng.uniform();
        const double amp = (rng.bounded(2) == 0 ? -1.0 : 1.0) * (35.0 + 40.0 * rng.uniform());
        add_gaussian_bump(img, ci, cj, sigma, amp);
    }
    clamp_range(img, 10, 245);
    return img;
}

Image make_blocks128() {
    Image img(128, 128, 70.0);
    ppsr::NormalSampler rng(202);
    for (int b = 0; b < 20; ++b) {
        const double i0 = double(rng.bounded(112));
        const double j0 = double(rng.bounded(112));
        const double hi = 12.0 + double(rng.bounded(48));
        const double wj = 12.0 + double(rng.bounded(48));
        const double value = 30.0 + 195.0 * rng.uniform();
        add_rect(img, i0, j0, std::min(127.0, i0 + hi), std::min(127.0, j0 + wj), value);
    }
    return img;
}

Image make_radial128() {
    Image img(128, 128);
    for (int i = 0; i < 128; ++i)
        for (int j = 0; j < 128; ++j) {
            const double r = std::hypot(i - 48.0, j - 72.0);
            img(i, j) = 128.0 + 70.0 * std::sin(2.0 * kPi * r / 24.0 + 0.7);
        }
    add_disc(img, 100, 24, 14, 220);
    add_disc(img, 20, 108, 10, 40);
    clamp_range(img, 10, 245);
    return img;
}

// ---- 256x256 reference -----------------------------------------------------------

Image make_ref256() {
    Image img = ramp(256, 60, 180, 1, 2);
    for (int i = 0; i < 256; ++i)
        for (int j = 0; j < 256; ++j)
            img(i, j) += 18.0 * std::sin(2.0 * kPi * 6.0 * j / 256.0) *
                         std::exp(-(i - 64.0) * (i - 64.0) / (2.0 * 40.0 * 40.0));
    add_disc(img, 72, 72, 34, 225);
    add_disc(img, 72, 72, 20, 90);
    add_rect(img, 150, 40, 220, 110, 45);
    add_rect(img, 170, 60, 200, 90, 160);
    add_disc(img, 190, 190, 30, 205);
    add_rect(img, 30, 170, 70, 240, 130);
    add_gaussian_bump(img, 120, 200, 16, 60);
    add_gaussian_bump(img, 230, 60, 12, -55);
    clamp_range(img, 10, 245);
    return img;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "data";
    std::filesystem::create_directories(dir);
    const auto save = [&](const Image& img, const std::string& name) {
        ppsr::save_image(img, dir + "/" + name);
        std::cout << name << " " << img.width() << "x" << img.height() << " checksum "
                  << ppsr::image_checksum(img) << "\n";
    };
    save(make_discs64(), "discs64.pgm");
    save(make_bars64(), "bars64.pgm");
    save(make_waves64(), "waves64.pgm");
    save(make_bumps64(), "bumps64.pgm");
    save(make_blocks64(), "blocks64.pgm");
    save(make_scene64(), "scene64.pgm");
    save(make_plaid128(), "plaid128.pgm");
    save(make_bumpfield128(), "bumpfield128.pgm");
    save(make_blocks128(), "blocks128.pgm");
    save(make_radial128(), "radial128.pgm");
    save(make_ref256(), "ref256.pgm");
    return 0;
}
