#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppsr/util.hpp"

namespace ppsr {

/// Dense grayscale image: row-major 64-bit floats, nominal range [0, 255].
/// The same container holds reconstructions, observations, feature maps and
/// error maps; nothing here assumes a particular range except file encoding.
class Image {
public:
    Image() = default;

    Image(int height, int width, double fill = 0.0)
        : h_(height), w_(width), v_(checked_size(height, width), fill) {}

    Image(int height, int width, std::vector<double> data)
        : h_(height), w_(width), v_(std::move(data)) {
        if (v_.size() != checked_size(height, width))
            throw std::invalid_argument("Image: data length does not match dimensions");
    }

    int height() const { return h_; }
    int width() const { return w_; }
    std::size_t pixels() const { return v_.size(); }

    double& operator()(int i, int j) { return v_[std::size_t(i) * w_ + j]; }
    double operator()(int i, int j) const { return v_[std::size_t(i) * w_ + j]; }

    // Circular (periodic) access; i and j may lie outside the grid.
    double wrap(int i, int j) const {
        return v_[std::size_t(wrap_index(i, h_)) * w_ + wrap_index(j, w_)];
    }

    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }

    bool same_size(const Image& o) const { return h_ == o.h_ && w_ == o.w_; }

    bool all_finite() const {
        for (double x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

private:
    static std::size_t checked_size(int h, int w) {
        if (h <= 0 || w <= 0) throw std::invalid_argument("Image: dimensions must be positive");
        return std::size_t(h) * std::size_t(w);
    }

    int h_ = 0, w_ = 0;
    std::vector<double> v_;
};

inline void require_same_size(const Image& a, const Image& b, const char* what) {
    if (!a.same_size(b)) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// ---- elementwise arithmetic -------------------------------------------------

inline Image operator+(const Image& a, const Image& b) {
    require_same_size(a, b, "operator+");
    Image out = a;
    for (std::size_t i = 0; i < out.pixels(); ++i) out.data()[i] += b.data()[i];
    return out;
}

inline Image operator-(const Image& a, const Image& b) {
    require_same_size(a, b, "operator-");
    Image out = a;
    for (std::size_t i = 0; i < out.pixels(); ++i) out.data()[i] -= b.data()[i];
    return out;
}

inline Image operator*(double s, const Image& a) {
    Image out = a;
    for (double& x : out.data()) x *= s;
    return out;
}

inline Image& operator+=(Image& a, const Image& b) {
    require_same_size(a, b, "operator+=");
    for (std::size_t i = 0; i < a.pixels(); ++i) a.data()[i] += b.data()[i];
    return a;
}

// a += s * b
inline void axpy(Image& a, double s, const Image& b) {
    require_same_size(a, b, "axpy");
    for (std::size_t i = 0; i < a.pixels(); ++i) a.data()[i] += s * b.data()[i];
}

inline double dot(const Image& a, const Image& b) {
    require_same_size(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.pixels(); ++i) acc += a.data()[i] * b.data()[i];
    return acc;
}

inline double norm2(const Image& a) { return std::sqrt(dot(a, a)); }

inline double sq_norm(const Image& a) { return dot(a, a); }

// ---- file I/O ---------------------------------------------------------------
//
// Required format is binary PGM (P5, maxval 255). Binary PPM (P6) is accepted
// on read and collapsed to luminance 0.299 R + 0.587 G + 0.114 B. Writing
// clamps to [0, 255] and rounds to nearest integer, so a save/load round trip
// is the identity on integer-valued clamped images.

namespace detail {

inline int pnm_read_token(std::istream& in) {
    // Skips whitespace and '#' comments, then reads one unsigned integer.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF || !std::isdigit(c)) throw std::runtime_error("image load: malformed header");
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1'000'000'000L) throw std::runtime_error("image load: header value out of range");
        c = in.get();
    }
    if (c != EOF) in.unget();
    return static_cast<int>(value);
}

}  // namespace detail

inline Image load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("image load: cannot open '" + path + "'");

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || (m1 != '5' && m1 != '6'))
        throw std::runtime_error("image load: unsupported format in '" + path + "' (need P5/P6)");
    const bool color = (m1 == '6');

    const int w = detail::pnm_read_token(in);
    const int h = detail::pnm_read_token(in);
    const int maxval = detail::pnm_read_token(in);
    if (w <= 0 || h <= 0) throw std::runtime_error("image load: zero-dimension image");
    if (maxval != 255) throw std::runtime_error("image load: only maxval 255 is supported");
    in.get();  // single whitespace byte separating header from raster

    const std::size_t n = std::size_t(h) * w * (color ? 3 : 1);
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(n));
    if (std::size_t(in.gcount()) != n) throw std::runtime_error("image load: truncated raster");

    Image img(h, w);
    if (color) {
        for (std::size_t i = 0; i < img.pixels(); ++i) {
            img.data()[i] = 0.299 * raw[3 * i] + 0.587 * raw[3 * i + 1] + 0.114 * raw[3 * i + 2];
        }
    } else {
        for (std::size_t i = 0; i < img.pixels(); ++i) img.data()[i] = raw[i];
    }
    return img;
}

inline std::vector<unsigned char> encode_pgm(const Image& img) {
    std::string header = "P5\n" + std::to_string(img.width()) + " " +
                         std::to_string(img.height()) + "\n255\n";
    std::vector<unsigned char> bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + img.pixels());
    for (double v : img.data()) {
        const double c = std::clamp(v, 0.0, 255.0);
        bytes.push_back(static_cast<unsigned char>(std::lround(c)));
    }
    return bytes;
}

// Writes to a temporary and renames so a failure never leaves a partial file.
inline void write_file_atomic(const std::string& path, const void* data, std::size_t len) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write: cannot open '" + tmp + "'");
        out.write(static_cast<const char*>(data), std::streamsize(len));
        if (!out) throw std::runtime_error("write: failed for '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline void save_image(const Image& img, const std::string& path) {
    if (img.pixels() == 0) throw std::invalid_argument("save_image: empty image");
    const auto bytes = encode_pgm(img);
    write_file_atomic(path, bytes.data(), bytes.size());
}

// Checksum of the encoded PGM bytes; stable fingerprint for shipped files.
inline std::uint64_t image_checksum(const Image& img) {
    const auto bytes = encode_pgm(img);
    return fnv1a64(bytes.data(), bytes.size());
}

}  // namespace ppsr
