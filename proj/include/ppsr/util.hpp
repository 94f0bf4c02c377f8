#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace ppsr {

// Wraps an index into [0, n). Works for any i > -n * 2^31, which covers
// every offset produced by kernels and finite differences here.
inline int wrap_index(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

// FNV-1a, used for file checksums and stable cell seeds.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t hash = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= p[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t hash = 0xcbf29ce484222325ULL) {
    return fnv1a64(s.data(), s.size(), hash);
}

// Little-endian serialization helpers. Values are written byte by byte so
// the on-disk layout does not depend on host endianness.
inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline void put_f64(std::vector<unsigned char>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

inline std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
    return v;
}

inline std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return v;
}

inline double get_f64(const unsigned char* p) {
    std::uint64_t bits = get_u64(p);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

}  // namespace ppsr
