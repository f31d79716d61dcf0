#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace webforge {

// FNV-1a, 64-bit. Used for content-addressing artifacts and fingerprinting
// canonical trajectory encodings.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline std::string content_hash(std::string_view bytes) {
    // Two passes with different seeds -> 128-bit hex name; collisions are
    // a non-issue at the corpus sizes this store handles.
    std::uint64_t a = fnv1a64(bytes);
    std::uint64_t b = fnv1a64(bytes, 0x9e3779b97f4a7c15ull);
    return to_hex(a) + to_hex(b);
}

} // namespace webforge
