#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace bindcert {

/// 64-bit FNV-1a, used for input digests and lattice-operator checksums.
class Fnv1a {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }
    void text(std::string_view s) { bytes(s.data(), s.size()); }
    void number(double x) {
        if (x == 0.0) x = 0.0;  // fold -0
        bytes(&x, sizeof x);
    }
    void number(std::int64_t x) { bytes(&x, sizeof x); }
    void numbers(std::span<const double> xs) {
        for (double x : xs) number(x);
    }
    std::uint64_t value() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hex_digest(std::uint64_t v);

}  // namespace bindcert
