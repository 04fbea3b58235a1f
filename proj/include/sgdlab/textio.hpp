#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace sgdlab {

// Shortest round-trip decimal form, independent of the global locale.
// All emitted files go through these, which is what makes reruns
// byte-identical.
inline std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fmt(std::int64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fmt(std::uint64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fmt(bool v) { return v ? "1" : "0"; }

}  // namespace sgdlab
