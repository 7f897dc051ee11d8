#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace pmhd {

/// Shortest round-trip decimal form of a double. Deterministic for identical
/// bit patterns, so reports built from it are byte-stable.
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace pmhd
