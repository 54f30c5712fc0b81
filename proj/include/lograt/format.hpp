#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace lograt {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace lograt
