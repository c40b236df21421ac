#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "kupred/util/error.hpp"

namespace kupred {

// Shortest decimal text that round-trips the exact double. Integral values
// print without an exponent or trailing ".0" so feature CSVs stay diffable.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "NA";
    if (v == static_cast<double>(static_cast<int64_t>(v)) &&
        std::abs(v) < 1e15) {
        return std::to_string(static_cast<int64_t>(v));
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
    if (s == "NA" || s.empty()) return std::nan("");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw SchemaError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

} // namespace kupred
