#pragma once

#include <cstdio>
#include <optional>
#include <string>

namespace femcert {

// 17 significant digits, C locale, round-trip safe.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string csv_cell(const std::optional<double>& x) {
    return x ? fmt17(*x) : std::string{};
}

} // namespace femcert
