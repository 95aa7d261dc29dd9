#pragma once

#include <cstdio>
#include <string>

namespace urnbound {

// 17 significant digits: doubles round-trip exactly.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace urnbound
