#pragma once

#include <cstdio>
#include <string>

namespace vmfgs::csv {

/// All numeric output in the project goes through this formatter: 17
/// significant digits round-trip an IEEE double exactly, which keeps golden
/// files stable across platforms.
inline std::string formatDouble(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace vmfgs::csv
