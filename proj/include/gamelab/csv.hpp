#pragma once

#include <cstdio>
#include <ostream>
#include <string>

namespace gamelab {

// All CSV numerics go through one formatter so that artifact bytes are
// reproducible run to run.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ostream& put_double(std::ostream& os, double v) { return os << fmt_double(v); }

}  // namespace gamelab
