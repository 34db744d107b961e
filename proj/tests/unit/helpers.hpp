#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "wkit/qseries.hpp"

namespace wkit::testing {

inline double rel_err(cplx a, cplx b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Deterministic spread of points on an annulus, independent of the library sampler.
inline cplx ring_point(int i, double rmin, double rmax, double amax) {
    const double t = (i + 0.5) / 17.0;
    const double r = rmin * std::pow(rmax / rmin, std::fmod(t * 7.0, 1.0));
    const double a = -amax + 2.0 * amax * std::fmod(t * 3.0, 1.0);
    return std::polar(r, a);
}

}  // namespace wkit::testing
