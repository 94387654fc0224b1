#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <cstdint>

// Robust orientation / in-circle predicates: a cheap floating-point filter
// with a Shewchuk-style static error bound, falling back to exact
// arbitrary-precision integer arithmetic on the dyadic decomposition of the
// operands when the filter cannot certify the sign.

namespace morphkit {

namespace detail {

using bigint = boost::multiprecision::cpp_int;

inline constexpr double pred_epsilon = 1.1102230246251565e-16; // 2^-53
inline constexpr double ccw_errbound = (3.0 + 16.0 * pred_epsilon) * pred_epsilon;
inline constexpr double icc_errbound = (10.0 + 96.0 * pred_epsilon) * pred_epsilon;

// value == mantissa * 2^exponent, |mantissa| < 2^53, exact for finite doubles
struct Dyadic {
    std::int64_t mantissa = 0;
    int exponent = 0;
};

inline Dyadic decompose(double v)
{
    if (v == 0.0)
        return {};
    int e = 0;
    const double f = std::frexp(v, &e); // |f| in [0.5, 1)
    return {static_cast<std::int64_t>(std::llround(std::ldexp(f, 53))), e - 53};
}

// Rescale a batch of doubles onto a common power-of-two grid so that
// differences and products can be taken exactly.
template <std::size_t N>
inline std::array<bigint, N> to_common_grid(const std::array<double, N>& values)
{
    std::array<Dyadic, N> parts;
    int emin = 0;
    bool any = false;
    for (std::size_t i = 0; i < N; ++i) {
        parts[i] = decompose(values[i]);
        if (parts[i].mantissa != 0 && (!any || parts[i].exponent < emin)) {
            emin = parts[i].exponent;
            any = true;
        }
    }
    std::array<bigint, N> out;
    for (std::size_t i = 0; i < N; ++i) {
        bigint m(parts[i].mantissa);
        if (parts[i].mantissa != 0)
            m <<= static_cast<unsigned>(parts[i].exponent - emin);
        out[i] = std::move(m);
    }
    return out;
}

inline int orient2d_exact(double ax, double ay, double bx, double by, double cx, double cy)
{
    const auto g = to_common_grid<6>({ax, ay, bx, by, cx, cy});
    const bigint det = (g[2] - g[0]) * (g[5] - g[1]) - (g[3] - g[1]) * (g[4] - g[0]);
    return det.sign();
}

inline int incircle_exact(double ax, double ay, double bx, double by, double cx, double cy,
                          double dx, double dy)
{
    const auto g = to_common_grid<8>({ax, ay, bx, by, cx, cy, dx, dy});
    const bigint adx = g[0] - g[6], ady = g[1] - g[7];
    const bigint bdx = g[2] - g[6], bdy = g[3] - g[7];
    const bigint cdx = g[4] - g[6], cdy = g[5] - g[7];
    const bigint det = (adx * adx + ady * ady) * (bdx * cdy - bdy * cdx)
                     - (bdx * bdx + bdy * bdy) * (adx * cdy - ady * cdx)
                     + (cdx * cdx + cdy * cdy) * (adx * bdy - ady * bdx);
    return det.sign();
}

} // namespace detail

// Sign of twice the signed area of (a,b,c). +1:CCW, -1:CW, 0:collinear.
inline int orient2d_sign(double ax, double ay, double bx, double by, double cx, double cy)
{
    const double detleft = (ax - cx) * (by - cy);
    const double detright = (ay - cy) * (bx - cx);
    const double det = detleft - detright;
    const double errbound = detail::ccw_errbound * (std::fabs(detleft) + std::fabs(detright));
    if (det > errbound)
        return 1;
    if (-det > errbound)
        return -1;
    return detail::orient2d_exact(ax, ay, bx, by, cx, cy);
}

// Position of d relative to the circumcircle of CCW triangle (a,b,c).
// +1:strictly inside, -1:strictly outside, 0:on the circle.
inline int incircle_sign(double ax, double ay, double bx, double by, double cx, double cy,
                         double dx, double dy)
{
    const double adx = ax - dx, ady = ay - dy;
    const double bdx = bx - dx, bdy = by - dy;
    const double cdx = cx - dx, cdy = cy - dy;

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy)
                     + clift * (adxbdy - bdxady);
    const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift
                           + (std::fabs(cdxady) + std::fabs(adxcdy)) * blift
                           + (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    const double errbound = detail::icc_errbound * permanent;
    if (det > errbound)
        return 1;
    if (-det > errbound)
        return -1;
    return detail::incircle_exact(ax, ay, bx, by, cx, cy, dx, dy);
}

} // namespace morphkit
