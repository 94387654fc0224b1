#pragma once

// Independent test oracles. Everything here recomputes expected values by a
// different route than the library: Gaussian elimination for the closed-form
// solves, exhaustive scans for rates and thresholds, and __int128 integer
// geometry for grid-valued point sets.

#include <morphkit/geometry.hpp>
#include <morphkit/metrics.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

namespace oracle {

using morphkit::Point2;

// --- linear algebra ---------------------------------------------------------

// Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::fabs(a[row][col]) > std::fabs(a[pivot][col]))
                pivot = row;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        if (a[col][col] == 0.0)
            throw std::runtime_error("gauss_solve: singular system");
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k)
                a[row][k] -= f * a[col][k];
            b[row] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k)
            s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

// Affine coefficients (a,b,tx,c,d,ty) from the full 6x6 system.
inline std::array<double, 6> affine_coefficients(const std::array<Point2, 3>& src,
                                                 const std::array<Point2, 3>& dst)
{
    std::vector<std::vector<double>> a(6, std::vector<double>(6, 0.0));
    std::vector<double> b(6, 0.0);
    for (int i = 0; i < 3; ++i) {
        a[2 * i] = {src[i].x, src[i].y, 1.0, 0.0, 0.0, 0.0};
        a[2 * i + 1] = {0.0, 0.0, 0.0, src[i].x, src[i].y, 1.0};
        b[2 * i] = dst[i].x;
        b[2 * i + 1] = dst[i].y;
    }
    const auto x = gauss_solve(std::move(a), std::move(b));
    return {x[0], x[1], x[2], x[3], x[4], x[5]};
}

inline std::array<double, 3> barycentric_coefficients(const std::array<Point2, 3>& tri,
                                                      const Point2& p)
{
    std::vector<std::vector<double>> a{{tri[0].x, tri[1].x, tri[2].x},
                                       {tri[0].y, tri[1].y, tri[2].y},
                                       {1.0, 1.0, 1.0}};
    const auto x = gauss_solve(std::move(a), {p.x, p.y, 1.0});
    return {x[0], x[1], x[2]};
}

// --- exact integer geometry for grid points ---------------------------------
// Grid points have coordinates k / 4 with small integer k, so scaling by 4 is
// exact and __int128 arithmetic decides signs exactly.

inline long long grid_scaled(double v)
{
    return std::llround(v * 4.0);
}

inline int orient_grid(const Point2& a, const Point2& b, const Point2& c)
{
    const __int128 ax = grid_scaled(a.x), ay = grid_scaled(a.y);
    const __int128 bx = grid_scaled(b.x), by = grid_scaled(b.y);
    const __int128 cx = grid_scaled(c.x), cy = grid_scaled(c.y);
    const __int128 det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    return det > 0 ? 1 : det < 0 ? -1 : 0;
}

inline int incircle_grid(const Point2& a, const Point2& b, const Point2& c, const Point2& d)
{
    const __int128 adx = grid_scaled(a.x) - grid_scaled(d.x);
    const __int128 ady = grid_scaled(a.y) - grid_scaled(d.y);
    const __int128 bdx = grid_scaled(b.x) - grid_scaled(d.x);
    const __int128 bdy = grid_scaled(b.y) - grid_scaled(d.y);
    const __int128 cdx = grid_scaled(c.x) - grid_scaled(d.x);
    const __int128 cdy = grid_scaled(c.y) - grid_scaled(d.y);
    const __int128 det = (adx * adx + ady * ady) * (bdx * cdy - bdy * cdx)
                       - (bdx * bdx + bdy * bdy) * (adx * cdy - ady * cdx)
                       + (cdx * cdx + cdy * cdy) * (adx * bdy - ady * bdx);
    return det > 0 ? 1 : det < 0 ? -1 : 0;
}

// Number of points on the convex hull boundary: p is on the boundary iff some
// line through p and another point keeps every remaining point on one side.
inline int hull_boundary_count(const std::vector<Point2>& pts)
{
    const int n = static_cast<int>(pts.size());
    int count = 0;
    for (int i = 0; i < n; ++i) {
        bool boundary = false;
        for (int j = 0; j < n && !boundary; ++j) {
            if (j == i)
                continue;
            bool all_left = true, all_right = true;
            for (int k = 0; k < n && (all_left || all_right); ++k) {
                if (k == i || k == j)
                    continue;
                const int o = orient_grid(pts[i], pts[j], pts[k]);
                if (o < 0)
                    all_left = false;
                if (o > 0)
                    all_right = false;
            }
            boundary = all_left || all_right;
        }
        count += boundary ? 1 : 0;
    }
    return count;
}

// Convex hull area via gift wrapping + shoelace (grid points).
inline double hull_area(const std::vector<Point2>& pts)
{
    const int n = static_cast<int>(pts.size());
    int start = 0;
    for (int i = 1; i < n; ++i)
        if (pts[i].x < pts[start].x || (pts[i].x == pts[start].x && pts[i].y < pts[start].y))
            start = i;
    std::vector<int> hull;
    int current = start;
    do {
        hull.push_back(current);
        int next = (current + 1) % n;
        for (int k = 0; k < n; ++k) {
            if (k == current)
                continue;
            const int o = orient_grid(pts[current], pts[k], pts[next]);
            const auto further = [&] {
                const double dk = std::hypot(pts[k].x - pts[current].x, pts[k].y - pts[current].y);
                const double dn = std::hypot(pts[next].x - pts[current].x,
                                             pts[next].y - pts[current].y);
                return dk > dn;
            };
            if (o < 0 || (o == 0 && further()))
                next = k;
        }
        current = next;
    } while (current != start && hull.size() <= pts.size());

    double area2 = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2& p = pts[hull[i]];
        const Point2& q = pts[hull[(i + 1) % hull.size()]];
        area2 += p.x * q.y - q.x * p.y;
    }
    return std::fabs(area2) / 2.0;
}

// --- metric oracles ----------------------------------------------------------

inline double brute_fmr(const std::vector<double>& scores, double threshold)
{
    std::size_t c = 0;
    for (double s : scores)
        c += s >= threshold ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(scores.size());
}

inline double brute_fnmr(const std::vector<double>& scores, double threshold)
{
    std::size_t c = 0;
    for (double s : scores)
        c += s < threshold ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(scores.size());
}

// Exhaustive candidate scan: smallest observed-score threshold meeting the
// target, checking that every smaller candidate fails it.
inline double brute_threshold(const std::vector<double>& scores, double target)
{
    std::vector<double> candidates = scores;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    candidates.push_back(
        std::nextafter(candidates.back(), std::numeric_limits<double>::infinity()));
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (brute_fmr(scores, candidates[i]) <= target) {
            for (std::size_t j = 0; j < i; ++j)
                if (brute_fmr(scores, candidates[j]) <= target)
                    throw std::runtime_error("brute_threshold: minimality violated");
            return candidates[i];
        }
    }
    throw std::runtime_error("brute_threshold: no candidate found");
}

inline double brute_mmpmr(const std::vector<morphkit::MorphAttackRow>& rows, double threshold,
                          morphkit::MmpmrRule rule)
{
    std::set<std::string> morph_ids;
    for (const auto& row : rows)
        morph_ids.insert(row.morph_id);
    std::size_t accepted = 0;
    for (const auto& morph : morph_ids) {
        std::set<std::string> subjects;
        for (const auto& row : rows)
            if (row.morph_id == morph)
                subjects.insert(row.subject_id);
        bool ok = rule == morphkit::MmpmrRule::min;
        for (const auto& subject : subjects) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& row : rows)
                if (row.morph_id == morph && row.subject_id == subject)
                    best = std::max(best, row.score);
            if (rule == morphkit::MmpmrRule::min)
                ok = ok && best >= threshold;
            else
                ok = ok || best >= threshold;
        }
        accepted += ok ? 1 : 0;
    }
    return static_cast<double>(accepted) / static_cast<double>(morph_ids.size());
}

// --- generators --------------------------------------------------------------

// Pairwise-distinct points on a quarter-pixel grid in [0, extent]^2.
inline std::vector<Point2> grid_points(std::mt19937& rng, int n, int extent = 512)
{
    std::uniform_int_distribution<int> coord(0, extent * 4);
    std::set<std::pair<int, int>> used;
    std::vector<Point2> pts;
    while (static_cast<int>(pts.size()) < n) {
        const int kx = coord(rng), ky = coord(rng);
        if (!used.insert({kx, ky}).second)
            continue;
        pts.push_back({kx / 4.0, ky / 4.0});
    }
    return pts;
}

} // namespace oracle
