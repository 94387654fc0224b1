#pragma once

#include "error.hpp"
#include "predicates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace morphkit {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline bool lex_less(const Point2& a, const Point2& b)
{
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

/// Triangulation result: index triples into a shared point list, all CCW.
struct TriangleMesh {
    std::vector<Point2> points;
    std::vector<std::array<int, 3>> triangles;
};

/// Plane affine map  [x'; y'] = [a b; c d][x; y] + [tx; ty].
struct AffineMap2 {
    double a = 1.0, b = 0.0, tx = 0.0;
    double c = 0.0, d = 1.0, ty = 0.0;

    Point2 operator()(const Point2& p) const
    {
        return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty};
    }
};

/// True iff p lies strictly inside the circumcircle of the (non-degenerate)
/// triangle; points on the circle count as outside.
inline bool circumcircle_contains(const std::array<Point2, 3>& tri, const Point2& p)
{
    const int o = orient2d_sign(tri[0].x, tri[0].y, tri[1].x, tri[1].y, tri[2].x, tri[2].y);
    if (o == 0)
        fail(errc::degenerate_triangle, "circumcircle_contains: zero-area triangle");
    if (o > 0)
        return incircle_sign(tri[0].x, tri[0].y, tri[1].x, tri[1].y, tri[2].x, tri[2].y, p.x, p.y) > 0;
    return incircle_sign(tri[0].x, tri[0].y, tri[2].x, tri[2].y, tri[1].x, tri[1].y, p.x, p.y) > 0;
}

/// Affine map carrying the src triangle vertices exactly onto dst's.
inline AffineMap2 affine_from_triangles(const std::array<Point2, 3>& src,
                                        const std::array<Point2, 3>& dst)
{
    if (orient2d_sign(src[0].x, src[0].y, src[1].x, src[1].y, src[2].x, src[2].y) == 0)
        fail(errc::degenerate_source, "affine_from_triangles: source triangle has zero area");

    const double u1x = src[1].x - src[0].x, u1y = src[1].y - src[0].y;
    const double u2x = src[2].x - src[0].x, u2y = src[2].y - src[0].y;
    const double v1x = dst[1].x - dst[0].x, v1y = dst[1].y - dst[0].y;
    const double v2x = dst[2].x - dst[0].x, v2y = dst[2].y - dst[0].y;
    const double det = u1x * u2y - u2x * u1y;

    AffineMap2 m;
    m.a = (v1x * u2y - v2x * u1y) / det;
    m.b = (v2x * u1x - v1x * u2x) / det;
    m.c = (v1y * u2y - v2y * u1y) / det;
    m.d = (v2y * u1x - v1y * u2x) / det;
    m.tx = dst[0].x - (m.a * src[0].x + m.b * src[0].y);
    m.ty = dst[0].y - (m.c * src[0].x + m.d * src[0].y);
    return m;
}

/// Barycentric coordinates of p with respect to a non-degenerate triangle.
inline std::array<double, 3> barycentric(const std::array<Point2, 3>& tri, const Point2& p)
{
    if (orient2d_sign(tri[0].x, tri[0].y, tri[1].x, tri[1].y, tri[2].x, tri[2].y) == 0)
        fail(errc::degenerate_triangle, "barycentric: zero-area triangle");

    const auto cross = [](double ox, double oy, double px_, double py_, double qx, double qy) {
        return (px_ - ox) * (qy - oy) - (py_ - oy) * (qx - ox);
    };
    const double det = cross(tri[0].x, tri[0].y, tri[1].x, tri[1].y, tri[2].x, tri[2].y);
    const double l0 = cross(p.x, p.y, tri[1].x, tri[1].y, tri[2].x, tri[2].y) / det;
    const double l1 = cross(p.x, p.y, tri[2].x, tri[2].y, tri[0].x, tri[0].y) / det;
    const double l2 = cross(p.x, p.y, tri[0].x, tri[0].y, tri[1].x, tri[1].y) / det;
    return {l0, l1, l2};
}

namespace detail {

inline constexpr double duplicate_tolerance = 1e-9; // px

// Rotate so the smallest vertex index comes first, preserving orientation,
// then order triangles lexicographically.
inline void canonical_order(std::vector<std::array<int, 3>>& tris)
{
    for (auto& t : tris) {
        while (!(t[0] < t[1] && t[0] < t[2]))
            t = {t[1], t[2], t[0]};
    }
    std::sort(tris.begin(), tris.end());
}

// Flip every exactly-co-circular quad whose diagonal misses the
// lexicographically smallest of its four vertices. Pass-capped: five or more
// points on one circle admit no canonical quad form, and the cap keeps the
// pass deterministic either way.
inline void canonicalize_cocircular(const std::vector<Point2>& pts,
                                    std::vector<std::array<int, 3>>& tris)
{
    const int flip_cap = 3 * static_cast<int>(tris.size()) + 16;
    for (int flips = 0; flips < flip_cap;) {
        canonical_order(tris);

        std::map<std::pair<int, int>, std::vector<int>> edge_tris;
        for (int t = 0; t < static_cast<int>(tris.size()); ++t)
            for (int e = 0; e < 3; ++e) {
                const int u = tris[t][e], v = tris[t][(e + 1) % 3];
                edge_tris[{std::min(u, v), std::max(u, v)}].push_back(t);
            }

        bool flipped = false;
        for (const auto& [edge, owners] : edge_tris) {
            if (owners.size() != 2)
                continue;
            const auto& t1 = tris[owners[0]];
            const auto& t2 = tris[owners[1]];
            const auto opposite = [&](const std::array<int, 3>& t) {
                for (int v : t)
                    if (v != edge.first && v != edge.second)
                        return v;
                return -1;
            };
            const int w1 = opposite(t1), w2 = opposite(t2);
            if (incircle_sign(pts[t1[0]].x, pts[t1[0]].y, pts[t1[1]].x, pts[t1[1]].y,
                              pts[t1[2]].x, pts[t1[2]].y, pts[w2].x, pts[w2].y) != 0)
                continue;

            int lex = edge.first;
            for (int v : {edge.second, w1, w2})
                if (lex_less(pts[v], pts[lex]))
                    lex = v;
            if (lex == edge.first || lex == edge.second)
                continue; // diagonal already owns the lexicographic minimum

            // Orient the shared edge as it appears in t1, then retriangulate
            // the quad across (w1, w2).
            int u = edge.first, v = edge.second;
            for (int e = 0; e < 3; ++e)
                if (t1[e] == v && t1[(e + 1) % 3] == u)
                    std::swap(u, v);
            tris[owners[0]] = {w1, u, w2};
            tris[owners[1]] = {w2, v, w1};
            flipped = true;
            ++flips;
            break; // edge map is stale after a flip; rescan
        }
        if (!flipped)
            break;
    }
    canonical_order(tris);
}

} // namespace detail

/// Delaunay triangulation by incremental Bowyer-Watson insertion into a
/// super-triangle. Deterministic: fixed insertion order, exact predicates,
/// lexicographic diagonals on co-circular quads, canonical output order.
inline TriangleMesh delaunay(const std::vector<Point2>& input)
{
    const int n = static_cast<int>(input.size());
    if (n < 3)
        fail(errc::too_few_points, "delaunay: need at least 3 points, got " + std::to_string(n));
    for (const auto& p : input)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            fail(errc::non_finite, "delaunay: non-finite coordinate");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double dx = input[i].x - input[j].x, dy = input[i].y - input[j].y;
            if (dx * dx + dy * dy < detail::duplicate_tolerance * detail::duplicate_tolerance)
                fail(errc::duplicate_points, "delaunay: points " + std::to_string(i) + " and "
                                                 + std::to_string(j) + " coincide");
        }
    bool all_collinear = true;
    for (int k = 2; k < n && all_collinear; ++k)
        if (orient2d_sign(input[0].x, input[0].y, input[1].x, input[1].y, input[k].x, input[k].y) != 0)
            all_collinear = false;
    if (all_collinear)
        fail(errc::collinear_input, "delaunay: all points are collinear");

    double minx = input[0].x, maxx = input[0].x, miny = input[0].y, maxy = input[0].y;
    for (const auto& p : input) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }
    const double cx = (minx + maxx) / 2.0, cy = (miny + maxy) / 2.0;
    const double m = std::max({maxx - minx, maxy - miny, 1.0});

    std::vector<Point2> pts = input;
    pts.push_back({cx - 40.0 * m, cy - 25.0 * m});
    pts.push_back({cx + 40.0 * m, cy - 25.0 * m});
    pts.push_back({cx, cy + 50.0 * m});

    std::vector<std::array<int, 3>> tris{{n, n + 1, n + 2}};

    for (int i = 0; i < n; ++i) {
        const Point2& p = pts[i];
        std::vector<std::array<int, 3>> keep;
        std::vector<std::array<int, 3>> bad;
        keep.reserve(tris.size());
        for (const auto& t : tris) {
            if (incircle_sign(pts[t[0]].x, pts[t[0]].y, pts[t[1]].x, pts[t[1]].y,
                              pts[t[2]].x, pts[t[2]].y, p.x, p.y) > 0)
                bad.push_back(t);
            else
                keep.push_back(t);
        }

        // Cavity boundary: directed edges of bad triangles whose reverse is
        // not also a bad-triangle edge.
        std::map<std::pair<int, int>, int> directed;
        for (const auto& t : bad)
            for (int e = 0; e < 3; ++e)
                directed[{t[e], t[(e + 1) % 3]}] = 1;
        for (const auto& t : bad)
            for (int e = 0; e < 3; ++e) {
                const int u = t[e], v = t[(e + 1) % 3];
                if (!directed.count({v, u}))
                    keep.push_back({u, v, i});
            }
        tris = std::move(keep);
    }

    TriangleMesh mesh;
    mesh.points = input;
    for (const auto& t : tris)
        if (t[0] < n && t[1] < n && t[2] < n)
            mesh.triangles.push_back(t);
    detail::canonicalize_cocircular(mesh.points, mesh.triangles);
    return mesh;
}

} // namespace morphkit
