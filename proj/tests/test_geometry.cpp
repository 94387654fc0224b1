#include <morphkit/geometry.hpp>

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

using namespace morphkit;

namespace {

// Random triangle with an area floor so closed-form and elimination agree
// to tight tolerances.
std::array<Point2, 3> random_triangle(std::mt19937& rng, double extent = 100.0)
{
    std::uniform_real_distribution<double> coord(0.0, extent);
    while (true) {
        std::array<Point2, 3> tri{{{coord(rng), coord(rng)},
                                   {coord(rng), coord(rng)},
                                   {coord(rng), coord(rng)}}};
        const double area2 = (tri[1].x - tri[0].x) * (tri[2].y - tri[0].y)
                           - (tri[1].y - tri[0].y) * (tri[2].x - tri[0].x);
        if (std::fabs(area2) > 2.0)
            return tri;
    }
}

std::set<std::pair<int, int>> mesh_edges(const TriangleMesh& mesh)
{
    std::set<std::pair<int, int>> edges;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e)
            edges.insert({std::min(t[e], t[(e + 1) % 3]), std::max(t[e], t[(e + 1) % 3])});
    return edges;
}

void check_delaunay_invariants(const std::vector<Point2>& pts, const TriangleMesh& mesh)
{
    const int n = static_cast<int>(pts.size());
    REQUIRE(mesh.points == pts);
    for (const auto& t : mesh.triangles) {
        for (int v : t) {
            REQUIRE(v >= 0);
            REQUIRE(v < n);
        }
        // positive area, CCW
        REQUIRE(orient2d_sign(pts[t[0]].x, pts[t[0]].y, pts[t[1]].x, pts[t[1]].y, pts[t[2]].x,
                              pts[t[2]].y)
                == 1);
    }

    // strict empty-circumcircle over every (triangle, point) pair
    for (const auto& t : mesh.triangles) {
        const std::array<Point2, 3> tri{pts[t[0]], pts[t[1]], pts[t[2]]};
        for (int p = 0; p < n; ++p)
            REQUIRE_FALSE(circumcircle_contains(tri, pts[p]));
    }

    // Euler count against the exhaustive-orientation hull oracle
    const int h = oracle::hull_boundary_count(pts);
    REQUIRE(static_cast<int>(mesh.triangles.size()) == 2 * n - 2 - h);

    // covered area equals hull area
    double area_sum = 0.0;
    for (const auto& t : mesh.triangles)
        area_sum += std::fabs((pts[t[1]].x - pts[t[0]].x) * (pts[t[2]].y - pts[t[0]].y)
                              - (pts[t[1]].y - pts[t[0]].y) * (pts[t[2]].x - pts[t[0]].x))
                    / 2.0;
    const double hull = oracle::hull_area(pts);
    REQUIRE(area_sum == Catch::Approx(hull).epsilon(1e-6));
}

} // namespace

TEST_CASE("orientation predicate agrees with exact integer oracle")
{
    REQUIRE(orient2d_sign(0, 0, 1, 0, 0, 1) == 1);
    REQUIRE(orient2d_sign(0, 0, 0, 1, 1, 0) == -1);
    REQUIRE(orient2d_sign(0, 0, 1, 1, 2, 2) == 0);

    std::mt19937 rng(11);
    for (int it = 0; it < 2000; ++it) {
        const auto pts = oracle::grid_points(rng, 3, 64);
        REQUIRE(orient2d_sign(pts[0].x, pts[0].y, pts[1].x, pts[1].y, pts[2].x, pts[2].y)
                == oracle::orient_grid(pts[0], pts[1], pts[2]));
    }

    // near-collinear: the filter cannot decide, the exact path must
    const double eps = std::ldexp(1.0, -45);
    REQUIRE(orient2d_sign(0.5, 0.5, 12.5, 12.5, 24.5, 24.5 + eps) == 1);
    REQUIRE(orient2d_sign(0.5, 0.5, 12.5, 12.5, 24.5, 24.5 - eps) == -1);
    REQUIRE(orient2d_sign(0.5, 0.5, 12.5, 12.5, 24.5, 24.5) == 0);
}

TEST_CASE("in-circle predicate: trivial cases and exact ties")
{
    const std::array<Point2, 3> tri{{{0, 0}, {1, 0}, {0, 1}}};
    REQUIRE(circumcircle_contains(tri, {0.25, 0.25}));
    REQUIRE_FALSE(circumcircle_contains(tri, {1.0, 1.0})); // on the circle, not strictly inside
    const std::array<Point2, 3> tri2{{{0, 0}, {2, 0}, {0, 2}}};
    REQUIRE_FALSE(circumcircle_contains(tri2, {5.0, 5.0}));

    // clockwise input is normalized, not rejected
    const std::array<Point2, 3> cw{{{0, 0}, {0, 1}, {1, 0}}};
    REQUIRE(circumcircle_contains(cw, {0.25, 0.25}));

    const std::array<Point2, 3> degenerate{{{0, 0}, {1, 1}, {2, 2}}};
    REQUIRE_THROWS_MATCHES(circumcircle_contains(degenerate, {0, 1}), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return e.code() == errc::degenerate_triangle;
                           }));

    std::mt19937 rng(12);
    int checked = 0;
    while (checked < 1000) {
        const auto pts = oracle::grid_points(rng, 4, 32);
        if (oracle::orient_grid(pts[0], pts[1], pts[2]) == 0)
            continue;
        const std::array<Point2, 3> t{pts[0], pts[1], pts[2]};
        REQUIRE(circumcircle_contains(t, pts[3])
                == (oracle::orient_grid(pts[0], pts[1], pts[2])
                        * oracle::incircle_grid(pts[0], pts[1], pts[2], pts[3])
                    > 0));
        ++checked;
    }
}

TEST_CASE("delaunay: single triangle")
{
    const auto mesh = delaunay({{0, 0}, {1, 0}, {0, 1}});
    REQUIRE(mesh.triangles == std::vector<std::array<int, 3>>{{0, 1, 2}});
}

TEST_CASE("delaunay: four-point set with one interior point")
{
    // (1,1) is interior to the hull of the other three, so every
    // triangulation on all four vertices has 2n-2-h = 3 triangles.
    const std::vector<Point2> pts{{0, 0}, {3, 0}, {1, 1}, {0, 3}};
    const auto mesh = delaunay(pts);
    REQUIRE(mesh.triangles.size() == 3);
    check_delaunay_invariants(pts, mesh);
}

TEST_CASE("delaunay: co-circular quad resolves to the lexicographic diagonal")
{
    const std::vector<Point2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    for (const auto& order : std::vector<std::vector<int>>{{0, 1, 2, 3}, {2, 3, 1, 0},
                                                           {3, 1, 0, 2}, {1, 0, 3, 2}}) {
        std::vector<Point2> pts;
        for (int i : order)
            pts.push_back(square[i]);
        const auto mesh = delaunay(pts);
        REQUIRE(mesh.triangles.size() == 2);

        bool has_main_diagonal = false;
        for (const auto& edge : mesh_edges(mesh)) {
            const Point2 a = pts[edge.first], b = pts[edge.second];
            if ((a == Point2{0, 0} && b == Point2{1, 1}) || (a == Point2{1, 1} && b == Point2{0, 0}))
                has_main_diagonal = true;
            REQUIRE_FALSE((a == Point2{1, 0} && b == Point2{0, 1}));
            REQUIRE_FALSE((a == Point2{0, 1} && b == Point2{1, 0}));
        }
        REQUIRE(has_main_diagonal);
    }
}

TEST_CASE("delaunay: regular grid triangulates deterministically")
{
    std::vector<Point2> pts;
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            pts.push_back({static_cast<double>(x), static_cast<double>(y)});
    const auto mesh = delaunay(pts);
    check_delaunay_invariants(pts, mesh);
    const auto again = delaunay(pts);
    REQUIRE(mesh.triangles == again.triangles);
}

TEST_CASE("delaunay: random point sets satisfy every mesh invariant")
{
    std::mt19937 rng(13);
    for (const int n : {4, 7, 12, 25, 50}) {
        const auto pts = oracle::grid_points(rng, n, 256);
        const auto mesh = delaunay(pts);
        check_delaunay_invariants(pts, mesh);
        REQUIRE(delaunay(pts).triangles == mesh.triangles);
    }
}

TEST_CASE("delaunay: input validation")
{
    const auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        throw std::runtime_error("expected an Error");
    };
    REQUIRE(code_of([] { delaunay({{0, 0}, {1, 1}}); }) == errc::too_few_points);
    REQUIRE(code_of([] { delaunay({{0, 0}, {1, 1}, {1.0 + 1e-10, 1.0}, {2, 0}}); })
            == errc::duplicate_points);
    REQUIRE(code_of([] { delaunay({{0, 0}, {1, 1}, {2, 2}, {3, 3}}); }) == errc::collinear_input);
    REQUIRE(code_of([] {
                delaunay({{0, 0}, {1, 0}, {0, std::numeric_limits<double>::quiet_NaN()}});
            })
            == errc::non_finite);
}

TEST_CASE("affine_from_triangles: exact identities")
{
    std::mt19937 rng(14);
    for (int it = 0; it < 50; ++it) {
        const auto tri = random_triangle(rng);
        const AffineMap2 id = affine_from_triangles(tri, tri);
        REQUIRE(id.a == 1.0);
        REQUIRE(id.b == 0.0);
        REQUIRE(id.c == 0.0);
        REQUIRE(id.d == 1.0);
        REQUIRE(id.tx == 0.0);
        REQUIRE(id.ty == 0.0);
    }

    const std::array<Point2, 3> src{{{1, 2}, {4, 2}, {2, 7}}};
    std::array<Point2, 3> dst = src;
    for (auto& p : dst) {
        p.x += 5.0;
        p.y += 3.0;
    }
    const AffineMap2 shift = affine_from_triangles(src, dst);
    REQUIRE(shift.a == 1.0);
    REQUIRE(shift.b == 0.0);
    REQUIRE(shift.c == 0.0);
    REQUIRE(shift.d == 1.0);
    REQUIRE(shift.tx == 5.0);
    REQUIRE(shift.ty == 3.0);
}

TEST_CASE("affine_from_triangles: matches the elimination oracle on 1000 random instances")
{
    std::mt19937 rng(15);
    for (int it = 0; it < 1000; ++it) {
        const auto src = random_triangle(rng);
        const auto dst = random_triangle(rng);
        const AffineMap2 m = affine_from_triangles(src, dst);
        const auto expected = oracle::affine_coefficients(src, dst);
        REQUIRE(m.a == Catch::Approx(expected[0]).margin(1e-9));
        REQUIRE(m.b == Catch::Approx(expected[1]).margin(1e-9));
        REQUIRE(m.tx == Catch::Approx(expected[2]).margin(1e-9));
        REQUIRE(m.c == Catch::Approx(expected[3]).margin(1e-9));
        REQUIRE(m.d == Catch::Approx(expected[4]).margin(1e-9));
        REQUIRE(m.ty == Catch::Approx(expected[5]).margin(1e-9));

        for (int i = 0; i < 3; ++i) {
            const Point2 mapped = m(src[i]);
            REQUIRE(mapped.x == Catch::Approx(dst[i].x).margin(1e-9));
            REQUIRE(mapped.y == Catch::Approx(dst[i].y).margin(1e-9));
        }
    }
}

TEST_CASE("affine_from_triangles: composition and degeneracy")
{
    std::mt19937 rng(16);
    for (int it = 0; it < 200; ++it) {
        const auto a = random_triangle(rng);
        const auto b = random_triangle(rng);
        const auto c = random_triangle(rng);
        const AffineMap2 ab = affine_from_triangles(a, b);
        const AffineMap2 bc = affine_from_triangles(b, c);
        const AffineMap2 ac = affine_from_triangles(a, c);
        for (int i = 0; i < 3; ++i) {
            const Point2 via = bc(ab(a[i]));
            const Point2 direct = ac(a[i]);
            REQUIRE(via.x == Catch::Approx(direct.x).margin(1e-9));
            REQUIRE(via.y == Catch::Approx(direct.y).margin(1e-9));
        }
    }

    const std::array<Point2, 3> line{{{0, 0}, {1, 1}, {2, 2}}};
    REQUIRE_THROWS_MATCHES(affine_from_triangles(line, line), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return e.code() == errc::degenerate_source;
                           }));
}

TEST_CASE("barycentric: vertices, centroid, oracle, reconstruction")
{
    const std::array<Point2, 3> tri{{{1, 1}, {5, 2}, {2, 6}}};
    const auto at_vertex = barycentric(tri, tri[0]);
    REQUIRE(at_vertex[0] == 1.0);
    REQUIRE(at_vertex[1] == 0.0);
    REQUIRE(at_vertex[2] == 0.0);

    const Point2 centroid{(tri[0].x + tri[1].x + tri[2].x) / 3.0,
                          (tri[0].y + tri[1].y + tri[2].y) / 3.0};
    for (double l : barycentric(tri, centroid))
        REQUIRE(l == Catch::Approx(1.0 / 3.0).margin(1e-12));

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> coord(-50.0, 150.0);
    for (int it = 0; it < 1000; ++it) {
        const auto t = random_triangle(rng);
        const Point2 p{coord(rng), coord(rng)};
        const auto l = barycentric(t, p);
        const auto expected = oracle::barycentric_coefficients(t, p);
        for (int i = 0; i < 3; ++i)
            REQUIRE(l[i] == Catch::Approx(expected[i]).margin(1e-9));
        REQUIRE(l[0] + l[1] + l[2] == Catch::Approx(1.0).margin(1e-12));
        const double rx = l[0] * t[0].x + l[1] * t[1].x + l[2] * t[2].x;
        const double ry = l[0] * t[0].y + l[1] * t[1].y + l[2] * t[2].y;
        REQUIRE(rx == Catch::Approx(p.x).margin(1e-9));
        REQUIRE(ry == Catch::Approx(p.y).margin(1e-9));
    }

    REQUIRE_THROWS_AS(barycentric({{{0, 0}, {1, 1}, {2, 2}}}, {0, 1}), Error);
}
