#pragma once

#include "csv.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "imaging.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

// Landmark-based morphing: triangulate averaged landmarks, warp both sources
// onto the shared geometry, alpha-blend pixel-wise.

namespace morphkit {

struct LandmarkSet {
    std::string image_path;
    std::vector<Point2> points;
    std::string scheme; // "68", "189", "custom-<k>"
};

struct MorphSpec {
    Raster image_a;
    LandmarkSet landmarks_a;
    Raster image_b;
    LandmarkSet landmarks_b;
    double alpha = 0.5; // result = alpha * A + (1 - alpha) * B
};

/// Expected point count for a landmark scheme tag.
inline int scheme_point_count(const std::string& scheme)
{
    std::string digits = scheme;
    if (scheme.rfind("custom-", 0) == 0)
        digits = scheme.substr(7);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](unsigned char c) { return std::isdigit(c); }))
        fail(errc::parse_error, "unrecognized landmark scheme '" + scheme + "'");
    return static_cast<int>(csv::parse_long(digits, "scheme '" + scheme + "'"));
}

/// Parse a landmark text file: one "x y" pair per line, '#' comments allowed.
/// When image dimensions are given, points outside [0,w]x[0,h] are rejected.
inline LandmarkSet load_landmarks(const std::filesystem::path& path, const std::string& scheme,
                                  int image_width = -1, int image_height = -1)
{
    std::ifstream in(path);
    if (!in)
        fail(errc::io_failure, path.string() + ": cannot open for reading");

    LandmarkSet set;
    set.scheme = scheme;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ss(line);
        double x = 0.0, y = 0.0;
        if (!(ss >> x))
            continue; // blank or comment-only line
        std::string rest;
        if (!(ss >> y) || (ss >> rest))
            fail(errc::parse_error,
                 path.string() + ":" + std::to_string(lineno) + ": expected 'x y'");
        if (!std::isfinite(x) || !std::isfinite(y))
            fail(errc::parse_error,
                 path.string() + ":" + std::to_string(lineno) + ": non-finite coordinate");
        set.points.push_back({x, y});
    }

    const int expected = scheme_point_count(scheme);
    if (static_cast<int>(set.points.size()) != expected)
        fail(errc::count_mismatch, path.string() + ": scheme '" + scheme + "' expects "
                                       + std::to_string(expected) + " points, file has "
                                       + std::to_string(set.points.size()));
    if (image_width >= 0 && image_height >= 0)
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            const auto& p = set.points[i];
            if (p.x < 0.0 || p.x > image_width || p.y < 0.0 || p.y > image_height)
                fail(errc::out_of_bounds, path.string() + ": landmark " + std::to_string(i)
                                              + " outside image bounds");
        }
    return set;
}

/// Load with the scheme inferred from the point count ("custom-<k>").
inline LandmarkSet load_landmarks_auto(const std::filesystem::path& path, int image_width = -1,
                                       int image_height = -1)
{
    std::ifstream in(path);
    if (!in)
        fail(errc::io_failure, path.string() + ": cannot open for reading");
    int count = 0;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ss(line);
        double x;
        if (ss >> x)
            ++count;
    }
    return load_landmarks(path, "custom-" + std::to_string(count), image_width, image_height);
}

/// Append the 4 image corners and 4 edge midpoints (fixed order) so the
/// triangulation covers the whole frame.
inline std::vector<Point2> augment_border(const std::vector<Point2>& points, int width, int height)
{
    if (width < 2 || height < 2)
        fail(errc::out_of_bounds, "augment_border: image must be at least 2x2");
    const double r = width - 1.0, b = height - 1.0;
    std::vector<Point2> out = points;
    out.push_back({0.0, 0.0});
    out.push_back({r, 0.0});
    out.push_back({0.0, b});
    out.push_back({r, b});
    out.push_back({r / 2.0, 0.0});
    out.push_back({r / 2.0, b});
    out.push_back({0.0, b / 2.0});
    out.push_back({r, b / 2.0});
    return out;
}

/// Elementwise alpha * pa + (1 - alpha) * pb.
inline std::vector<Point2> average_points(const std::vector<Point2>& pa,
                                          const std::vector<Point2>& pb, double alpha)
{
    if (pa.size() != pb.size())
        fail(errc::length_mismatch, "average_points: " + std::to_string(pa.size()) + " vs "
                                        + std::to_string(pb.size()) + " points");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        fail(errc::out_of_bounds, "average_points: alpha must be in [0,1]");
    std::vector<Point2> out(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i)
        out[i] = {alpha * pa[i].x + (1.0 - alpha) * pb[i].x,
                  alpha * pa[i].y + (1.0 - alpha) * pb[i].y};
    return out;
}

/// Piecewise-affine warp of src onto the destination geometry. Each pixel
/// covered by a mesh triangle is pulled through that triangle's inverse
/// affine map and bilinearly sampled; uncovered pixels copy from src.
inline Raster warp_to(const Raster& src, const std::vector<Point2>& src_pts,
                      const std::vector<Point2>& dst_pts, const TriangleMesh& mesh)
{
    if (src_pts.size() != dst_pts.size())
        fail(errc::mesh_mismatch, "warp_to: source and destination point counts differ");
    if (mesh.points.size() != dst_pts.size())
        fail(errc::mesh_mismatch, "warp_to: mesh does not triangulate the destination points");
    for (const auto& t : mesh.triangles)
        for (int v : t)
            if (v < 0 || v >= static_cast<int>(dst_pts.size()))
                fail(errc::mesh_mismatch, "warp_to: triangle index out of range");

    Raster out = src;
    std::vector<std::uint8_t> written(static_cast<std::size_t>(src.width) * src.height, 0);

    for (const auto& t : mesh.triangles) {
        const std::array<Point2, 3> dst_tri{dst_pts[t[0]], dst_pts[t[1]], dst_pts[t[2]]};
        const std::array<Point2, 3> src_tri{src_pts[t[0]], src_pts[t[1]], src_pts[t[2]]};
        const int orient = orient2d_sign(dst_tri[0].x, dst_tri[0].y, dst_tri[1].x, dst_tri[1].y,
                                         dst_tri[2].x, dst_tri[2].y);
        if (orient == 0)
            continue;
        const AffineMap2 to_src = affine_from_triangles(dst_tri, src_tri);

        const double minx = std::min({dst_tri[0].x, dst_tri[1].x, dst_tri[2].x});
        const double maxx = std::max({dst_tri[0].x, dst_tri[1].x, dst_tri[2].x});
        const double miny = std::min({dst_tri[0].y, dst_tri[1].y, dst_tri[2].y});
        const double maxy = std::max({dst_tri[0].y, dst_tri[1].y, dst_tri[2].y});
        const int x0 = std::max(0, static_cast<int>(std::ceil(minx)));
        const int x1 = std::min(src.width - 1, static_cast<int>(std::floor(maxx)));
        const int y0 = std::max(0, static_cast<int>(std::ceil(miny)));
        const int y1 = std::min(src.height - 1, static_cast<int>(std::floor(maxy)));

        for (int py = y0; py <= y1; ++py)
            for (int px = x0; px <= x1; ++px) {
                if (written[static_cast<std::size_t>(py) * src.width + px])
                    continue;
                const double fx = px, fy = py;
                const int o0 = orient2d_sign(dst_tri[0].x, dst_tri[0].y, dst_tri[1].x,
                                             dst_tri[1].y, fx, fy);
                const int o1 = orient2d_sign(dst_tri[1].x, dst_tri[1].y, dst_tri[2].x,
                                             dst_tri[2].y, fx, fy);
                const int o2 = orient2d_sign(dst_tri[2].x, dst_tri[2].y, dst_tri[0].x,
                                             dst_tri[0].y, fx, fy);
                if (orient * o0 < 0 || orient * o1 < 0 || orient * o2 < 0)
                    continue;
                const Point2 s = to_src({fx, fy});
                const auto rgb = sample_bilinear(src, s.x, s.y);
                for (int ch = 0; ch < 3; ++ch)
                    out.at(px, py, ch) = quantize_channel(rgb[ch]);
                written[static_cast<std::size_t>(py) * src.width + px] = 1;
            }
    }
    return out;
}

/// Full landmark morph: border augmentation, point averaging, one shared
/// Delaunay mesh on the averaged points, two warps, alpha blend.
inline Raster morph(const MorphSpec& spec)
{
    if (spec.landmarks_a.scheme != spec.landmarks_b.scheme)
        fail(errc::scheme_mismatch, "morph: landmark schemes differ ('" + spec.landmarks_a.scheme
                                        + "' vs '" + spec.landmarks_b.scheme + "')");
    if (spec.landmarks_a.points.size() != spec.landmarks_b.points.size())
        fail(errc::count_mismatch, "morph: landmark counts differ");
    if (spec.image_a.width != spec.image_b.width || spec.image_a.height != spec.image_b.height)
        fail(errc::dimension_mismatch, "morph: image dimensions differ");
    if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0))
        fail(errc::out_of_bounds, "morph: alpha must be in [0,1]");
    const int w = spec.image_a.width, h = spec.image_a.height;
    for (const auto* lm : {&spec.landmarks_a, &spec.landmarks_b})
        for (const auto& p : lm->points)
            if (p.x < 0.0 || p.x > w || p.y < 0.0 || p.y > h)
                fail(errc::out_of_bounds, "morph: landmark outside image bounds");

    const auto aug_a = augment_border(spec.landmarks_a.points, w, h);
    const auto aug_b = augment_border(spec.landmarks_b.points, w, h);
    const auto avg = average_points(aug_a, aug_b, spec.alpha);
    const TriangleMesh mesh = delaunay(avg);

    const Raster warped_a = warp_to(spec.image_a, aug_a, avg, mesh);
    const Raster warped_b = warp_to(spec.image_b, aug_b, avg, mesh);

    Raster out(w, h);
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = quantize_channel(spec.alpha * warped_a.pixels[i]
                                         + (1.0 - spec.alpha) * warped_b.pixels[i]);
    return out;
}

struct MorphPairEntry {
    std::string id_a, image_a, landmarks_a;
    std::string id_b, image_b, landmarks_b;
};

struct MorphResult {
    std::string output; // file name within the output directory
    std::string id_a, id_b;
    double alpha = 0.5;
    bool ok = false;
    std::string message;
};

/// Pair list CSV: header id_a,image_a,landmarks_a,id_b,image_b,landmarks_b.
inline std::vector<MorphPairEntry> load_pair_list(const std::filesystem::path& path)
{
    const auto rows = csv::read_file(path);
    if (rows.empty() || rows[0] != std::vector<std::string>{"id_a", "image_a", "landmarks_a",
                                                            "id_b", "image_b", "landmarks_b"})
        fail(errc::parse_error, path.string() + ": bad or missing pair-list header");
    std::vector<MorphPairEntry> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 6)
            fail(errc::parse_error,
                 path.string() + ": row " + std::to_string(r + 1) + " has "
                     + std::to_string(rows[r].size()) + " fields, expected 6");
        out.push_back({rows[r][0], rows[r][1], rows[r][2], rows[r][3], rows[r][4], rows[r][5]});
    }
    return out;
}

/// Morph every pair, writing "<idA>_<idB>_<alpha>.png" plus a manifest CSV
/// (output,id_a,id_b,alpha,status,message). Per-pair failures are recorded,
/// not fatal. Outputs are byte-identical for any job count.
inline std::vector<MorphResult> batch_morph(const std::vector<MorphPairEntry>& pairs, double alpha,
                                            const std::filesystem::path& out_dir, int jobs = 1)
{
    std::filesystem::create_directories(out_dir);
    std::vector<MorphResult> results(pairs.size());

    const auto run_one = [&](std::size_t i) {
        MorphResult& res = results[i];
        const MorphPairEntry& pair = pairs[i];
        res.id_a = pair.id_a;
        res.id_b = pair.id_b;
        res.alpha = alpha;
        res.output = pair.id_a + "_" + pair.id_b + "_" + csv::format_double(alpha) + ".png";
        try {
            MorphSpec spec;
            spec.alpha = alpha;
            spec.image_a = read_image(pair.image_a);
            spec.image_b = read_image(pair.image_b);
            spec.landmarks_a =
                load_landmarks_auto(pair.landmarks_a, spec.image_a.width, spec.image_a.height);
            spec.landmarks_b =
                load_landmarks_auto(pair.landmarks_b, spec.image_b.width, spec.image_b.height);
            write_image(morph(spec), out_dir / res.output, ImageFormat::png);
            res.ok = true;
        } catch (const std::exception& e) {
            res.ok = false;
            res.message = e.what();
        }
    };

    jobs = std::max(1, jobs);
    if (jobs == 1 || pairs.size() <= 1) {
        for (std::size_t i = 0; i < pairs.size(); ++i)
            run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        const int count = std::min<std::size_t>(jobs, pairs.size());
        for (int t = 0; t < count; ++t)
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1))
                    run_one(i);
            });
        for (auto& worker : workers)
            worker.join();
    }

    std::vector<std::vector<std::string>> manifest{
        {"output", "id_a", "id_b", "alpha", "status", "message"}};
    for (const auto& res : results)
        manifest.push_back({res.output, res.id_a, res.id_b, csv::format_double(res.alpha),
                            res.ok ? "ok" : "error", res.message});
    csv::write_file(out_dir / "morphs.csv", manifest);
    return results;
}

} // namespace morphkit
