#pragma once

#include "csv.hpp"
#include "error.hpp"
#include "imaging.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

// Generator-agnostic latent-space morphing: linear interpolation between two
// latent vectors, synthesis delegated to a pluggable backend. A real GAN
// backend (latent projection, identity-loss refinement) would implement
// GeneratorBackend; the bundled backend is a fixed linear decoder so every
// property is checkable bit-exactly without network weights.

namespace morphkit {

struct LatentVector {
    std::vector<double> values;
    std::string space_tag; // e.g. "W-512"
};

class GeneratorBackend {
public:
    virtual ~GeneratorBackend() = default;
    virtual std::string space_tag() const = 0;
    virtual Raster synthesize(const LatentVector& latent) const = 0;
};

/// alpha * wa + (1 - alpha) * wb; both vectors must share space and dimension.
inline LatentVector lerp_latent(const LatentVector& wa, const LatentVector& wb, double alpha)
{
    if (wa.space_tag != wb.space_tag)
        fail(errc::space_mismatch,
             "lerp_latent: '" + wa.space_tag + "' vs '" + wb.space_tag + "'");
    if (wa.values.size() != wb.values.size())
        fail(errc::space_mismatch, "lerp_latent: dimension mismatch ("
                                       + std::to_string(wa.values.size()) + " vs "
                                       + std::to_string(wb.values.size()) + ")");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        fail(errc::out_of_bounds, "lerp_latent: alpha must be in [0,1]");
    LatentVector out;
    out.space_tag = wa.space_tag;
    out.values.resize(wa.values.size());
    for (std::size_t i = 0; i < wa.values.size(); ++i)
        out.values[i] = alpha * wa.values[i] + (1.0 - alpha) * wb.values[i];
    return out;
}

/// Interpolate in latent space, then synthesize the blended vector.
inline Raster latent_morph(const GeneratorBackend& backend, const LatentVector& wa,
                           const LatentVector& wb, double alpha)
{
    if (backend.space_tag() != wa.space_tag)
        fail(errc::space_mismatch, "latent_morph: backend expects '" + backend.space_tag()
                                       + "', got '" + wa.space_tag + "'");
    const LatentVector mid = lerp_latent(wa, wb, alpha);
    try {
        return backend.synthesize(mid);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(errc::backend_failure, std::string("latent_morph: ") + e.what());
    }
}

/// Deterministic test backend: pixel = clamp(round(M w + c)) for a fixed
/// pseudo-random M and c derived from the seed.
class LinearDecoderBackend : public GeneratorBackend {
public:
    LinearDecoderBackend(std::string space_tag, int dim, int width, int height,
                         std::uint64_t seed = 7)
        : space_tag_(std::move(space_tag)), dim_(dim), width_(width), height_(height)
    {
        std::mt19937_64 rng(seed);
        const auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        const std::size_t n = static_cast<std::size_t>(width) * height * 3;
        weights_.resize(n * dim);
        offsets_.resize(n);
        for (auto& w : weights_)
            w = unit() * 2.0 - 1.0;
        for (auto& c : offsets_)
            c = unit() * 255.0;
    }

    std::string space_tag() const override { return space_tag_; }

    /// M w + c before quantization.
    std::vector<double> decode_raw(const LatentVector& latent) const
    {
        if (latent.space_tag != space_tag_ || static_cast<int>(latent.values.size()) != dim_)
            fail(errc::space_mismatch, "decoder expects " + space_tag_ + " of dimension "
                                           + std::to_string(dim_));
        std::vector<double> out(offsets_);
        for (std::size_t p = 0; p < out.size(); ++p) {
            double acc = 0.0;
            const double* row = &weights_[p * dim_];
            for (int k = 0; k < dim_; ++k)
                acc += row[k] * latent.values[k];
            out[p] += acc;
        }
        return out;
    }

    Raster synthesize(const LatentVector& latent) const override
    {
        const auto raw = decode_raw(latent);
        Raster img(width_, height_);
        for (std::size_t i = 0; i < raw.size(); ++i)
            img.pixels[i] = quantize_channel(raw[i]);
        return img;
    }

    int dim() const { return dim_; }
    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& offsets() const { return offsets_; }

private:
    std::string space_tag_;
    int dim_;
    int width_;
    int height_;
    std::vector<double> weights_; // row-major (pixel*channel) x dim
    std::vector<double> offsets_;
};

/// Latent CSV rows: space_tag,v0,v1,...
inline std::vector<LatentVector> load_latents(const std::filesystem::path& path)
{
    const auto rows = csv::read_file(path);
    std::vector<LatentVector> out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() < 2)
            fail(errc::parse_error,
                 path.string() + ": row " + std::to_string(r + 1) + " has no components");
        LatentVector v;
        v.space_tag = rows[r][0];
        for (std::size_t i = 1; i < rows[r].size(); ++i)
            v.values.push_back(csv::parse_double(
                rows[r][i], path.string() + ": row " + std::to_string(r + 1)));
        out.push_back(std::move(v));
    }
    return out;
}

inline void save_latents(const std::vector<LatentVector>& latents,
                         const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> rows;
    for (const auto& v : latents) {
        std::vector<std::string> row{v.space_tag};
        for (double x : v.values)
            row.push_back(csv::format_double(x));
        rows.push_back(std::move(row));
    }
    csv::write_file(path, rows);
}

} // namespace morphkit
