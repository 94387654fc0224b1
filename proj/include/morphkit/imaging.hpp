#pragma once

#include "error.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace morphkit {

/// 8-bit RGB image, row-major, no padding.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // width * height * 3 bytes

    Raster() = default;
    Raster(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill)
    {
    }

    std::uint8_t& at(int x, int y, int ch)
    {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + ch];
    }
    std::uint8_t at(int x, int y, int ch) const
    {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + ch];
    }

    friend bool operator==(const Raster&, const Raster&) = default;
};

enum class ImageFormat { png, ppm };

/// Round-half-up to the nearest integer, clamped to [0, 255].
inline std::uint8_t quantize_channel(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

/// Bilinear sample with clamp-to-edge; exact at integer coordinates.
inline std::array<double, 3> sample_bilinear(const Raster& img, double x, double y)
{
    x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;

    std::array<double, 3> out{};
    for (int ch = 0; ch < 3; ++ch) {
        const double top = (1.0 - fx) * img.at(x0, y0, ch) + fx * img.at(x1, y0, ch);
        const double bottom = (1.0 - fx) * img.at(x0, y1, ch) + fx * img.at(x1, y1, ch);
        out[ch] = (1.0 - fy) * top + fy * bottom;
    }
    return out;
}

namespace detail {

inline const std::array<std::uint8_t, 8> png_signature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_be32(const std::uint8_t* p)
{
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8)
         | std::uint32_t(p[3]);
}

inline void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                         const std::vector<std::uint8_t>& data)
{
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    std::vector<std::uint8_t> body(type, type + 4);
    body.insert(body.end(), data.begin(), data.end());
    out.insert(out.end(), body.begin(), body.end());
    put_be32(out, static_cast<std::uint32_t>(::crc32(0L, body.data(), static_cast<uInt>(body.size()))));
}

inline std::vector<std::uint8_t> zlib_deflate(const std::vector<std::uint8_t>& raw)
{
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> out(bound);
    if (compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        fail(errc::io_failure, "zlib compression failed");
    out.resize(bound);
    return out;
}

inline std::vector<std::uint8_t> zlib_inflate(const std::vector<std::uint8_t>& compressed,
                                              std::size_t expected_size, const std::string& path)
{
    std::vector<std::uint8_t> out(expected_size);
    uLongf outlen = static_cast<uLongf>(expected_size);
    const int rc = uncompress(out.data(), &outlen, compressed.data(),
                              static_cast<uLong>(compressed.size()));
    if (rc != Z_OK || outlen != expected_size)
        fail(errc::corrupt_file, path + ": bad or truncated PNG image data");
    return out;
}

inline int paeth(int a, int b, int c)
{
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc)
        return a;
    return pb <= pc ? b : c;
}

inline Raster decode_png(const std::vector<std::uint8_t>& bytes, const std::string& path,
                         std::string* warning)
{
    std::size_t pos = png_signature.size();
    bool have_header = false;
    std::uint32_t width = 0, height = 0;
    int channels = 0;
    std::vector<std::uint8_t> idat;

    while (true) {
        if (pos + 8 > bytes.size())
            fail(errc::corrupt_file, path + ": truncated PNG chunk header");
        const std::uint32_t len = get_be32(&bytes[pos]);
        if (pos + 12 + len > bytes.size())
            fail(errc::corrupt_file, path + ": truncated PNG chunk");
        const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
        const std::uint8_t* data = &bytes[pos + 8];
        const std::uint32_t crc_stored = get_be32(&bytes[pos + 8 + len]);
        if (crc_stored != static_cast<std::uint32_t>(::crc32(0L, &bytes[pos + 4], 4 + len)))
            fail(errc::corrupt_file, path + ": PNG chunk CRC mismatch");

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13)
                fail(errc::corrupt_file, path + ": bad IHDR length");
            width = get_be32(data);
            height = get_be32(data + 4);
            const int bitdepth = data[8], colortype = data[9];
            const int compression = data[10], filter = data[11], interlace = data[12];
            if (bitdepth != 8 || (colortype != 2 && colortype != 6))
                fail(errc::unsupported_format,
                     path + ": only 8-bit RGB or RGBA PNG is supported");
            if (compression != 0 || filter != 0 || interlace != 0)
                fail(errc::unsupported_format, path + ": unsupported PNG encoding options");
            if (width == 0 || height == 0 || width > (1u << 24) || height > (1u << 24))
                fail(errc::corrupt_file, path + ": implausible PNG dimensions");
            channels = colortype == 2 ? 3 : 4;
            have_header = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            if (!have_header)
                fail(errc::corrupt_file, path + ": IDAT before IHDR");
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }
    if (!have_header || idat.empty())
        fail(errc::corrupt_file, path + ": missing PNG image data");

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    const std::vector<std::uint8_t> raw = zlib_inflate(idat, (stride + 1) * height, path);

    std::vector<std::uint8_t> image(stride * height);
    for (std::uint32_t y = 0; y < height; ++y) {
        const std::uint8_t filter_type = raw[y * (stride + 1)];
        const std::uint8_t* src = &raw[y * (stride + 1) + 1];
        std::uint8_t* cur = &image[y * stride];
        const std::uint8_t* prev = y > 0 ? &image[(y - 1) * stride] : nullptr;
        for (std::size_t i = 0; i < stride; ++i) {
            const int left = i >= static_cast<std::size_t>(channels) ? cur[i - channels] : 0;
            const int up = prev ? prev[i] : 0;
            const int upleft = (prev && i >= static_cast<std::size_t>(channels)) ? prev[i - channels] : 0;
            int v = src[i];
            switch (filter_type) {
            case 0: break;
            case 1: v += left; break;
            case 2: v += up; break;
            case 3: v += (left + up) / 2; break;
            case 4: v += paeth(left, up, upleft); break;
            default: fail(errc::corrupt_file, path + ": unknown PNG filter type");
            }
            cur[i] = static_cast<std::uint8_t>(v & 0xff);
        }
    }

    Raster img(static_cast<int>(width), static_cast<int>(height));
    if (channels == 3) {
        img.pixels = std::move(image);
    } else {
        if (warning)
            *warning = path + ": alpha channel dropped on read";
        for (std::size_t p = 0, q = 0; p < image.size(); p += 4, q += 3) {
            img.pixels[q] = image[p];
            img.pixels[q + 1] = image[p + 1];
            img.pixels[q + 2] = image[p + 2];
        }
    }
    return img;
}

inline Raster decode_ppm(const std::vector<std::uint8_t>& bytes, const std::string& path)
{
    std::size_t pos = 2; // past "P6"
    const auto next_token = [&]() -> long {
        while (pos < bytes.size()) {
            if (std::isspace(bytes[pos])) {
                ++pos;
            } else if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n')
                    ++pos;
            } else {
                break;
            }
        }
        long value = -1;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            if (value < 0)
                value = 0;
            value = value * 10 + (bytes[pos] - '0');
            ++pos;
        }
        if (value < 0)
            fail(errc::corrupt_file, path + ": malformed PPM header");
        return value;
    };

    const long width = next_token();
    const long height = next_token();
    const long maxval = next_token();
    if (maxval != 255)
        fail(errc::unsupported_format, path + ": only maxval 255 PPM is supported");
    if (width < 1 || height < 1)
        fail(errc::corrupt_file, path + ": implausible PPM dimensions");
    if (pos >= bytes.size() || !std::isspace(bytes[pos]))
        fail(errc::corrupt_file, path + ": malformed PPM header");
    ++pos; // single whitespace separating header from pixel data

    const std::size_t need = static_cast<std::size_t>(width) * height * 3;
    if (bytes.size() - pos < need)
        fail(errc::corrupt_file, path + ": truncated PPM pixel data");

    Raster img(static_cast<int>(width), static_cast<int>(height));
    std::copy_n(bytes.begin() + pos, need, img.pixels.begin());
    return img;
}

} // namespace detail

/// Decode a PNG or binary PPM (P6) file; the format is sniffed from content.
/// If the PNG has an alpha channel it is dropped and *warning is set.
inline Raster read_image(const std::filesystem::path& path, std::string* warning = nullptr)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(errc::io_failure, path.string() + ": cannot open for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad())
        fail(errc::io_failure, path.string() + ": read error");

    if (bytes.size() >= 8
        && std::equal(detail::png_signature.begin(), detail::png_signature.end(), bytes.begin()))
        return detail::decode_png(bytes, path.string(), warning);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6')
        return detail::decode_ppm(bytes, path.string());
    fail(errc::unsupported_format, path.string() + ": not a PNG or binary PPM file");
}

/// Encode losslessly; read_image inverts this bit-exactly at the pixel level.
inline void write_image(const Raster& img, const std::filesystem::path& path, ImageFormat format)
{
    if (img.width < 1 || img.height < 1
        || img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * 3)
        fail(errc::io_failure, "write_image: malformed raster");

    std::vector<std::uint8_t> out;
    if (format == ImageFormat::png) {
        out.insert(out.end(), detail::png_signature.begin(), detail::png_signature.end());

        std::vector<std::uint8_t> ihdr;
        detail::put_be32(ihdr, static_cast<std::uint32_t>(img.width));
        detail::put_be32(ihdr, static_cast<std::uint32_t>(img.height));
        ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0}); // 8-bit RGB, no interlace
        detail::append_chunk(out, "IHDR", ihdr);

        const std::size_t stride = static_cast<std::size_t>(img.width) * 3;
        std::vector<std::uint8_t> raw((stride + 1) * img.height, 0);
        for (int y = 0; y < img.height; ++y)
            std::copy_n(&img.pixels[y * stride], stride, &raw[y * (stride + 1) + 1]);
        detail::append_chunk(out, "IDAT", detail::zlib_deflate(raw));
        detail::append_chunk(out, "IEND", {});
    } else {
        const std::string header =
            "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
        out.assign(header.begin(), header.end());
        out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    }

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        fail(errc::io_failure, path.string() + ": cannot open for writing");
    os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!os)
        fail(errc::io_failure, path.string() + ": write error");
}

/// Pick a format from the file extension (.png / .ppm).
inline ImageFormat format_for_path(const std::filesystem::path& path)
{
    const std::string ext = path.extension().string();
    if (ext == ".ppm")
        return ImageFormat::ppm;
    return ImageFormat::png;
}

} // namespace morphkit
