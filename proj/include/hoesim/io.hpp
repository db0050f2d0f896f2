#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "hoesim/errors.hpp"
#include "hoesim/field.hpp"
#include "hoesim/scene.hpp"

namespace hoesim {
namespace io {

// ---------------------------------------------------------------------------
// Raw complex-field container
//
//   bytes 0..7   magic "HOEFLD01"
//   bytes 8..11  byte-order marker 0x01020304 (uint32, file written in host
//                order; readers reject a mismatch)
//   uint32 nx, ny
//   float64 pitch_x, pitch_y, lambda           (metres)
//   payload: nx*ny complex samples as interleaved float64 (re, im),
//            row-major with y fastest: index = ix*ny + iy
//
// The header counts must match the payload length exactly.
// ---------------------------------------------------------------------------

inline constexpr char kFieldMagic[8] = {'H', 'O', 'E', 'F', 'L', 'D', '0', '1'};
inline constexpr char kMapMagic[8] = {'H', 'O', 'E', 'M', 'A', 'P', '0', '1'};
inline constexpr std::uint32_t kByteOrderMarker = 0x01020304u;

namespace detail {

template <typename T> void put(std::ofstream &os, const T &v) {
    os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T> T get(std::ifstream &is, const std::string &what) {
    T v{};
    if (!is.read(reinterpret_cast<char *>(&v), sizeof(T)))
        throw IoError("truncated file while reading " + what);
    return v;
}

} // namespace detail

inline void write_field(const std::string &path, const ComplexField &f) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open '" + path + "' for writing");
    os.write(kFieldMagic, sizeof(kFieldMagic));
    detail::put(os, kByteOrderMarker);
    detail::put(os, static_cast<std::uint32_t>(f.nx));
    detail::put(os, static_cast<std::uint32_t>(f.ny));
    detail::put(os, f.pitch_x);
    detail::put(os, f.pitch_y);
    detail::put(os, f.lambda);
    os.write(reinterpret_cast<const char *>(f.data.data()),
             static_cast<std::streamsize>(f.data.size() * sizeof(cplx)));
    if (!os)
        throw IoError("failed writing '" + path + "'");
}

inline ComplexField read_field(const std::string &path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is)
        throw IoError("cannot open '" + path + "'");
    const std::streamoff file_size = is.tellg();
    is.seekg(0);
    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kFieldMagic, 8) != 0)
        throw IoError("'" + path + "' is not a raw complex-field file (bad magic)");
    if (detail::get<std::uint32_t>(is, "byte-order marker") != kByteOrderMarker)
        throw IoError("'" + path + "' was written with a different byte order");
    const auto nx = detail::get<std::uint32_t>(is, "nx");
    const auto ny = detail::get<std::uint32_t>(is, "ny");
    const auto pitch_x = detail::get<double>(is, "pitch_x");
    const auto pitch_y = detail::get<double>(is, "pitch_y");
    const auto lambda = detail::get<double>(is, "lambda");
    if (nx < 2 || ny < 2 || nx > (1u << 20) || ny > (1u << 20))
        throw IoError("'" + path + "': implausible grid size in header");
    const std::streamoff header = 8 + 4 + 4 + 4 + 8 * 3;
    const std::streamoff payload = static_cast<std::streamoff>(nx) * ny * sizeof(cplx);
    if (file_size != header + payload)
        throw IoError("'" + path + "': payload length does not match header counts");
    ComplexField f(static_cast<int>(nx), static_cast<int>(ny), pitch_x, pitch_y, lambda);
    if (!is.read(reinterpret_cast<char *>(f.data.data()), payload))
        throw IoError("'" + path + "': truncated payload");
    return f;
}

// Raw float map (phase profiles and the like); same envelope as the field
// format with a real float64 payload.
inline void write_map(const std::string &path, const RealMap &m) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open '" + path + "' for writing");
    os.write(kMapMagic, sizeof(kMapMagic));
    detail::put(os, kByteOrderMarker);
    detail::put(os, static_cast<std::uint32_t>(m.nx));
    detail::put(os, static_cast<std::uint32_t>(m.ny));
    detail::put(os, m.pitch_x);
    detail::put(os, m.pitch_y);
    os.write(reinterpret_cast<const char *>(m.data.data()),
             static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (!os)
        throw IoError("failed writing '" + path + "'");
}

inline RealMap read_map(const std::string &path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is)
        throw IoError("cannot open '" + path + "'");
    const std::streamoff file_size = is.tellg();
    is.seekg(0);
    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMapMagic, 8) != 0)
        throw IoError("'" + path + "' is not a raw map file (bad magic)");
    if (detail::get<std::uint32_t>(is, "byte-order marker") != kByteOrderMarker)
        throw IoError("'" + path + "' was written with a different byte order");
    const auto nx = detail::get<std::uint32_t>(is, "nx");
    const auto ny = detail::get<std::uint32_t>(is, "ny");
    const auto pitch_x = detail::get<double>(is, "pitch_x");
    const auto pitch_y = detail::get<double>(is, "pitch_y");
    const std::streamoff header = 8 + 4 + 4 + 4 + 8 * 2;
    const std::streamoff payload = static_cast<std::streamoff>(nx) * ny * sizeof(double);
    if (file_size != header + payload)
        throw IoError("'" + path + "': payload length does not match header counts");
    RealMap m(static_cast<int>(nx), static_cast<int>(ny), pitch_x, pitch_y);
    if (!is.read(reinterpret_cast<char *>(m.data.data()), payload))
        throw IoError("'" + path + "': truncated payload");
    return m;
}

// ---------------------------------------------------------------------------
// Images. Maps are stored y-up; image rows run top to bottom, so row 0 is
// iy = ny-1. 16-bit PGM is the lossless output; 8-bit PNG is the preview.
// Both are normalized by a caller-supplied maximum (pass <= 0 to use the
// map's own maximum); the scale actually used is returned for the manifest.
// ---------------------------------------------------------------------------

inline double map_max(const RealMap &m) {
    double mx = 0.0;
    for (double v : m.data)
        mx = std::max(mx, v);
    return mx;
}

inline double write_pgm16(const std::string &path, const RealMap &m, double norm_max = 0.0) {
    const double mx = norm_max > 0.0 ? norm_max : map_max(m);
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open '" + path + "' for writing");
    os << "P5\n" << m.nx << " " << m.ny << "\n65535\n";
    std::vector<unsigned char> row(static_cast<size_t>(m.nx) * 2);
    for (int j = 0; j < m.ny; ++j) {
        const int iy = m.ny - 1 - j;
        for (int ix = 0; ix < m.nx; ++ix) {
            double v = mx > 0.0 ? m.at(ix, iy) / mx : 0.0;
            v = std::clamp(v, 0.0, 1.0);
            const auto q = static_cast<std::uint16_t>(v * 65535.0 + 0.5);
            row[2 * ix] = static_cast<unsigned char>(q >> 8); // big-endian per spec P5
            row[2 * ix + 1] = static_cast<unsigned char>(q & 0xff);
        }
        os.write(reinterpret_cast<const char *>(row.data()),
                 static_cast<std::streamsize>(row.size()));
    }
    if (!os)
        throw IoError("failed writing '" + path + "'");
    return mx;
}

// Minimal PGM reader (P5, 8- or 16-bit) used for scene input images.
inline Raster read_pgm(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open '" + path + "'");
    std::string tag;
    is >> tag;
    if (tag != "P5")
        throw IoError("'" + path + "': only binary PGM (P5) input is supported");
    auto next_int = [&](const char *what) {
        // Skip whitespace and '#' comment lines.
        int c = is.peek();
        while (c == '#' || std::isspace(c)) {
            if (c == '#')
                is.ignore(1 << 20, '\n');
            else
                is.get();
            c = is.peek();
        }
        long v = -1;
        is >> v;
        if (!is || v < 0)
            throw IoError(std::string("'") + path + "': bad " + what + " in PGM header");
        return v;
    };
    const long w = next_int("width");
    const long h = next_int("height");
    const long maxval = next_int("maxval");
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw IoError("'" + path + "': unsupported PGM geometry");
    is.get(); // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(static_cast<size_t>(w) * h * bytes);
    if (!is.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(buf.size())))
        throw IoError("'" + path + "': truncated PGM payload");
    Raster r(static_cast<int>(w), static_cast<int>(h));
    for (long j = 0; j < h; ++j) {
        for (long i = 0; i < w; ++i) {
            const size_t k = (static_cast<size_t>(j) * w + i) * bytes;
            long v = bytes == 2 ? (buf[k] << 8 | buf[k + 1]) : buf[k];
            // PGM row 0 is the top; raster y grows upward.
            r.at(static_cast<int>(i), static_cast<int>(h - 1 - j)) =
                static_cast<double>(v) / maxval;
        }
    }
    return r;
}

namespace detail {

struct PngWriter {
    FILE *fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;

    explicit PngWriter(const std::string &path) {
        fp = std::fopen(path.c_str(), "wb");
        if (!fp)
            throw IoError("cannot open '" + path + "' for writing");
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info) {
            cleanup();
            throw IoError("libpng initialization failed");
        }
    }
    ~PngWriter() { cleanup(); }
    void cleanup() {
        if (png)
            png_destroy_write_struct(&png, info ? &info : nullptr);
        png = nullptr;
        info = nullptr;
        if (fp)
            std::fclose(fp);
        fp = nullptr;
    }
};

} // namespace detail

// 8-bit grayscale PNG preview. Returns the normalization maximum used.
inline double write_png_gray8(const std::string &path, const RealMap &m, double norm_max = 0.0) {
    const double mx = norm_max > 0.0 ? norm_max : map_max(m);
    detail::PngWriter w(path);
    if (setjmp(png_jmpbuf(w.png)))
        throw IoError("libpng failed writing '" + path + "'");
    png_init_io(w.png, w.fp);
    png_set_IHDR(w.png, w.info, m.nx, m.ny, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    std::vector<unsigned char> row(static_cast<size_t>(m.nx));
    for (int j = 0; j < m.ny; ++j) {
        const int iy = m.ny - 1 - j;
        for (int ix = 0; ix < m.nx; ++ix) {
            double v = mx > 0.0 ? m.at(ix, iy) / mx : 0.0;
            row[ix] = static_cast<unsigned char>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
        }
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
    return mx;
}

// 8-bit RGB PNG composite of up to three intensity maps (incoherent color
// composition). Channels may be null; each is normalized by its own scale.
inline void write_png_rgb8(const std::string &path, const RealMap *r, const RealMap *g,
                           const RealMap *b, double r_max, double g_max, double b_max) {
    const RealMap *any = r ? r : g ? g : b;
    if (!any)
        throw DomainError("write_png_rgb8: at least one channel required");
    const int nx = any->nx, ny = any->ny;
    for (const RealMap *c : {r, g, b})
        if (c && (c->nx != nx || c->ny != ny))
            throw ShapeError("write_png_rgb8: channel images differ in shape");
    detail::PngWriter w(path);
    if (setjmp(png_jmpbuf(w.png)))
        throw IoError("libpng failed writing '" + path + "'");
    png_init_io(w.png, w.fp);
    png_set_IHDR(w.png, w.info, nx, ny, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    std::vector<unsigned char> row(static_cast<size_t>(nx) * 3);
    auto sample = [](const RealMap *c, double mx, int ix, int iy) -> unsigned char {
        if (!c || mx <= 0.0)
            return 0;
        return static_cast<unsigned char>(std::clamp(c->at(ix, iy) / mx, 0.0, 1.0) * 255.0 + 0.5);
    };
    for (int j = 0; j < ny; ++j) {
        const int iy = ny - 1 - j;
        for (int ix = 0; ix < nx; ++ix) {
            row[3 * ix + 0] = sample(r, r_max, ix, iy);
            row[3 * ix + 1] = sample(g, g_max, ix, iy);
            row[3 * ix + 2] = sample(b, b_max, ix, iy);
        }
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
}

// Shortest round-trippable decimal representation, stable across runs.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace io
} // namespace hoesim
