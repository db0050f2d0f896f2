#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hoesim/errors.hpp"
#include "hoesim/field.hpp"
#include "hoesim/units.hpp"

namespace hoesim {

// Plain intensity raster, values in [0,1], row-major with y fastest,
// covering a physical extent given by the owning SceneSpec.
struct Raster {
    int w = 0;
    int h = 0;
    std::vector<double> v;

    Raster() = default;
    Raster(int w_, int h_) : w(w_), h(h_), v(static_cast<size_t>(w_) * h_, 0.0) {}
    double &at(int i, int j) { return v[static_cast<size_t>(i) * h + j]; }
    double at(int i, int j) const { return v[static_cast<size_t>(i) * h + j]; }
};

// The projected image on the diffuser: one intensity raster per channel,
// all sharing the diffuser extent. An empty seed means a flat (zero) phase;
// a seeded scene gets per-sample uniform random phase, reproducibly.
struct SceneSpec {
    struct ChannelImage {
        std::string channel;
        Raster image;
        double offset_x = 0.0; // m, raster center relative to the axis
        double offset_y = 0.0;
    };

    std::vector<ChannelImage> images;
    double diffuser_w = 0.0; // m
    double diffuser_h = 0.0;
    std::optional<std::uint64_t> random_phase_seed;

    void validate() const {
        if (diffuser_w <= 0 || diffuser_h <= 0)
            throw DomainError("SceneSpec: diffuser extent must be positive");
        if (images.empty())
            throw DomainError("SceneSpec: at least one channel image required");
        for (const auto &ci : images) {
            if (ci.image.w < 1 || ci.image.h < 1)
                throw DomainError("SceneSpec: empty image for channel '" + ci.channel + "'");
            for (double x : ci.image.v)
                if (!(x >= 0.0 && x <= 1.0))
                    throw DomainError("SceneSpec: intensities must lie in [0,1] (channel '" +
                                      ci.channel + "')");
        }
    }

    const ChannelImage &channel_image(const std::string &name) const {
        for (const auto &ci : images)
            if (ci.channel == name)
                return ci;
        throw DomainError("SceneSpec: no image for channel '" + name + "'");
    }
};

namespace detail {

// 5x7 block glyphs.
inline const char *glyph_rows(char c) {
    switch (c) {
    case 'R':
        return "XXXX."
               "X...X"
               "X...X"
               "XXXX."
               "X.X.."
               "X..X."
               "X...X";
    case 'G':
        return ".XXX."
               "X...X"
               "X...."
               "X.XXX"
               "X...X"
               "X...X"
               ".XXX.";
    case 'B':
        return "XXXX."
               "X...X"
               "X...X"
               "XXXX."
               "X...X"
               "X...X"
               "XXXX.";
    default:
        throw DomainError(std::string("glyph_rows: no glyph for '") + c + "'");
    }
}

// Portable uniform double in [0,1) from a 64-bit word.
inline double u01(std::uint64_t x) { return (x >> 11) * 0x1.0p-53; }

// splitmix64; deterministic across platforms, used for diffuser phase.
inline std::uint64_t splitmix64(std::uint64_t &state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(const std::string &s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

// Paint a glyph into a raster; (cx, cy) is the glyph center in raster
// samples, cell the size of one of the 5x7 font cells in samples.
inline void draw_letter(Raster &r, char letter, int cx, int cy, int cell) {
    const char *rows = detail::glyph_rows(letter);
    const int gw = 5 * cell, gh = 7 * cell;
    for (int i = 0; i < gw; ++i) {
        const int col = i / cell;
        for (int j = 0; j < gh; ++j) {
            const int row = j / cell;
            // Row 0 of the glyph is its top; raster j grows upward.
            if (rows[(6 - row) * 5 + col] != 'X')
                continue;
            const int x = cx - gw / 2 + i;
            const int y = cy - gh / 2 + j;
            if (x >= 0 && x < r.w && y >= 0 && y < r.h)
                r.at(x, y) = 1.0;
        }
    }
}

// Three-letter target: one glyph per channel at a per-channel x offset so
// the magnified replicas at the three depths all stay inside the window.
// Rasters are produced at the requested sample pitch.
inline SceneSpec letters_scene(double diffuser_w, double diffuser_h, double pitch,
                               double letter_height, const std::vector<std::string> &channels,
                               const std::vector<double> &offsets_x) {
    if (channels.size() != offsets_x.size())
        throw DomainError("letters_scene: one offset per channel required");
    SceneSpec scene;
    scene.diffuser_w = diffuser_w;
    scene.diffuser_h = diffuser_h;
    const int w = std::max(1, static_cast<int>(diffuser_w / pitch + 0.5));
    const int h = std::max(1, static_cast<int>(diffuser_h / pitch + 0.5));
    const int cell = std::max(1, static_cast<int>(letter_height / (7.0 * pitch) + 0.5));
    const char glyphs[3] = {'R', 'G', 'B'};
    for (size_t c = 0; c < channels.size(); ++c) {
        SceneSpec::ChannelImage ci;
        ci.channel = channels[c];
        ci.image = Raster(w, h);
        const char g = c < 3 ? glyphs[c] : 'B';
        const int cx = w / 2 + static_cast<int>(offsets_x[c] / pitch + (offsets_x[c] < 0 ? -0.5 : 0.5));
        draw_letter(ci.image, g, cx, h / 2, cell);
        scene.images.push_back(std::move(ci));
    }
    return scene;
}

// Single bright sample on the axis (point-source target). The scene extent
// is kept below one grid pitch so exactly the on-axis sample lights up.
inline SceneSpec point_scene(double pitch, const std::vector<std::string> &channels) {
    SceneSpec scene;
    scene.diffuser_w = 0.9 * pitch;
    scene.diffuser_h = 0.9 * pitch;
    for (const auto &name : channels) {
        SceneSpec::ChannelImage ci;
        ci.channel = name;
        ci.image = Raster(1, 1);
        ci.image.at(0, 0) = 1.0;
        scene.images.push_back(std::move(ci));
    }
    return scene;
}

// Half-extent (m) of one channel's actual lit content around the axis,
// from the raster's nonzero bounding box plus the channel offset. This is
// what bounds the magnified replica, not the full diffuser rectangle.
inline void content_half_extent(const SceneSpec &scene, const std::string &channel, double &hw,
                                double &hh) {
    const SceneSpec::ChannelImage &ci = scene.channel_image(channel);
    const Raster &r = ci.image;
    int x0 = r.w, x1 = -1, y0 = r.h, y1 = -1;
    for (int i = 0; i < r.w; ++i)
        for (int j = 0; j < r.h; ++j)
            if (r.at(i, j) > 0.0) {
                x0 = std::min(x0, i);
                x1 = std::max(x1, i);
                y0 = std::min(y0, j);
                y1 = std::max(y1, j);
            }
    if (x1 < 0) { // empty channel
        hw = 0.0;
        hh = 0.0;
        return;
    }
    const double px = scene.diffuser_w / r.w, py = scene.diffuser_h / r.h;
    const double cx0 = (x0 - r.w / 2.0) * px + ci.offset_x;
    const double cx1 = (x1 + 1 - r.w / 2.0) * px + ci.offset_x;
    const double cy0 = (y0 - r.h / 2.0) * py + ci.offset_y;
    const double cy1 = (y1 + 1 - r.h / 2.0) * py + ci.offset_y;
    hw = std::max(std::abs(cx0), std::abs(cx1));
    hh = std::max(std::abs(cy0), std::abs(cy1));
}

// Sample one channel of the scene onto the simulation grid: amplitude is
// sqrt(intensity), phase flat or seeded uniform random. Nearest-neighbor
// lookup maps grid positions into the raster over the diffuser extent.
inline ComplexField scene_field(const SceneSpec &scene, const std::string &channel, int nx, int ny,
                                double pitch, double lambda) {
    scene.validate();
    const SceneSpec::ChannelImage &ci = scene.channel_image(channel);
    ComplexField f(nx, ny, pitch, pitch, lambda);

    std::uint64_t rng_state = 0;
    const bool random_phase = scene.random_phase_seed.has_value();
    if (random_phase)
        rng_state = *scene.random_phase_seed ^ detail::fnv1a(channel);

    const double hw = scene.diffuser_w / 2, hh = scene.diffuser_h / 2;
    for (int ix = 0; ix < nx; ++ix) {
        const double x = f.x(ix) - ci.offset_x;
        for (int iy = 0; iy < ny; ++iy) {
            const double y = f.y(iy) - ci.offset_y;
            double phase = 0.0;
            if (random_phase)
                phase = 2.0 * kPi * detail::u01(detail::splitmix64(rng_state));
            if (std::abs(x) > hw || std::abs(y) > hh)
                continue;
            const int i = std::min(ci.image.w - 1,
                                   std::max(0, static_cast<int>((x + hw) / scene.diffuser_w *
                                                                ci.image.w)));
            const int j = std::min(ci.image.h - 1,
                                   std::max(0, static_cast<int>((y + hh) / scene.diffuser_h *
                                                                ci.image.h)));
            const double inten = ci.image.at(i, j);
            if (inten > 0.0)
                f.at(ix, iy) = std::polar(std::sqrt(inten), phase);
        }
    }
    return f;
}

} // namespace hoesim
