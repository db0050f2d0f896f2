#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "hoesim/errors.hpp"
#include "hoesim/field.hpp"
#include "hoesim/hoe.hpp"
#include "hoesim/paraxial.hpp"
#include "hoesim/propagation.hpp"
#include "hoesim/scene.hpp"
#include "hoesim/units.hpp"

namespace hoesim {

struct GridSpec {
    int nx = 0;
    int ny = 0;
    double pitch = 0.0; // m

    void validate() const {
        if (nx < 2 || ny < 2 || pitch <= 0)
            throw DomainError("GridSpec: need nx, ny >= 2 and pitch > 0");
    }
};

struct PipelineOptions {
    bool override_sampling = false;
    int threads = 1; // channel-level fan-out in simulate_rgb
};

// Element for one channel: equivalent focal length from the designed image
// distance, aperture from the combiner geometry, replay wavelength.
inline HoeSpec make_hoe(const SystemGeometry &geometry_m, const WavelengthChannel &channel,
                        double theta = 0.0) {
    HoeSpec hoe;
    hoe.r0 = solve_focal(geometry_m.p, channel.q);
    hoe.theta = theta;
    hoe.aperture_w = geometry_m.aperture_w;
    hoe.aperture_h = geometry_m.aperture_h;
    hoe.lambda = nm_to_m(channel.lambda_replay);
    return hoe;
}

namespace detail {

inline void check_distances(const std::vector<double> &distances) {
    if (distances.empty())
        throw DomainError("simulate: at least one observation distance required");
    for (size_t i = 0; i < distances.size(); ++i) {
        if (distances[i] <= 0)
            throw DomainError("simulate: observation distances must be positive");
        if (i > 0 && distances[i] <= distances[i - 1])
            throw DomainError("simulate: observation distances must be strictly increasing");
    }
}

// Analytic sampling check for the reconstruction of the designed plane: the
// ray bundle forming the in-window virtual image spans frequencies up to
// (image half-extent + aperture half-width)/(lambda q); that bundle must fit
// the band-limited transfer function for the backward hop, else the grid
// cannot form the designed image and the run is rejected (exit 3 at the CLI).
// Planes far from focus are deliberately window-limited instead: their rays
// spread beyond any fixed window, and the band limit is what keeps them from
// wrapping; those planes are reported, not rejected.
inline void check_designed_plane(const HoeSpec &hoe, double p, double scene_half_w,
                                 double scene_half_h, const GridSpec &grid) {
    if (hoe.r0 <= p)
        return; // no virtual image in this regime; nothing to check
    const double q = p * hoe.r0 / (hoe.r0 - p);
    const double M = q / p;
    const double dfx = 1.0 / (2.0 * grid.nx * grid.pitch); // padded bin spacing
    const double dfy = 1.0 / (2.0 * grid.ny * grid.pitch);
    const double fl_x = band_limit_frequency(hoe.lambda, q, dfx);
    const double fl_y = band_limit_frequency(hoe.lambda, q, dfy);
    const double fd_x = (M * scene_half_w + hoe.aperture_w / 2) / (hoe.lambda * q);
    const double fd_y = (M * scene_half_h + hoe.aperture_h / 2) / (hoe.lambda * q);
    if (fd_x > fl_x || fd_y > fl_y) {
        SamplingDiagnostics d;
        d.nyquist_frequency = 1.0 / (2.0 * grid.pitch);
        d.max_local_fringe_frequency =
            std::max(fd_x / fl_x, fd_y / fl_y) * d.nyquist_frequency;
        d.ok = false;
        throw SamplingError(d);
    }
}

} // namespace detail

struct SimulatedPlane {
    double distance = 0.0; // m, virtual-image plane behind the element
    RealMap intensity;
    bool window_limited = false; // band-limit trimmed part of the defocused bundle
};

// Field-level core of the reconstruction (a linear operator on the diffuser
// field): propagate to the element plane, stamp the element phase, hop
// backward to each requested virtual-image plane.
inline std::vector<ComplexField> simulate_field(const ComplexField &diffuser_field,
                                                const HoeSpec &hoe, double p,
                                                const std::vector<double> &distances,
                                                const PipelineOptions &opts = {}) {
    detail::check_distances(distances);
    if (p <= 0)
        throw DomainError("simulate: object distance must be positive");

    PropagationOptions fwd;
    fwd.override_sampling = opts.override_sampling;
    ComplexField at_hoe = propagate_asm(diffuser_field, p, fwd);

    ApplyOptions ao;
    ao.override_sampling = opts.override_sampling;
    ComplexField after = apply(at_hoe, hoe, ao);

    PropagationOptions back;
    back.override_sampling = true; // far-from-focus planes are window-limited
    AsmSession session(after, back);

    std::vector<ComplexField> fields;
    fields.reserve(distances.size());
    for (double d : distances)
        fields.push_back(session.propagate_to(-d));
    return fields;
}

// One channel of the three-step reconstruction, intensity out.
inline std::vector<SimulatedPlane> simulate_channel(const SceneSpec &scene,
                                                    const std::string &channel,
                                                    const HoeSpec &hoe,
                                                    const SystemGeometry &geometry_m,
                                                    const GridSpec &grid,
                                                    const std::vector<double> &distances,
                                                    const PipelineOptions &opts = {}) {
    detail::check_distances(distances);
    grid.validate();
    double scene_half_w = 0.0, scene_half_h = 0.0;
    content_half_extent(scene, channel, scene_half_w, scene_half_h);
    if (!opts.override_sampling)
        detail::check_designed_plane(hoe, geometry_m.p, scene_half_w, scene_half_h, grid);

    ComplexField f = scene_field(scene, channel, grid.nx, grid.ny, grid.pitch, hoe.lambda);

    PropagationOptions fwd;
    fwd.override_sampling = opts.override_sampling;
    ComplexField at_hoe = propagate_asm(f, geometry_m.p, fwd);
    ApplyOptions ao;
    ao.override_sampling = opts.override_sampling;
    ComplexField after = apply(at_hoe, hoe, ao);

    PropagationOptions back;
    back.override_sampling = true; // far-from-focus planes are window-limited
    AsmSession session(after, back);

    std::vector<SimulatedPlane> planes;
    planes.reserve(distances.size());
    for (double d : distances) {
        SimulatedPlane pl;
        pl.distance = d;
        pl.intensity = intensity(session.propagate_to(-d));
        pl.window_limited = !session.diagnostics(-d).ok;
        planes.push_back(std::move(pl));
    }
    return planes;
}

// Sharpness score: variance of the 5-point discrete Laplacian of the
// mean-normalized image. Zero for constant images; invariant to global
// intensity scaling; strictly reduced by blurring.
inline double focus_metric(const RealMap &img) {
    if (img.nx < 1 || img.ny < 1 || img.data.empty())
        throw DomainError("focus_metric: empty image");
    if (img.nx < 3 || img.ny < 3)
        return 0.0;
    double mean = 0.0;
    for (double v : img.data)
        mean += v;
    mean /= static_cast<double>(img.data.size());
    if (mean <= 0.0)
        return 0.0;
    double s1 = 0.0, s2 = 0.0;
    long count = 0;
    for (int i = 1; i < img.nx - 1; ++i) {
        for (int j = 1; j < img.ny - 1; ++j) {
            const double lap = (img.at(i + 1, j) + img.at(i - 1, j) + img.at(i, j + 1) +
                                img.at(i, j - 1) - 4.0 * img.at(i, j)) /
                               mean;
            s1 += lap;
            s2 += lap * lap;
            ++count;
        }
    }
    const double m = s1 / count;
    return s2 / count - m * m;
}

struct FocusCurve {
    std::vector<double> distances;
    std::vector<double> scores;
    int best_index = 0;
    double best_distance = 0.0;

    static FocusCurve from_planes(const std::vector<SimulatedPlane> &planes) {
        FocusCurve c;
        for (const auto &pl : planes) {
            c.distances.push_back(pl.distance);
            c.scores.push_back(focus_metric(pl.intensity));
        }
        c.best_index = static_cast<int>(
            std::max_element(c.scores.begin(), c.scores.end()) - c.scores.begin());
        c.best_distance = c.distances[c.best_index];
        return c;
    }
};

inline FocusCurve depth_scan(const SceneSpec &scene, const std::string &channel,
                             const HoeSpec &hoe, const SystemGeometry &geometry_m,
                             const GridSpec &grid, const std::vector<double> &distances,
                             const PipelineOptions &opts = {}) {
    return FocusCurve::from_planes(
        simulate_channel(scene, channel, hoe, geometry_m, grid, distances, opts));
}

struct ChannelStack {
    std::string channel;
    std::vector<SimulatedPlane> planes;
};

struct ReconstructionStack {
    std::vector<ChannelStack> channels;
    GridSpec grid;
};

struct ChannelSetup {
    WavelengthChannel channel; // q in metres here
    HoeSpec hoe;
};

inline ChannelSetup make_channel_setup(const SystemGeometry &geometry_m,
                                       const WavelengthChannel &ch, double theta = 0.0) {
    return ChannelSetup{ch, make_hoe(geometry_m, ch, theta)};
}

// All channels on their own wavelengths; color composition is incoherent
// (per-plane intensities are composited downstream). Channels are
// independent work units; results are keyed by channel, so the processing
// order (and thread count) never changes the output.
inline ReconstructionStack simulate_rgb(const SceneSpec &scene,
                                        const std::vector<ChannelSetup> &setups,
                                        const SystemGeometry &geometry_m, const GridSpec &grid,
                                        const std::vector<double> &distances,
                                        const PipelineOptions &opts = {}) {
    if (setups.empty())
        throw DomainError("simulate_rgb: at least one channel required");
    ReconstructionStack stack;
    stack.grid = grid;
    stack.channels.resize(setups.size());

    auto run_one = [&](size_t i) {
        stack.channels[i].channel = setups[i].channel.name;
        stack.channels[i].planes = simulate_channel(scene, setups[i].channel.name, setups[i].hoe,
                                                    geometry_m, grid, distances, opts);
    };

    if (opts.threads > 1 && setups.size() > 1) {
        std::vector<std::future<void>> jobs;
        for (size_t i = 0; i < setups.size(); ++i)
            jobs.push_back(std::async(std::launch::async, run_one, i));
        for (auto &j : jobs)
            j.get(); // rethrows channel errors
    } else {
        for (size_t i = 0; i < setups.size(); ++i)
            run_one(i);
    }
    return stack;
}

struct ChannelFocus {
    std::string channel;
    FocusCurve curve;
};

struct FocusReport {
    std::vector<ChannelFocus> channels;
};

inline FocusReport focus_report(const ReconstructionStack &stack) {
    FocusReport rep;
    for (const auto &cs : stack.channels)
        rep.channels.push_back(ChannelFocus{cs.channel, FocusCurve::from_planes(cs.planes)});
    return rep;
}

// Centroid (m) and second-moment widths (m) of an intensity map, optionally
// restricted to a centered square region of half-width roi_half_px samples.
struct IntensityMoments {
    double centroid_x = 0.0, centroid_y = 0.0;
    double width_x = 0.0, width_y = 0.0;
    double spread() const { return std::hypot(width_x, width_y); }
};

inline IntensityMoments intensity_moments(const RealMap &img, int roi_half_px = -1) {
    int x0 = 0, x1 = img.nx, y0 = 0, y1 = img.ny;
    if (roi_half_px > 0) {
        x0 = std::max(0, img.nx / 2 - roi_half_px);
        x1 = std::min(img.nx, img.nx / 2 + roi_half_px + 1);
        y0 = std::max(0, img.ny / 2 - roi_half_px);
        y1 = std::min(img.ny, img.ny / 2 + roi_half_px + 1);
    }
    double w = 0.0, sx = 0.0, sy = 0.0;
    for (int i = x0; i < x1; ++i)
        for (int j = y0; j < y1; ++j) {
            const double v = img.at(i, j);
            w += v;
            sx += v * img.x(i);
            sy += v * img.y(j);
        }
    IntensityMoments m;
    if (w <= 0.0)
        return m;
    m.centroid_x = sx / w;
    m.centroid_y = sy / w;
    double vx = 0.0, vy = 0.0;
    for (int i = x0; i < x1; ++i)
        for (int j = y0; j < y1; ++j) {
            const double v = img.at(i, j);
            vx += v * (img.x(i) - m.centroid_x) * (img.x(i) - m.centroid_x);
            vy += v * (img.y(j) - m.centroid_y) * (img.y(j) - m.centroid_y);
        }
    m.width_x = std::sqrt(vx / w);
    m.width_y = std::sqrt(vy / w);
    return m;
}

struct AstigmatismOptions {
    int scan_planes = 21;
    double scan_halfwidth = 0.0; // m; 0 picks 2.5x the worst astigmatic shift
    int roi_half_px = 64;
    bool override_sampling = false;
};

struct AstigmatismResult {
    double ratio = 1.0; // width_y / width_x at best focus
    double width_x = 0.0;
    double width_y = 0.0;
    double best_distance = 0.0;
    FocusCurve curve;
};

// Point-source reconstruction through a tilted-carrier element. The carrier
// is factored out analytically and the backward hop recenters the window on
// the walking beam (shifted angular spectrum), so the diffracted image stays
// on the grid at any tilt the fringe sampling allows. The returned widths
// are second moments over a centered region of interest.
inline AstigmatismResult astigmatism_report(const HoeSpec &hoe, const SystemGeometry &geometry_m,
                                            const GridSpec &grid,
                                            const AstigmatismOptions &opts = {}) {
    grid.validate();
    hoe.validate();
    if (hoe.theta < 0)
        throw DomainError("astigmatism_report: theta must be >= 0");
    const double p = geometry_m.p;
    if (hoe.r0 <= p)
        throw DomainError("astigmatism_report: bench requires r0 > p (virtual image)");
    const double q = solve_image_distance(p, hoe.r0);

    // Point source on the axis.
    ComplexField src(grid.nx, grid.ny, grid.pitch, grid.pitch, hoe.lambda);
    src.at(grid.nx / 2, grid.ny / 2) = cplx(1.0, 0.0);

    PropagationOptions fwd;
    fwd.override_sampling = opts.override_sampling;
    ComplexField at_hoe = propagate_asm(src, p, fwd);
    ApplyOptions ao;
    ao.override_sampling = opts.override_sampling;
    ComplexField after = apply(at_hoe, hoe, ao);

    // Envelope extraction: strip the carrier so only the image-forming
    // curvature remains on the grid.
    const double fc = std::sin(hoe.theta) / hoe.lambda;
    for (int ix = 0; ix < after.nx; ++ix) {
        const double ph = -2.0 * kPi * fc * after.x(ix);
        const cplx rot = std::polar(1.0, ph);
        for (int iy = 0; iy < after.ny; ++iy)
            after.at(ix, iy) *= rot;
    }

    PropagationOptions back;
    back.carrier_fx = fc;
    back.override_sampling = opts.override_sampling;
    AsmSession session(after, back);

    double halfwidth = opts.scan_halfwidth;
    if (halfwidth <= 0.0) {
        const double s = std::sin(std::min(std::abs(hoe.theta), deg_to_rad(5.0)));
        halfwidth = std::max(2.5 * q * std::max(s * s, 1e-4), 1e-5);
    }

    AstigmatismResult res;
    std::vector<RealMap> rois;
    for (int i = 0; i < opts.scan_planes; ++i) {
        const double d = opts.scan_planes == 1
                             ? q
                             : q - halfwidth + 2.0 * halfwidth * i / (opts.scan_planes - 1);
        const double shift = beam_walk(-d, hoe.lambda, fc);
        ComplexField out = session.propagate_to(-d, shift, 0.0);
        RealMap img = intensity(out);
        res.curve.distances.push_back(d);
        res.curve.scores.push_back(focus_metric(img));
        rois.push_back(std::move(img));
    }
    res.curve.best_index = static_cast<int>(
        std::max_element(res.curve.scores.begin(), res.curve.scores.end()) -
        res.curve.scores.begin());
    res.curve.best_distance = res.curve.distances[res.curve.best_index];
    res.best_distance = res.curve.best_distance;

    IntensityMoments m = intensity_moments(rois[res.curve.best_index], opts.roi_half_px);
    res.width_x = m.width_x;
    res.width_y = m.width_y;
    res.ratio = m.width_x > 0 ? m.width_y / m.width_x : 0.0;
    return res;
}

// Desk-scale study preset: the design-table focal lengths carry over
// unchanged in value with every length in millimetres instead of
// centimetres, which keeps the full three-plane reconstruction inside a
// 1024^2, 4 um grid. Carrier tilt off.
struct DeskPreset {
    SystemGeometry geometry; // m
    std::vector<WavelengthChannel> channels; // q in m
    GridSpec grid;
    std::vector<double> distances; // m
    SceneSpec scene;
};

inline DeskPreset desk_preset() {
    DeskPreset pre;
    pre.geometry.p = 30e-3;
    pre.geometry.d = 50e-3;
    pre.geometry.aperture_w = 3.4e-3;
    pre.geometry.aperture_h = 3.4e-3;
    pre.geometry.diffuser_w = 0.8e-3;
    pre.geometry.diffuser_h = 0.3e-3;
    pre.channels = {
        {"red", 639.0, 636.0, 150e-3},
        {"green", 532.0, 528.0, 500e-3},
        {"blue", 457.0, 449.0, 1000e-3},
    };
    pre.grid = GridSpec{1024, 1024, 4e-6};
    pre.distances = {150e-3, 500e-3, 1000e-3};
    pre.scene = letters_scene(pre.geometry.diffuser_w, pre.geometry.diffuser_h, pre.grid.pitch,
                              112e-6, {"red", "green", "blue"}, {-0.25e-3, 0.05e-3, 0.0});
    return pre;
}

// Calibrated bench for the tilt-astigmatism study: moderate numerical
// aperture, short virtual-image distance, spherical aberration kept well
// below the astigmatic term at 3 degrees.
struct AstigmatismBench {
    SystemGeometry geometry;
    GridSpec grid;
    HoeSpec hoe;
};

inline AstigmatismBench astigmatism_bench(double theta) {
    AstigmatismBench b;
    b.geometry.p = 31e-3;
    b.geometry.d = 50e-3;
    b.geometry.aperture_w = 4.0e-3;
    b.geometry.aperture_h = 4.0e-3;
    b.geometry.diffuser_w = 4e-6;
    b.geometry.diffuser_h = 4e-6;
    b.grid = GridSpec{1024, 1024, 4e-6};
    b.hoe.r0 = solve_focal(31e-3, 34e-3);
    b.hoe.theta = theta;
    b.hoe.aperture_w = b.geometry.aperture_w;
    b.hoe.aperture_h = b.geometry.aperture_h;
    b.hoe.lambda = 532e-9;
    return b;
}

} // namespace hoesim
