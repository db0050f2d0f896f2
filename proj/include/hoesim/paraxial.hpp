#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hoesim/errors.hpp"
#include "hoesim/units.hpp"

namespace hoesim {

// Object-image calculus for a holographic combiner viewed as a thin imaging
// element: 1/p - 1/q = 1/f with p, q, f all positive in the magnified
// virtual-image regime. All lengths are unit-agnostic (same unit in, same
// unit out); angles are degrees at this interface.

// Physical layout shared by all wavelength channels.
struct SystemGeometry {
    double p = 0.0;          // object distance, diffuser -> combiner
    double d = 0.0;          // eye relief, eye -> combiner
    double aperture_w = 0.0; // combiner element size
    double aperture_h = 0.0;
    double diffuser_w = 0.0; // projected image size on the diffuser (x1 per axis)
    double diffuser_h = 0.0;

    void validate() const {
        if (p <= 0 || d <= 0 || aperture_w <= 0 || aperture_h <= 0 || diffuser_w <= 0 ||
            diffuser_h <= 0)
            throw DomainError("SystemGeometry: all fields must be strictly positive");
    }
};

// One color channel of the display.
struct WavelengthChannel {
    std::string name;           // "red" / "green" / "blue"
    double lambda_record = 0.0; // nm
    double lambda_replay = 0.0; // nm
    double q = 0.0;             // designed virtual-image distance

    void validate() const {
        auto wl_ok = [](double nm) { return nm > 100.0 && nm < 10000.0; };
        if (!wl_ok(lambda_record) || !wl_ok(lambda_replay))
            throw DomainError("WavelengthChannel '" + name + "': wavelength outside (100,10000) nm");
        if (q <= 0)
            throw DomainError("WavelengthChannel '" + name + "': q must be positive");
    }
};

// Per-channel paraxial outputs. eb_* follows the FOV relation; eb_alt_* the
// similar-triangles construction. Negative eye-box values are reported as-is
// with has_eyebox cleared so tradeoff sweeps stay smooth.
struct ImagingSolution {
    std::string channel;
    double f = 0.0;
    double M = 0.0;
    double x2_w = 0.0, x2_h = 0.0;
    double fov_w = 0.0, fov_h = 0.0; // degrees
    double eb_w = 0.0, eb_h = 0.0;
    double eb_alt_w = 0.0, eb_alt_h = 0.0;
    bool has_eyebox_w = true, has_eyebox_h = true;
};

// Focal length from object and image distance: f = p*q/(q - p).
inline double solve_focal(double p, double q) {
    if (p <= 0 || q <= 0)
        throw DomainError("solve_focal: p and q must be positive");
    if (q == p)
        throw DegenerateError("solve_focal: q == p gives infinite focal length");
    return p * q / (q - p);
}

// Image distance from object distance and focal length: q = p*f/(f - p).
// Only the magnified virtual-image regime (f > p) is accepted.
inline double solve_image_distance(double p, double f) {
    if (p <= 0)
        throw DomainError("solve_image_distance: p must be positive");
    if (f <= p)
        throw DomainError("solve_image_distance: f <= p has no magnified virtual image");
    return p * f / (f - p);
}

inline double magnification(double p, double q) {
    if (p <= 0 || q <= 0)
        throw DomainError("magnification: p and q must be positive");
    return q / p;
}

inline double virtual_image_size(double M, double x1) {
    if (M <= 0 || x1 <= 0)
        throw DomainError("virtual_image_size: M and x1 must be positive");
    return M * x1;
}

// Angular size of the virtual image seen from the eye: 2*atan(x2/(2(q+d))).
inline double fov(double x2, double q, double d) {
    if (x2 < 0 || q <= 0 || d < 0)
        throw DomainError("fov: x2 >= 0, q > 0, d >= 0 required");
    return rad_to_deg(2.0 * std::atan(x2 / (2.0 * (q + d))));
}

// Eye-box from the FOV relation: EB = a - 2*tan(fov/2)*d. May be negative.
inline double eyebox_from_fov(double a, double fov_deg, double d) {
    if (a <= 0 || fov_deg < 0 || fov_deg >= 180 || d < 0)
        throw DomainError("eyebox_from_fov: need a > 0, fov in [0,180), d >= 0");
    return a - 2.0 * std::tan(deg_to_rad(fov_deg) / 2.0) * d;
}

// Eye-box by similar triangles between image, element and pupil:
// EB = a - (x2 - a)*d/q.
inline double eyebox_similar_triangles(double a, double x2, double q, double d) {
    if (a <= 0 || x2 <= 0 || q <= 0 || d < 0)
        throw DomainError("eyebox_similar_triangles: need a, x2, q > 0 and d >= 0");
    return a - (x2 - a) * d / q;
}

// Full per-channel solution for a given geometry.
inline ImagingSolution solve_channel(const SystemGeometry &g, const WavelengthChannel &ch) {
    g.validate();
    ch.validate();
    ImagingSolution s;
    s.channel = ch.name;
    s.f = solve_focal(g.p, ch.q);
    s.M = magnification(g.p, ch.q);
    s.x2_w = virtual_image_size(s.M, g.diffuser_w);
    s.x2_h = virtual_image_size(s.M, g.diffuser_h);
    s.fov_w = fov(s.x2_w, ch.q, g.d);
    s.fov_h = fov(s.x2_h, ch.q, g.d);
    s.eb_w = eyebox_from_fov(g.aperture_w, s.fov_w, g.d);
    s.eb_h = eyebox_from_fov(g.aperture_h, s.fov_h, g.d);
    s.eb_alt_w = eyebox_similar_triangles(g.aperture_w, s.x2_w, ch.q, g.d);
    s.eb_alt_h = eyebox_similar_triangles(g.aperture_h, s.x2_h, ch.q, g.d);
    s.has_eyebox_w = s.eb_w > 0;
    s.has_eyebox_h = s.eb_h > 0;
    return s;
}

// One row of the FOV/eye-box tradeoff sweep (width axis).
struct TradeoffPoint {
    double x1 = 0.0;
    double fov_deg = 0.0;
    double eb = 0.0;
};

// Sweep the loaded-image size for one channel: growing x1 trades eye-box
// for field of view at constant element size.
inline std::vector<TradeoffPoint> tradeoff_sweep(const SystemGeometry &g,
                                                 const WavelengthChannel &ch, double x1_min,
                                                 double x1_max, int steps) {
    g.validate();
    ch.validate();
    if (steps < 2 || x1_min <= 0 || x1_max <= x1_min)
        throw DomainError("tradeoff_sweep: need steps >= 2 and 0 < x1_min < x1_max");
    const double M = magnification(g.p, ch.q);
    std::vector<TradeoffPoint> rows;
    rows.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        TradeoffPoint pt;
        pt.x1 = x1_min + (x1_max - x1_min) * i / (steps - 1);
        pt.fov_deg = fov(M * pt.x1, ch.q, g.d);
        pt.eb = eyebox_from_fov(g.aperture_w, pt.fov_deg, g.d);
        rows.push_back(pt);
    }
    return rows;
}

struct DesignReport {
    std::vector<ImagingSolution> solutions;
    std::vector<std::vector<TradeoffPoint>> sweeps; // one per channel
};

inline DesignReport design_report(const SystemGeometry &g,
                                  const std::vector<WavelengthChannel> &channels,
                                  int sweep_steps = 25) {
    if (channels.empty())
        throw DomainError("design_report: at least one channel required");
    DesignReport rep;
    for (const auto &ch : channels) {
        rep.solutions.push_back(solve_channel(g, ch));
        rep.sweeps.push_back(
            tradeoff_sweep(g, ch, g.diffuser_w / sweep_steps, g.diffuser_w, sweep_steps));
    }
    return rep;
}

} // namespace hoesim
