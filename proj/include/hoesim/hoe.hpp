#pragma once

#include <cmath>
#include <vector>

#include "hoesim/errors.hpp"
#include "hoesim/field.hpp"
#include "hoesim/sampling.hpp"
#include "hoesim/units.hpp"

namespace hoesim {

// One holographic lens element: the interference of a spherical wave
// converging at distance r0 on axis with a plane reference tilted by theta
// in the x-z plane. r0 doubles as the element's equivalent focal length.
struct HoeSpec {
    double r0 = 0.0;         // m, convergence distance / equivalent focal length
    double theta = 0.0;      // rad, carrier tilt of the reference beam
    double aperture_w = 0.0; // m, hard rectangular aperture
    double aperture_h = 0.0;
    double lambda = 0.0; // m, design (replay) wavelength

    void validate() const {
        if (r0 <= 0)
            throw DomainError("HoeSpec: r0 must be positive");
        if (std::abs(theta) >= kPi / 2)
            throw DomainError("HoeSpec: |theta| must be below pi/2");
        if (aperture_w <= 0 || aperture_h <= 0)
            throw DomainError("HoeSpec: apertures must be positive");
        if (lambda <= 0)
            throw DomainError("HoeSpec: wavelength must be positive");
    }
};

// Largest local fringe frequency of the element phase inside a half-extent
// (hx, hy) around the axis, per axis. The spherical term contributes
// |x|/(lambda*r) and the carrier sin(theta)/lambda along x.
inline double max_fringe_frequency(const HoeSpec &spec, double hx, double hy) {
    // x-fringe peaks at (+-hx, 0), y-fringe at (0, +-hy): for fixed x the
    // ratio x/r grows as |y| shrinks, and symmetrically for y.
    double worst = 0.0;
    for (double sx : {-1.0, 1.0}) {
        const double x = sx * hx;
        const double r = std::sqrt(x * x + spec.r0 * spec.r0);
        worst = std::max(worst, std::abs(std::sin(spec.theta) - x / r) / spec.lambda);
    }
    const double ry = std::sqrt(hy * hy + spec.r0 * spec.r0);
    worst = std::max(worst, hy / ry / spec.lambda);
    return worst;
}

inline void check_fringe_sampling(const HoeSpec &spec, double hx, double hy, double pitch_x,
                                  double pitch_y, bool override_sampling) {
    if (override_sampling)
        return;
    const double nyq = 1.0 / (2.0 * std::max(pitch_x, pitch_y));
    const double fringe = max_fringe_frequency(spec, hx, hy);
    if (fringe > nyq) {
        SamplingDiagnostics d;
        d.max_local_fringe_frequency = fringe;
        d.nyquist_frequency = nyq;
        d.ok = false;
        throw SamplingError(d);
    }
}

// Element phase phi(x,y) = -k*sqrt(x^2 + y^2 + r0^2) + k*x*sin(theta) on a
// grid centered at the optical axis. The grid must not extend beyond the
// element aperture.
inline RealMap phase_profile(const HoeSpec &spec, int nx, int ny, double pitch,
                             bool override_sampling = false) {
    spec.validate();
    if (pitch <= 0)
        throw DomainError("phase_profile: pitch must be positive");
    RealMap map(nx, ny, pitch, pitch);
    const double hx = std::max(std::abs(map.x(0)), std::abs(map.x(nx - 1)));
    const double hy = std::max(std::abs(map.y(0)), std::abs(map.y(ny - 1)));
    if (hx > spec.aperture_w / 2 + pitch / 2 || hy > spec.aperture_h / 2 + pitch / 2)
        throw DomainError("phase_profile: grid extends beyond the element aperture");
    check_fringe_sampling(spec, hx, hy, pitch, pitch, override_sampling);

    const double k = wave_number(spec.lambda);
    const double sin_t = std::sin(spec.theta);
    for (int ix = 0; ix < nx; ++ix) {
        const double x = map.x(ix);
        for (int iy = 0; iy < ny; ++iy) {
            const double y = map.y(iy);
            map.at(ix, iy) = -k * std::sqrt(x * x + y * y + spec.r0 * spec.r0) + k * x * sin_t;
        }
    }
    return map;
}

// Paraxial thin-lens reference: phi(x,y) = -k*(x^2+y^2)/(2*r0).
inline RealMap equivalent_thin_lens(double r0, double lambda, int nx, int ny, double pitch) {
    if (r0 <= 0 || lambda <= 0 || pitch <= 0)
        throw DomainError("equivalent_thin_lens: r0, lambda, pitch must be positive");
    RealMap map(nx, ny, pitch, pitch);
    const double k = wave_number(lambda);
    for (int ix = 0; ix < nx; ++ix) {
        const double x = map.x(ix);
        for (int iy = 0; iy < ny; ++iy) {
            const double y = map.y(iy);
            map.at(ix, iy) = -k * (x * x + y * y) / (2.0 * r0);
        }
    }
    return map;
}

struct ApplyOptions {
    bool allow_wavelength_mismatch = false;
    bool override_sampling = false;
    bool conjugate = false; // apply exp(-j*phi) instead (unwrap/cancel)
};

// Multiply the field by the element transmission exp(j*phi) and cut the hard
// rectangular aperture. Amplitude is preserved inside the aperture; the
// diffraction-efficiency amplitude scaling lives in the grating model.
inline ComplexField apply(const ComplexField &field, const HoeSpec &spec,
                          const ApplyOptions &opts = {}) {
    spec.validate();
    if (field.nx < 2 || field.ny < 2)
        throw ShapeError("apply: empty field");
    if (!opts.allow_wavelength_mismatch && field.lambda != spec.lambda)
        throw DomainError("apply: field wavelength differs from the element design wavelength "
                          "(pass allow_wavelength_mismatch to model replay detuning)");
    const double hx = std::min(spec.aperture_w / 2,
                               std::max(std::abs(field.x(0)), std::abs(field.x(field.nx - 1))));
    const double hy = std::min(spec.aperture_h / 2,
                               std::max(std::abs(field.y(0)), std::abs(field.y(field.ny - 1))));
    check_fringe_sampling(spec, hx, hy, field.pitch_x, field.pitch_y, opts.override_sampling);

    const double k = wave_number(spec.lambda);
    const double sin_t = std::sin(spec.theta);
    const double sign = opts.conjugate ? -1.0 : 1.0;
    ComplexField out(field.nx, field.ny, field.pitch_x, field.pitch_y, field.lambda);
    for (int ix = 0; ix < field.nx; ++ix) {
        const double x = field.x(ix);
        const bool in_x = std::abs(x) <= spec.aperture_w / 2;
        for (int iy = 0; iy < field.ny; ++iy) {
            const double y = field.y(iy);
            if (!in_x || std::abs(y) > spec.aperture_h / 2) {
                out.at(ix, iy) = cplx(0.0, 0.0);
                continue;
            }
            const double phi =
                sign * (-k * std::sqrt(x * x + y * y + spec.r0 * spec.r0) + k * x * sin_t);
            out.at(ix, iy) = field.at(ix, iy) * std::polar(1.0, phi);
        }
    }
    return out;
}

} // namespace hoesim
