#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hoesim/errors.hpp"
#include "hoesim/paraxial.hpp"
#include "hoesim/units.hpp"

namespace hoesim {

// Volume-grating physics parameters. k_mag is the grating-vector magnitude;
// the detuning relation is evaluated literally with it (Kogelnik's
// grating-vector convention is the intended reading, but the magnitude is
// caller-supplied, so either convention can be fed in deliberately).
struct GratingSpec {
    double k_mag = 0.0;        // rad/m
    double grating_tilt = 0.0; // rad, grating vector tilt from surface normal (phi)
    double theta0 = 0.0;       // rad, reference incidence angle at recording
    double n0 = 1.5;           // bulk refractive index
    double n1 = 0.0;           // index modulation amplitude
    double thickness = 0.0;    // m
    double c_r = 1.0;          // obliquity factors; defaults cos of replay angles
    double c_s = 1.0;

    void validate() const {
        if (k_mag <= 0)
            throw DomainError("GratingSpec: k_mag must be positive");
        if (n0 < 1.0)
            throw DomainError("GratingSpec: n0 must be >= 1");
        if (n1 < 0 || n1 >= n0)
            throw DomainError("GratingSpec: need 0 <= n1 < n0");
        if (thickness <= 0)
            throw DomainError("GratingSpec: thickness must be positive");
        if (c_r == 0 || c_s == 0)
            throw DomainError("GratingSpec: obliquity factors must be nonzero");
    }
};

// Angle/wavelength detuning away from the recording condition.
struct Detuning {
    double d_theta = 0.0;  // rad
    double d_lambda = 0.0; // m
};

// Combiner transmission stack (substrate plus n identical recorded layers).
struct LayerStack {
    double t_glass = 1.0;
    double t_layer = 1.0;
    int n_layers = 0;

    void validate() const {
        if (t_glass < 0 || t_glass > 1 || t_layer < 0 || t_layer > 1)
            throw DomainError("LayerStack: transmittances must lie in [0,1]");
        if (n_layers < 0)
            throw DomainError("LayerStack: n_layers must be >= 0");
    }
};

// Bragg mismatch parameter:
//   delta = d_theta * k * sin(phi - theta0) - d_lambda * k^2 / (4 pi n0),
// evaluated literally as printed.
inline double bragg_mismatch(const GratingSpec &g, const Detuning &det) {
    g.validate();
    if (!std::isfinite(det.d_theta) || !std::isfinite(det.d_lambda))
        throw DomainError("bragg_mismatch: detuning must be finite");
    return det.d_theta * g.k_mag * std::sin(g.grating_tilt - g.theta0) -
           det.d_lambda * g.k_mag * g.k_mag / (4.0 * kPi * g.n0);
}

// Angular offset that restores Bragg matching for a given wavelength offset.
inline double compensating_angle(const GratingSpec &g, double d_lambda) {
    g.validate();
    const double s = std::sin(g.grating_tilt - g.theta0);
    if (std::abs(s) < 1e-15)
        throw DegenerateError("compensating_angle: unslanted grating (phi == theta0), "
                              "no angular compensation exists");
    return d_lambda * g.k_mag / (4.0 * kPi * g.n0 * s);
}

// Lossless reflection-grating diffraction efficiency (coupled-wave theory):
//   eta = 1 / (1 + (1 - xi^2/nu^2) / sinh^2(sqrt(nu^2 - xi^2)))
// with the standard analytic continuation sinh(jx) = j sin(x) for
// xi^2 > nu^2. Always in [0, 1].
inline double reflection_efficiency(double nu, double xi) {
    if (!std::isfinite(nu) || !std::isfinite(xi))
        throw DomainError("reflection_efficiency: inputs must be finite");
    if (nu < 0)
        throw DomainError("reflection_efficiency: nu must be >= 0");
    if (nu == 0.0)
        return 0.0; // no modulation, nothing diffracted (limit)
    const double s = nu * nu - xi * xi;
    double denom_term;
    if (s > 0.0) {
        const double sh = std::sinh(std::sqrt(s));
        denom_term = (s / (nu * nu)) / (sh * sh);
    } else if (s < 0.0) {
        const double sn = std::sin(std::sqrt(-s));
        if (sn == 0.0)
            return 0.0; // exact detuning null
        denom_term = (-s / (nu * nu)) / (sn * sn);
    } else {
        denom_term = 1.0 / (nu * nu);
    }
    return 1.0 / (1.0 + denom_term);
}

// Dephasing input to the efficiency formula: xi = delta * thickness / (2 c_s).
inline double xi_from_delta(const GratingSpec &g, double delta) {
    g.validate();
    return delta * g.thickness / (2.0 * g.c_s);
}

// Shared material/fixture parameters for cross-channel comparisons. nu is
// the modulation strength used for every channel; per-channel grating-vector
// magnitudes are derived from the recording wavelengths as
// k_mag = 4 pi n0 / lambda_record (counter-propagating reflection geometry).
struct SharedGratingMaterial {
    double nu = 2.0;
    double n0 = 1.5;
    double thickness = 16e-6; // m
    double grating_tilt = deg_to_rad(75.0);
    double theta0 = deg_to_rad(30.0); // tilt - theta0 = 45 deg, away from degeneracy
    double c_r = std::cos(deg_to_rad(30.0));
    double c_s = std::cos(deg_to_rad(30.0));

    GratingSpec spec_for(double lambda_record_m, double n1 = 0.01) const {
        GratingSpec g;
        g.k_mag = 4.0 * kPi * n0 / lambda_record_m;
        g.grating_tilt = grating_tilt;
        g.theta0 = theta0;
        g.n0 = n0;
        g.n1 = n1;
        g.thickness = thickness;
        g.c_r = c_r;
        g.c_s = c_s;
        return g;
    }
};

struct ChannelEfficiency {
    std::string name;
    double d_lambda = 0.0; // m, replay minus recording
    double delta = 0.0;    // rad/m
    double xi = 0.0;
    double eta = 0.0;
};

// Replay efficiency of each channel under its recording->replay wavelength
// shift, sorted best first. Angle detuning is zero (the replay geometry
// matches recording).
inline std::vector<ChannelEfficiency>
replay_ranking(const std::vector<WavelengthChannel> &channels, const SharedGratingMaterial &mat) {
    if (channels.empty())
        throw DomainError("replay_ranking: at least one channel required");
    std::vector<ChannelEfficiency> result;
    for (const auto &ch : channels) {
        ch.validate();
        GratingSpec g = mat.spec_for(nm_to_m(ch.lambda_record));
        ChannelEfficiency ce;
        ce.name = ch.name;
        ce.d_lambda = nm_to_m(ch.lambda_replay - ch.lambda_record);
        ce.delta = bragg_mismatch(g, Detuning{0.0, std::abs(ce.d_lambda)});
        ce.xi = xi_from_delta(g, ce.delta);
        ce.eta = reflection_efficiency(mat.nu, ce.xi);
        result.push_back(ce);
    }
    std::stable_sort(result.begin(), result.end(),
                     [](const ChannelEfficiency &a, const ChannelEfficiency &b) {
                         return a.eta > b.eta;
                     });
    return result;
}

// Invert the efficiency formula for the modulation strength nu at fixed
// dephasing xi, on the branch nu >= |xi| where eta is monotone increasing.
// Bisection to 1e-10 in eta.
inline double fit_modulation(double eta_measured, double xi = 0.0) {
    if (!std::isfinite(eta_measured) || eta_measured < 0 || eta_measured >= 1)
        throw DomainError("fit_modulation: eta must lie in [0, 1)");
    if (eta_measured == 0.0)
        return 0.0;
    double lo = std::abs(xi);
    double hi = std::max(lo, 1.0);
    while (reflection_efficiency(hi, xi) < eta_measured) {
        hi *= 2.0;
        if (hi > 1e6)
            throw DomainError("fit_modulation: no root in bracket");
    }
    if (reflection_efficiency(lo, xi) > eta_measured)
        throw DomainError("fit_modulation: eta below the branch minimum for this xi");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double e = reflection_efficiency(mid, xi);
        if (std::abs(e - eta_measured) < 1e-12)
            return mid;
        (e < eta_measured ? lo : hi) = mid;
        if (hi - lo < 1e-14 * std::max(1.0, hi))
            break;
    }
    return 0.5 * (lo + hi);
}

// Static transmission of the combiner stack: T = t_glass * t_layer^n.
inline double transmittance_stack(const LayerStack &stack) {
    stack.validate();
    return stack.t_glass * std::pow(stack.t_layer, stack.n_layers);
}

// One row of a detuning sweep.
struct DetuningPoint {
    double d_lambda = 0.0; // m
    double d_theta = 0.0;  // rad
    double delta = 0.0;
    double xi = 0.0;
    double eta = 0.0;
};

// Sweep eta against wavelength detuning (d_theta = 0) or angle detuning
// (d_lambda = 0). A zero-width range produces the single on-Bragg row.
inline std::vector<DetuningPoint> detuning_sweep_lambda(const GratingSpec &g, double nu,
                                                        double d_lambda_min, double d_lambda_max,
                                                        int steps) {
    if (steps < 1 || d_lambda_max < d_lambda_min)
        throw DomainError("detuning_sweep_lambda: bad sweep range");
    std::vector<DetuningPoint> rows;
    for (int i = 0; i < steps; ++i) {
        DetuningPoint pt;
        pt.d_lambda = steps == 1 ? d_lambda_min
                                 : d_lambda_min + (d_lambda_max - d_lambda_min) * i / (steps - 1);
        pt.delta = bragg_mismatch(g, Detuning{0.0, pt.d_lambda});
        pt.xi = xi_from_delta(g, pt.delta);
        pt.eta = reflection_efficiency(nu, pt.xi);
        rows.push_back(pt);
    }
    return rows;
}

inline std::vector<DetuningPoint> detuning_sweep_theta(const GratingSpec &g, double nu,
                                                       double d_theta_min, double d_theta_max,
                                                       int steps) {
    if (steps < 1 || d_theta_max < d_theta_min)
        throw DomainError("detuning_sweep_theta: bad sweep range");
    std::vector<DetuningPoint> rows;
    for (int i = 0; i < steps; ++i) {
        DetuningPoint pt;
        pt.d_theta = steps == 1 ? d_theta_min
                                : d_theta_min + (d_theta_max - d_theta_min) * i / (steps - 1);
        pt.delta = bragg_mismatch(g, Detuning{pt.d_theta, 0.0});
        pt.xi = xi_from_delta(g, pt.delta);
        pt.eta = reflection_efficiency(nu, pt.xi);
        rows.push_back(pt);
    }
    return rows;
}

} // namespace hoesim
