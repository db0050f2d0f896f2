#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <vector>

#include "hoesim/errors.hpp"
#include "hoesim/fft.hpp"
#include "hoesim/field.hpp"
#include "hoesim/sampling.hpp"
#include "hoesim/units.hpp"

namespace hoesim {

// Warning sink for benign conditions (z = 0 identity propagation). The CLI
// leaves the default; tests may silence it.
inline std::function<void(const std::string &)> &warning_handler() {
    static std::function<void(const std::string &)> handler = [](const std::string &msg) {
        std::fprintf(stderr, "warning: %s\n", msg.c_str());
    };
    return handler;
}

struct PropagationOptions {
    bool override_sampling = false; // proceed even if validation fails
    bool pad = true;                // 2x zero-padding against wrap-around
    bool band_limit = true;         // band-limited transfer function window
    // Envelope carrier: the stored samples are understood as the envelope of
    // field * exp(2*pi*j*(carrier_fx*x + carrier_fy*y)). The transfer
    // function is evaluated at the true (carrier-shifted) frequencies, which
    // keeps strongly tilted beams representable on a coarse grid.
    double carrier_fx = 0.0; // cycles/m
    double carrier_fy = 0.0;
    // Output window recentring: sample the destination plane at x + shift_x
    // so a walking beam stays centered. Applied to the envelope coordinates.
    double shift_x = 0.0; // m
    double shift_y = 0.0;
};

// Transverse displacement of a beam with carrier frequency f0 after
// propagating a distance z (the stationary-phase walk of the envelope).
inline double beam_walk(double z, double lambda, double f0) {
    const double s = lambda * f0;
    if (std::abs(s) >= 1.0)
        throw DomainError("beam_walk: carrier beyond the propagating band");
    return z * s / std::sqrt(1.0 - s * s);
}

// Angular-spectrum propagation session: the padded spectrum of one source
// field, reusable for any number of destination distances. Building the
// session costs one forward FFT; each propagate_to costs one transfer-
// function sweep and one inverse FFT. Instances are immutable after
// construction and safe to share across threads.
class AsmSession {
public:
    AsmSession(const ComplexField &field, const PropagationOptions &opts = {})
        : opts_(opts), nx_(field.nx), ny_(field.ny), pitch_x_(field.pitch_x),
          pitch_y_(field.pitch_y), lambda_(field.lambda) {
        if (!all_finite(field))
            throw DomainError("propagate: field contains non-finite amplitudes");
        pnx_ = opts.pad ? 2 * nx_ : nx_;
        pny_ = opts.pad ? 2 * ny_ : ny_;
        ox_ = (pnx_ - nx_) / 2;
        oy_ = (pny_ - ny_) / 2;

        std::vector<cplx> padded(static_cast<size_t>(pnx_) * pny_, cplx(0.0, 0.0));
        for (int ix = 0; ix < nx_; ++ix)
            for (int iy = 0; iy < ny_; ++iy)
                padded[static_cast<size_t>(ix + ox_) * pny_ + (iy + oy_)] = field.at(ix, iy);
        spectrum_.resize(padded.size());
        fft::forward(pnx_, pny_, padded.data(), spectrum_.data());

        analyze_spectrum(field);
    }

    // Significant envelope bandwidth per axis (cycles/m), measured from the
    // spectrum with a 1e-6 relative amplitude cutoff.
    double significant_fx() const { return fx_sig_; }
    double significant_fy() const { return fy_sig_; }

    SamplingDiagnostics diagnostics(double z) const {
        return diagnostics(z, opts_.shift_x, opts_.shift_y);
    }

    SamplingDiagnostics diagnostics(double z, double shift_x, double shift_y) const {
        SamplingDiagnostics d;
        d.nyquist_frequency = 1.0 / (2.0 * std::max(pitch_x_, pitch_y_));
        d.evanescent_energy_fraction = evanescent_fraction_;
        // Worst transfer-function phase step over the significant band,
        // normalized so the pass condition reads fringe <= nyquist.
        const double dfx = 1.0 / (pnx_ * pitch_x_);
        const double dfy = 1.0 / (pny_ * pitch_y_);
        double worst = 0.0;
        for (double sx : {-1.0, 1.0})
            for (double sy : {-1.0, 1.0}) {
                const double fu = sx * fx_sig_;
                const double fv = sy * fy_sig_;
                double gx = 0.0, gy = 0.0;
                phase_gradient(fu, fv, z, shift_x, shift_y, gx, gy);
                worst = std::max({worst, std::abs(gx) * dfx / kPi, std::abs(gy) * dfy / kPi});
            }
        d.max_local_fringe_frequency = worst * d.nyquist_frequency;
        d.ok = d.max_local_fringe_frequency <= d.nyquist_frequency;
        return d;
    }

    ComplexField propagate_to(double z) const {
        return propagate_to(z, opts_.shift_x, opts_.shift_y);
    }

    // Propagate with an explicit output-window recentring (overrides the
    // options' shift); used by depth scans that follow a walking beam.
    ComplexField propagate_to(double z, double shift_x, double shift_y) const {
        if (z == 0.0) {
            warning_handler()("propagate: z = 0 returns the field unchanged");
            return crop(spectrum_to_samples());
        }
        if (!opts_.override_sampling) {
            SamplingDiagnostics d = diagnostics(z, shift_x, shift_y);
            if (!d.ok)
                throw SamplingError(d);
        }

        const double dfx = 1.0 / (pnx_ * pitch_x_);
        const double dfy = 1.0 / (pny_ * pitch_y_);
        const double inv_l2 = 1.0 / (lambda_ * lambda_);

        std::vector<cplx> spec(spectrum_.size());
        for (int i = 0; i < pnx_; ++i) {
            const double u = fft::bin_frequency(i, pnx_, pitch_x_);
            const double fu = u + opts_.carrier_fx;
            for (int j = 0; j < pny_; ++j) {
                const double v = fft::bin_frequency(j, pny_, pitch_y_);
                const double fv = v + opts_.carrier_fy;
                const size_t idx = static_cast<size_t>(i) * pny_ + j;
                const double s = inv_l2 - fu * fu - fv * fv;
                cplx h(0.0, 0.0);
                if (s > 0.0) {
                    const double kz = 2.0 * kPi * std::sqrt(s);
                    double w = 1.0;
                    if (opts_.band_limit) {
                        double gx = 0.0, gy = 0.0;
                        phase_gradient(u, v, z, shift_x, shift_y, gx, gy);
                        w = window_weight(std::abs(gx) * dfx / kPi) *
                            window_weight(std::abs(gy) * dfy / kPi);
                    }
                    if (w > 0.0) {
                        const double phase = z * kz + 2.0 * kPi * (u * shift_x + v * shift_y);
                        h = std::polar(w, phase);
                    }
                } else if (z > 0.0) {
                    // Evanescent: decays forward, never amplified backward.
                    const double kappa = 2.0 * kPi * std::sqrt(-s);
                    const double phase = 2.0 * kPi * (u * shift_x + v * shift_y);
                    h = std::polar(std::exp(-z * kappa), phase);
                }
                spec[idx] = spectrum_[idx] * h;
            }
        }

        std::vector<cplx> out(spec.size());
        fft::inverse(pnx_, pny_, spec.data(), out.data());
        const double norm = 1.0 / (static_cast<double>(pnx_) * pny_);
        for (cplx &v : out)
            v *= norm;
        return crop(out);
    }

private:
    // Band-limit window with a raised-cosine rolloff over the outer 30% of
    // the admissible phase-gradient margin. A hard cut at the limit would
    // ring across defocused reconstructions; content below 70% of the limit
    // passes untouched, so conservation properties of well-sampled fields
    // are unaffected.
    static double window_weight(double margin_usage) {
        if (margin_usage <= 0.7)
            return 1.0;
        if (margin_usage >= 1.0)
            return 0.0;
        const double t = std::cos(0.5 * kPi * (margin_usage - 0.7) / 0.3);
        return t * t;
    }

    // Gradient of the sampled transfer-function phase with respect to the
    // envelope frequencies, evaluated at envelope offset (fu_env, fv_env).
    // Includes the window-recentring term, so a carrier-following shift
    // relaxes the sampling condition exactly as it should.
    void phase_gradient(double fu_env, double fv_env, double z, double shift_x, double shift_y,
                        double &gx, double &gy) const {
        const double fu = fu_env + opts_.carrier_fx;
        const double fv = fv_env + opts_.carrier_fy;
        const double s = 1.0 / (lambda_ * lambda_) - fu * fu - fv * fv;
        if (s <= 0.0) {
            // Evanescent content carries no propagating phase to alias.
            gx = 2.0 * kPi * shift_x;
            gy = 2.0 * kPi * shift_y;
            return;
        }
        const double kz = 2.0 * kPi * std::sqrt(s);
        gx = -4.0 * kPi * kPi * fu * z / kz + 2.0 * kPi * shift_x;
        gy = -4.0 * kPi * kPi * fv * z / kz + 2.0 * kPi * shift_y;
    }

    // Content analysis runs on the unpadded spectrum: padding a field that is
    // nonzero at the window edge (a plane wave, say) smears Dirichlet-kernel
    // leakage across every padded bin and would mask the true bandwidth.
    // The significant band is an energy quantile, not an amplitude cutoff:
    // per axis, the smallest |f| containing all but 1e-6 of the energy.
    // Content outside it is what the band-limit window may drop, and by
    // construction that loss is bounded by the quantile.
    void analyze_spectrum(const ComplexField &field) {
        std::vector<cplx> spec(field.data.size());
        fft::forward(nx_, ny_, field.data.data(), spec.data());
        const double inv_l2 = 1.0 / (lambda_ * lambda_);
        double total = 0.0, evan = 0.0;
        std::vector<double> ex(static_cast<size_t>(nx_) / 2 + 1, 0.0);
        std::vector<double> ey(static_cast<size_t>(ny_) / 2 + 1, 0.0);
        for (int i = 0; i < nx_; ++i) {
            const double u = fft::bin_frequency(i, nx_, pitch_x_);
            const int bi = std::min<int>(std::abs(i <= nx_ / 2 ? i : i - nx_), nx_ / 2);
            for (int j = 0; j < ny_; ++j) {
                const double v = fft::bin_frequency(j, ny_, pitch_y_);
                const int bj = std::min<int>(std::abs(j <= ny_ / 2 ? j : j - ny_), ny_ / 2);
                const size_t idx = static_cast<size_t>(i) * ny_ + j;
                const double m2 = std::norm(spec[idx]);
                total += m2;
                ex[bi] += m2;
                ey[bj] += m2;
                const double fu = u + opts_.carrier_fx;
                const double fv = v + opts_.carrier_fy;
                if (fu * fu + fv * fv > inv_l2)
                    evan += m2;
            }
        }
        evanescent_fraction_ = total > 0.0 ? evan / total : 0.0;
        const double keep = total * (1.0 - 1e-6);
        auto quantile_bin = [keep](const std::vector<double> &e) {
            double acc = 0.0;
            for (size_t b = 0; b < e.size(); ++b) {
                acc += e[b];
                if (acc >= keep)
                    return b;
            }
            return e.size() - 1;
        };
        fx_sig_ = total > 0.0 ? quantile_bin(ex) / (nx_ * pitch_x_) : 0.0;
        fy_sig_ = total > 0.0 ? quantile_bin(ey) / (ny_ * pitch_y_) : 0.0;
    }

    std::vector<cplx> spectrum_to_samples() const {
        std::vector<cplx> out(spectrum_.size());
        fft::inverse(pnx_, pny_, spectrum_.data(), out.data());
        const double norm = 1.0 / (static_cast<double>(pnx_) * pny_);
        for (cplx &v : out)
            v *= norm;
        return out;
    }

    ComplexField crop(const std::vector<cplx> &padded) const {
        ComplexField f(nx_, ny_, pitch_x_, pitch_y_, lambda_);
        for (int ix = 0; ix < nx_; ++ix)
            for (int iy = 0; iy < ny_; ++iy)
                f.at(ix, iy) = padded[static_cast<size_t>(ix + ox_) * pny_ + (iy + oy_)];
        return f;
    }

    PropagationOptions opts_;
    int nx_, ny_, pnx_ = 0, pny_ = 0, ox_ = 0, oy_ = 0;
    double pitch_x_, pitch_y_, lambda_;
    std::vector<cplx> spectrum_;
    double fx_sig_ = 0.0, fy_sig_ = 0.0, evanescent_fraction_ = 0.0;
};

// Fast transfer-function (angular spectrum) propagation over a signed
// distance z; positive z moves away from the source along the axis.
inline ComplexField propagate_asm(const ComplexField &field, double z,
                                  const PropagationOptions &opts = {}) {
    return AsmSession(field, opts).propagate_to(z);
}

inline SamplingDiagnostics validate_sampling(const ComplexField &field, double z,
                                             const PropagationOptions &opts = {}) {
    PropagationOptions o = opts;
    o.override_sampling = true; // diagnostics only, never throws
    return AsmSession(field, o).diagnostics(z);
}

// Direct midpoint-rule quadrature of the free-space point-spread kernel
//
//   E(x,y) = K * sum A(xi,eta) exp(j k r)/r dxi deta,
//   r = sqrt((x-xi)^2 + (y-eta)^2 + z^2),  K = 1/(j lambda).
//
// For z < 0 the conjugate kernel is used (adjoint/backward propagation).
// O(N^4) with an O(N^2) kernel table; this is the reference oracle for
// propagate_asm, not a production path.
inline ComplexField propagate_direct(const ComplexField &field, double z) {
    if (!all_finite(field))
        throw DomainError("propagate_direct: field contains non-finite amplitudes");
    if (z == 0.0) {
        warning_handler()("propagate_direct: z = 0 returns the field unchanged");
        return field;
    }
    const int nx = field.nx, ny = field.ny;
    const double k = wave_number(field.lambda);
    const bool backward = z < 0.0;
    const double az = std::abs(z);
    const cplx K = backward ? cplx(0.0, 1.0 / field.lambda)   // conj(1/(j lambda))
                            : cplx(0.0, -1.0 / field.lambda); // 1/(j lambda)
    const double cell = field.pitch_x * field.pitch_y;

    // Kernel depends only on the sample offset: table over (2nx-1)x(2ny-1).
    const int kw = 2 * nx - 1, kh = 2 * ny - 1;
    std::vector<cplx> kernel(static_cast<size_t>(kw) * kh);
    for (int dx = -(nx - 1); dx <= nx - 1; ++dx) {
        const double xx = dx * field.pitch_x;
        for (int dy = -(ny - 1); dy <= ny - 1; ++dy) {
            const double yy = dy * field.pitch_y;
            const double r = std::sqrt(xx * xx + yy * yy + az * az);
            const double phase = backward ? -k * r : k * r;
            kernel[static_cast<size_t>(dx + nx - 1) * kh + (dy + ny - 1)] =
                K * std::polar(1.0 / r, phase) * cell;
        }
    }

    ComplexField out(nx, ny, field.pitch_x, field.pitch_y, field.lambda);
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) {
            cplx acc(0.0, 0.0);
            const size_t krow = static_cast<size_t>(ix + nx - 1) * kh + (iy + ny - 1);
            for (int jx = 0; jx < nx; ++jx) {
                const cplx *src = &field.data[static_cast<size_t>(jx) * ny];
                const cplx *ker = &kernel[krow - static_cast<size_t>(jx) * kh];
                for (int jy = 0; jy < ny; ++jy)
                    acc += src[jy] * ker[-jy];
            }
            out.at(ix, iy) = acc;
        }
    }
    return out;
}

} // namespace hoesim
