#pragma once

#include <cmath>
#include <string>

#include "hoesim/errors.hpp"
#include "hoesim/field.hpp"

namespace hoesim {

// Numerical-validity report for a planned transfer-function propagation.
//
// max_local_fringe_frequency is the field's highest significant spatial
// frequency rescaled by the sampling margin of the transfer-function phase
// for the requested distance, expressed on the grid-Nyquist scale. With that
// normalization the usual criteria collapse to a single comparison:
// ok <=> max_local_fringe_frequency <= nyquist_frequency.
struct SamplingDiagnostics {
    double max_local_fringe_frequency = 0.0; // cycles/m, normalized as above
    double nyquist_frequency = 0.0;          // 1/(2*pitch), cycles/m
    double evanescent_energy_fraction = 0.0; // spectral energy with |f| > 1/lambda
    bool ok = true;

    std::string describe() const {
        return "sampling: max_local_fringe_frequency=" +
               std::to_string(max_local_fringe_frequency) +
               " cycles/m, nyquist=" + std::to_string(nyquist_frequency) +
               " cycles/m, evanescent_fraction=" + std::to_string(evanescent_energy_fraction) +
               (ok ? " [ok]" : " [violated]");
    }
};

class SamplingError : public Error {
public:
    explicit SamplingError(const SamplingDiagnostics &d) : Error(d.describe()), diagnostics_(d) {}
    const SamplingDiagnostics &diagnostics() const { return diagnostics_; }

private:
    SamplingDiagnostics diagnostics_;
};

// Highest representable frequency of the sampled transfer function at
// propagation distance z, for frequency-bin spacing df (the band-limited
// angular-spectrum rule): f_limit = 1/(lambda*sqrt((2*df*z)^2 + 1)).
inline double band_limit_frequency(double lambda, double z, double df) {
    const double a = 2.0 * df * z;
    return 1.0 / (lambda * std::sqrt(a * a + 1.0));
}

// Distance at which a component of frequency f0 starts to alias the
// transfer-function phase (inverse of band_limit_frequency in z).
inline double aliasing_onset_distance(double lambda, double f0, double df) {
    if (f0 <= 0.0 || lambda * f0 >= 1.0)
        throw DomainError("aliasing_onset_distance: need 0 < f0 < 1/lambda");
    const double u = 1.0 / (lambda * f0);
    return std::sqrt(u * u - 1.0) / (2.0 * df);
}

} // namespace hoesim
