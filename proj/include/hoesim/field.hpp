#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "hoesim/errors.hpp"
#include "hoesim/units.hpp"

namespace hoesim {

using cplx = std::complex<double>;

// Sampled complex optical field on a uniform 2-D grid.
//
// Storage is row-major with y fastest: data[ix * ny + iy]. Sample (ix, iy)
// sits at physical position ((ix - nx/2) * pitch_x, (iy - ny/2) * pitch_y),
// i.e. the optical axis passes through index (nx/2, ny/2).
struct ComplexField {
    int nx = 0;
    int ny = 0;
    double pitch_x = 0.0; // m
    double pitch_y = 0.0; // m
    double lambda = 0.0;  // m
    std::vector<cplx> data;

    ComplexField() = default;
    ComplexField(int nx_, int ny_, double pitch_x_, double pitch_y_, double lambda_)
        : nx(nx_), ny(ny_), pitch_x(pitch_x_), pitch_y(pitch_y_), lambda(lambda_),
          data(static_cast<size_t>(nx_) * static_cast<size_t>(ny_)) {
        if (nx < 2 || ny < 2)
            throw DomainError("ComplexField: grid must be at least 2x2");
        if (pitch_x <= 0.0 || pitch_y <= 0.0)
            throw DomainError("ComplexField: pitch must be positive");
        if (lambda <= 0.0)
            throw DomainError("ComplexField: wavelength must be positive");
    }

    cplx &at(int ix, int iy) { return data[static_cast<size_t>(ix) * ny + iy]; }
    const cplx &at(int ix, int iy) const { return data[static_cast<size_t>(ix) * ny + iy]; }

    // Physical coordinate of sample index along each axis.
    double x(int ix) const { return (ix - nx / 2) * pitch_x; }
    double y(int iy) const { return (iy - ny / 2) * pitch_y; }

    size_t size() const { return data.size(); }

    bool same_grid(const ComplexField &o) const {
        return nx == o.nx && ny == o.ny && pitch_x == o.pitch_x && pitch_y == o.pitch_y;
    }
};

// Real-valued map on the same grid layout (phase maps, intensity images).
struct RealMap {
    int nx = 0;
    int ny = 0;
    double pitch_x = 0.0; // m
    double pitch_y = 0.0; // m
    std::vector<double> data;

    RealMap() = default;
    RealMap(int nx_, int ny_, double pitch_x_, double pitch_y_)
        : nx(nx_), ny(ny_), pitch_x(pitch_x_), pitch_y(pitch_y_),
          data(static_cast<size_t>(nx_) * static_cast<size_t>(ny_), 0.0) {
        if (nx < 1 || ny < 1)
            throw DomainError("RealMap: grid must be at least 1x1");
        if (pitch_x <= 0.0 || pitch_y <= 0.0)
            throw DomainError("RealMap: pitch must be positive");
    }

    double &at(int ix, int iy) { return data[static_cast<size_t>(ix) * ny + iy]; }
    double at(int ix, int iy) const { return data[static_cast<size_t>(ix) * ny + iy]; }

    double x(int ix) const { return (ix - nx / 2) * pitch_x; }
    double y(int iy) const { return (iy - ny / 2) * pitch_y; }

    size_t size() const { return data.size(); }
};

inline bool all_finite(const ComplexField &f) {
    for (const cplx &v : f.data)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            return false;
    return true;
}

// Discrete field energy: sum |a|^2 * pitch_x * pitch_y.
inline double energy(const ComplexField &f) {
    double acc = 0.0;
    for (const cplx &v : f.data)
        acc += std::norm(v);
    return acc * f.pitch_x * f.pitch_y;
}

inline RealMap intensity(const ComplexField &f) {
    RealMap m(f.nx, f.ny, f.pitch_x, f.pitch_y);
    for (size_t i = 0; i < f.data.size(); ++i)
        m.data[i] = std::norm(f.data[i]);
    return m;
}

// Relative L2 distance ||a - b|| / ||b||.
inline double relative_l2(const ComplexField &a, const ComplexField &b) {
    if (!a.same_grid(b))
        throw ShapeError("relative_l2: fields on different grids");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        num += std::norm(a.data[i] - b.data[i]);
        den += std::norm(b.data[i]);
    }
    if (den == 0.0)
        return std::sqrt(num);
    return std::sqrt(num / den);
}

} // namespace hoesim
