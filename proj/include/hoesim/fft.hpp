#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "hoesim/errors.hpp"

namespace hoesim {
namespace fft {

// Thin wrapper around FFTW double-precision c2c transforms.
//
// Plans are created with FFTW_ESTIMATE so the chosen algorithm depends only
// on the transform size, keeping outputs bit-identical across runs, and with
// FFTW_UNALIGNED so a cached plan can execute on any caller buffer via the
// new-array interface. Plan creation is serialized (the FFTW planner is not
// thread-safe); execution on distinct buffers is.
class PlanCache {
public:
    static PlanCache &instance() {
        static PlanCache cache;
        return cache;
    }

    // 2-D transform over data[ix*ny + iy]; sign = FFTW_FORWARD/BACKWARD.
    // in and out must be distinct buffers of nx*ny elements.
    void transform(int nx, int ny, int sign, const std::complex<double> *in,
                   std::complex<double> *out) {
        fftw_plan plan = get_plan(nx, ny, sign);
        // fftw_complex is layout-compatible with std::complex<double>.
        fftw_execute_dft(plan,
                         reinterpret_cast<fftw_complex *>(const_cast<std::complex<double> *>(in)),
                         reinterpret_cast<fftw_complex *>(out));
    }

    PlanCache(const PlanCache &) = delete;
    PlanCache &operator=(const PlanCache &) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto &[key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get_plan(int nx, int ny, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(nx, ny, sign);
        auto it = plans_.find(key);
        if (it != plans_.end())
            return it->second;
        std::vector<std::complex<double>> a(static_cast<size_t>(nx) * ny);
        std::vector<std::complex<double>> b(a.size());
        // Row-major (nx, ny) with y fastest matches our field layout.
        fftw_plan plan = fftw_plan_dft_2d(nx, ny, reinterpret_cast<fftw_complex *>(a.data()),
                                          reinterpret_cast<fftw_complex *>(b.data()), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan)
            throw Error("fft: failed to create FFTW plan");
        plans_.emplace(key, plan);
        return plan;
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

// Unnormalized forward DFT (exp(-2*pi*j f x) kernel).
inline void forward(int nx, int ny, const std::complex<double> *in, std::complex<double> *out) {
    PlanCache::instance().transform(nx, ny, FFTW_FORWARD, in, out);
}

// Unnormalized inverse DFT; caller divides by nx*ny.
inline void inverse(int nx, int ny, const std::complex<double> *in, std::complex<double> *out) {
    PlanCache::instance().transform(nx, ny, FFTW_BACKWARD, in, out);
}

// Frequency of FFT bin i on an n-point grid with sample pitch (cycles/m).
// Bins above n/2 alias to negative frequencies.
inline double bin_frequency(int i, int n, double pitch) {
    int k = (i <= n / 2) ? i : i - n;
    return k / (n * pitch);
}

} // namespace fft
} // namespace hoesim
