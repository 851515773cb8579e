#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace rbfmol {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// In-place unnormalised n-d complex DFT; sign -1 is forward, +1 backward. Row-major layout.
inline void fft_inplace(std::vector<std::complex<double>>& data, const std::vector<int>& shape, int sign) {
    long total = 1;
    for (int s : shape) total *= s;
    if (total != (long)data.size()) throw std::invalid_argument("fft_inplace: shape does not match data size");
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), ptr, ptr,
                             sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft_inplace: planning failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
}

}  // namespace rbfmol
