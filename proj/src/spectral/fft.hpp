#pragma once

#include <complex>
#include <span>

namespace roughwave::detail {

// In-place unnormalized multidimensional DFT backed by cached FFTW plans.
// sign = -1 is forward (exp(-i...)), +1 is backward.
void fft_inplace(std::span<std::complex<double>> data, int dim, int points_per_axis, int sign);

}  // namespace roughwave::detail
