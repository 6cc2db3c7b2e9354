#pragma once

#include <complex>
#include <string>
#include <vector>

#include "roughwave/model.hpp"

namespace roughwave {

// Coefficients of the scaled mode equation  v'' + damping v' + stiffness v = 0.
struct ModeCoefficients {
    double damping = 0.0;
    double stiffness = 0.0;
};

// Roots of mu^2 + damping mu + stiffness = 0; `slow` has the larger real part
// (ties broken towards nonnegative imaginary part).
struct CharacteristicRoots {
    std::complex<double> slow;
    std::complex<double> fast;
};

// Propagator entries: `pos` and `vel` solve the mode equation with initial data
// (1, 0) and (0, 1); `dpos`, `dvel` are their time derivatives.
struct KernelValue {
    std::complex<double> pos;
    std::complex<double> vel;
    std::complex<double> dpos;
    std::complex<double> dvel;
};

enum class KernelPart { pos, vel, dpos, dvel };

[[nodiscard]] const char* kernel_part_name(KernelPart part);
[[nodiscard]] KernelPart parse_kernel_part(const std::string& name);

[[nodiscard]] ModeCoefficients mode_coefficients(const ModelParams& params, double scale, double r);
[[nodiscard]] CharacteristicRoots characteristic_roots(const ModelParams& params, double scale, double r);
[[nodiscard]] CharacteristicRoots roots_of(const ModeCoefficients& mc);

[[nodiscard]] KernelValue kernel_eval(const ModelParams& params, double scale, double r, double t);
[[nodiscard]] KernelValue kernel_from_roots(const CharacteristicRoots& roots, const ModeCoefficients& mc, double t);

// phi_1(z) = (e^z - 1) / z, evaluated without cancellation near 0.
[[nodiscard]] std::complex<double> phi1(std::complex<double> z);

// Majorant exponents for the pointwise bounds at r >= scaled support floor:
//   |d^j pos| <= C scale^{(2 delta - sigma) j} r^{(2 sigma - high) j} e^{-c scale^{2 delta - low} r^{2 low - 2 delta} t}
//   |d^j vel| <= C scale^{(low - high)(j-1)} r^{high (j-1)} e^{-c (same) t}
struct Majorant {
    double scale_power = 0.0;
    double r_power = 0.0;
    double rate = 0.0;  // coefficient of t in the exponent, without c
};

[[nodiscard]] Majorant pointwise_majorant(const ModelParams& params, double scale, double r, KernelPart part);

// |kernel| / majorant; throws PreconditionError when r is below the support floor.
[[nodiscard]] double pointwise_bound_ratio(const ModelParams& params, double scale, double r, double t,
                                           KernelPart part, double decay_constant);

enum class LowFrequencyMajorant { inverse_power, time, minimum };

// Low-frequency bounds at unit scale for r <= cutoff:
//   |pos| <= C e^{-c r^{2 high - 2 delta} t},  |vel| <= C min{r^{-low}, t} e^{-c r^{2 high - 2 delta} t}.
[[nodiscard]] double low_frequency_bound_ratio(const ModelParams& params, double r, double t, KernelPart part,
                                               double decay_constant, double cutoff,
                                               LowFrequencyMajorant variant = LowFrequencyMajorant::minimum);

}  // namespace roughwave
