#pragma once

#include <complex>
#include <vector>

#include "roughwave/model.hpp"

namespace roughwave {

enum class InitialData { position, velocity };

struct OracleState {
    std::complex<double> value;
    std::complex<double> rate;
};

struct OracleOptions {
    double rel_tol = 1e-12;  // per-step error in the energy norm, relative to the state size
    int max_steps = 50'000'000;
};

// Integrates v'' + damping v' + stiffness v = 0 with an adaptive Dormand-Prince 5(4)
// scheme. Error is measured in the energy norm max(sqrt(stiffness)|v|, |v'|).
// Throws OracleFailure on step-size underflow or step budget exhaustion.
[[nodiscard]] std::complex<double> ode_oracle(const ModelParams& params, double scale, double r, double t,
                                              InitialData ic, const OracleOptions& opts = {});

// Values at every entry of `times` (nondecreasing) from a single integration pass.
[[nodiscard]] std::vector<OracleState> ode_oracle_trajectory(const ModelParams& params, double scale, double r,
                                                             const std::vector<double>& times, InitialData ic,
                                                             const OracleOptions& opts = {});

}  // namespace roughwave
