#pragma once

#include "roughwave/model.hpp"

namespace roughwave {

// || (1+t)^{time_power} |xi|^{-freq_power} e^{-c |xi|^{2 high - 2 damping} t} ||_{L^time_exponent_t L^freq_exponent_xi}
// over 0 < |xi| <= 1 (radial measure) and 0 <= t <= horizon.
struct DecayIntegrand {
    ModelParams params;
    double time_power = 0.0;
    double freq_power = 0.0;
    double freq_exponent = 2.0;  // >= 1
    double time_exponent = 1.0;  // >= 1, may be infinite
    double decay_constant = 1.0;
};

// Space-side integrability: dim - freq_power * freq_exponent > 0.
[[nodiscard]] bool frequency_condition(const DecayIntegrand& f);
// Time-side integrability: (time_power - q / (b freq_exponent)) time_exponent < -1, q the space margin
// and b = 2 high - 2 damping.
[[nodiscard]] bool time_condition(const DecayIntegrand& f);

// Mixed norm truncated to t <= horizon and |xi| >= inner_radius (0 allowed when the
// space condition holds; throws std::domain_error otherwise).
[[nodiscard]] double decay_quadrature(const DecayIntegrand& f, double horizon, double inner_radius = 0.0);

}  // namespace roughwave
