#pragma once

#include <string>

namespace roughwave {

// Exponents of  u_tt + (-Lap)^diffusion u + (-Lap)^damping u_t = u^power  in `dim` space dimensions.
struct ModelParams {
    double diffusion_order = 1.0;
    double damping_order = 0.0;
    int power = 2;
    int dim = 1;

    // Throws std::domain_error / std::invalid_argument.
    void validate() const;
    [[nodiscard]] std::string describe() const;
};

enum class Regime { effective, scale_invariant, non_effective };

[[nodiscard]] const char* regime_name(Regime r);
// Accepts the names produced by regime_name; throws std::invalid_argument otherwise.
[[nodiscard]] Regime parse_regime(const std::string& name);

struct DerivedExponents {
    double low_order = 0.0;   // min{2*damping, diffusion}
    double high_order = 0.0;  // max{2*damping, diffusion}
    Regime regime = Regime::effective;
    double support_floor = 0.0;        // frequency floor at unit scale
    double critical_smoothness = 0.0;  // smallest admissible smoothness index
};

constexpr double kDefaultInvariantFloor = 0.25;

[[nodiscard]] DerivedExponents derived_exponents(const ModelParams& params,
                                                 double invariant_floor = kDefaultInvariantFloor);
[[nodiscard]] Regime classify(const ModelParams& params);

// Support floor for the problem rescaled by `scale`.
[[nodiscard]] double scaled_support_floor(const ModelParams& params, const DerivedExponents& dx, double scale);

// Default exponential rate used in the pointwise kernel majorants:
// a quarter of the smallest regime coefficient, capped at 1/4.
[[nodiscard]] double default_decay_constant(const ModelParams& params);

// Default threshold under which low-frequency kernel majorants are checked.
[[nodiscard]] double default_low_frequency_cutoff(const ModelParams& params);

}  // namespace roughwave
