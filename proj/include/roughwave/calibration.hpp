#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "roughwave/propagator.hpp"
#include "roughwave/random_fields.hpp"

namespace roughwave {

// ||u0||_{E^{radius}_{s + high}} + ||u1||_{E^{radius}_s}.
[[nodiscard]] double data_norm(const ModelParams& params, const SpectralField& u0, const SpectralField& u1,
                               double radius, double smoothness);

struct CalibrationSetup {
    ModelParams params;
    double scale = 1.0;
    GridSpec grid;
    std::vector<double> times;
    double radius = -1.0;
    double smoothness = 0.0;
    double invariant_floor = kDefaultInvariantFloor;
    std::vector<CubeIndex> cubes;  // support of the random samples
    int samples = 8;
    std::uint64_t seed = 7;
    // Data shapes always included in the sweep (position, velocity).
    std::vector<std::pair<SpectralField, SpectralField>> shapes;
};

// Sup over the sweep of ||linear evolution||_B / data_norm.
[[nodiscard]] double fit_linear_constant(const CalibrationSetup& setup);

struct ContractionConstants {
    double product = 0.0;    // sup ||Duhamel[u^p]||_B / (scale^e ||u||_B^p)
    double lipschitz = 0.0;  // sup ||Duhamel[u^p - v^p]||_B / (scale^e ||u - v||_B (||u||_B^{p-1} + ||v||_B^{p-1}))
};

// Sweeps linear evolutions of random octant data (and the given shapes).
[[nodiscard]] ContractionConstants fit_contraction_constants(const CalibrationSetup& setup);

}  // namespace roughwave
