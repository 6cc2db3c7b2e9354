#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "roughwave/spectral_field.hpp"

namespace roughwave {

using Rng = std::mt19937_64;

// I.i.d. standard complex Gaussian coefficients on every lattice point of the given cubes.
[[nodiscard]] SpectralField random_field(const GridSpec& grid, const std::vector<CubeIndex>& cubes, Rng& rng);

// Same, then masked to the octant above `floor`.
[[nodiscard]] SpectralField random_octant_field(const GridSpec& grid, const std::vector<CubeIndex>& cubes,
                                                double floor, Rng& rng);

// Cubes k with 0 <= k_j <= hi for all j and max_j k_j >= lo, in slot order.
[[nodiscard]] std::vector<CubeIndex> octant_cubes(const GridSpec& grid, int lo, int hi);

// Cube with every component drawn uniformly from [lo, hi].
[[nodiscard]] CubeIndex random_cube(const GridSpec& grid, int lo, int hi, Rng& rng);

}  // namespace roughwave
