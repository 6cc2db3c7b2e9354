#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <string>

namespace roughwave {

using LatticeIndex = std::array<int, 3>;

// Frequency lattice {m / M : -N/2 <= m < N/2}^n with N = M * K.
// The matching physical box has period 2*pi*M.
struct GridSpec {
    int dim = 1;
    int cells_per_cube = 8;
    int cubes_per_axis = 32;

    [[nodiscard]] int points_per_axis() const { return cells_per_cube * cubes_per_axis; }
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] double spacing() const { return 1.0 / cells_per_cube; }
    [[nodiscard]] double cell_volume() const;
    [[nodiscard]] double box_period() const;
    [[nodiscard]] std::size_t cube_count() const;

    // Throws std::invalid_argument on a malformed grid.
    void validate() const;

    [[nodiscard]] std::string describe() const;

    bool operator==(const GridSpec&) const = default;
};

struct CubeIndex {
    LatticeIndex k{0, 0, 0};
    int dim = 1;

    [[nodiscard]] double norm() const;
    [[nodiscard]] int max_abs() const;
    [[nodiscard]] std::string str() const;

    auto operator<=>(const CubeIndex&) const = default;
};

[[nodiscard]] CubeIndex make_cube(std::initializer_list<int> k);

// Storage is FFT order per axis, row-major with axis 0 slowest.
[[nodiscard]] LatticeIndex lattice_index(const GridSpec& grid, std::size_t flat);
// Returns false when m lies outside the lattice.
[[nodiscard]] bool flat_index(const GridSpec& grid, const LatticeIndex& m, std::size_t& flat);
[[nodiscard]] int floor_div(int a, int b);
[[nodiscard]] CubeIndex cube_of(const GridSpec& grid, const LatticeIndex& m);
[[nodiscard]] bool cube_in_range(const GridSpec& grid, const CubeIndex& k);
[[nodiscard]] std::size_t cube_slot(const GridSpec& grid, const CubeIndex& k);
[[nodiscard]] CubeIndex cube_from_slot(const GridSpec& grid, std::size_t slot);

// Frequency value of lattice coordinate m along one axis.
[[nodiscard]] inline double frequency(const GridSpec& grid, int m) {
    return static_cast<double>(m) / grid.cells_per_cube;
}

[[nodiscard]] double frequency_norm(const GridSpec& grid, const LatticeIndex& m);
[[nodiscard]] double frequency_max_norm(const GridSpec& grid, const LatticeIndex& m);

[[nodiscard]] bool is_power_of_two(long long v);
[[nodiscard]] int next_power_of_two(long long v);

}  // namespace roughwave
