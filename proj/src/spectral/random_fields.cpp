#include "roughwave/random_fields.hpp"

#include <algorithm>
#include <stdexcept>

namespace roughwave {

SpectralField random_field(const GridSpec& grid, const std::vector<CubeIndex>& cubes, Rng& rng) {
    grid.validate();
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> c(grid.size());
    const int M = grid.cells_per_cube;
    for (const auto& k : cubes) {
        if (!cube_in_range(grid, k)) throw std::out_of_range("cube " + k.str() + " outside the grid");
        const int cells = grid.dim == 1 ? M : (grid.dim == 2 ? M * M : M * M * M);
        for (int q = 0; q < cells; ++q) {
            LatticeIndex m{0, 0, 0};
            int rest = q;
            for (int d = grid.dim - 1; d >= 0; --d) {
                m[d] = k.k[d] * M + rest % M;
                rest /= M;
            }
            std::size_t flat = 0;
            if (!flat_index(grid, m, flat)) continue;
            const double re = gauss(rng);
            const double im = gauss(rng);
            c[flat] = cplx(re, im);
        }
    }
    return SpectralField(grid, std::move(c));
}

SpectralField random_octant_field(const GridSpec& grid, const std::vector<CubeIndex>& cubes, double floor,
                                  Rng& rng) {
    return octant_mask(random_field(grid, cubes, rng), floor);
}

std::vector<CubeIndex> octant_cubes(const GridSpec& grid, int lo, int hi) {
    std::vector<CubeIndex> out;
    for (std::size_t s = 0; s < grid.cube_count(); ++s) {
        const CubeIndex k = cube_from_slot(grid, s);
        bool inside = true;
        int top = 0;
        for (int d = 0; d < grid.dim; ++d) {
            if (k.k[d] < 0 || k.k[d] > hi) inside = false;
            top = std::max(top, k.k[d]);
        }
        if (inside && top >= lo) out.push_back(k);
    }
    return out;
}

CubeIndex random_cube(const GridSpec& grid, int lo, int hi, Rng& rng) {
    if (lo > hi) throw std::invalid_argument("empty cube range");
    std::uniform_int_distribution<int> pick(lo, hi);
    CubeIndex k;
    k.dim = grid.dim;
    for (int d = 0; d < grid.dim; ++d) k.k[d] = pick(rng);
    if (!cube_in_range(grid, k)) throw std::out_of_range("cube range exceeds the grid");
    return k;
}

}  // namespace roughwave
