#include "roughwave/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace roughwave {

std::size_t GridSpec::size() const {
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(points_per_axis());
    return total;
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

double GridSpec::box_period() const { return 2.0 * std::numbers::pi * cells_per_cube; }

std::size_t GridSpec::cube_count() const {
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(cubes_per_axis);
    return total;
}

void GridSpec::validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
    if (cells_per_cube < 1) throw std::invalid_argument("cells_per_cube must be positive");
    if (cubes_per_axis < 2 || cubes_per_axis % 2 != 0) {
        throw std::invalid_argument("cubes_per_axis must be an even integer >= 2");
    }
    if (!is_power_of_two(points_per_axis())) {
        throw std::invalid_argument("points per axis (cells_per_cube * cubes_per_axis) must be a power of two");
    }
}

std::string GridSpec::describe() const {
    std::ostringstream os;
    os << "n=" << dim << " M=" << cells_per_cube << " K=" << cubes_per_axis;
    return os.str();
}

double CubeIndex::norm() const {
    double acc = 0.0;
    for (int d = 0; d < dim; ++d) acc += static_cast<double>(k[d]) * k[d];
    return std::sqrt(acc);
}

int CubeIndex::max_abs() const {
    int v = 0;
    for (int d = 0; d < dim; ++d) v = std::max(v, std::abs(k[d]));
    return v;
}

std::string CubeIndex::str() const {
    std::ostringstream os;
    os << '(';
    for (int d = 0; d < dim; ++d) os << (d ? "," : "") << k[d];
    os << ')';
    return os.str();
}

CubeIndex make_cube(std::initializer_list<int> k) {
    if (k.size() < 1 || k.size() > 3) throw std::invalid_argument("cube index must have 1..3 entries");
    CubeIndex c;
    c.dim = static_cast<int>(k.size());
    int d = 0;
    for (int v : k) c.k[d++] = v;
    return c;
}

LatticeIndex lattice_index(const GridSpec& grid, std::size_t flat) {
    const int n_axis = grid.points_per_axis();
    LatticeIndex m{0, 0, 0};
    for (int d = grid.dim - 1; d >= 0; --d) {
        const int i = static_cast<int>(flat % n_axis);
        flat /= n_axis;
        m[d] = i < n_axis / 2 ? i : i - n_axis;
    }
    return m;
}

bool flat_index(const GridSpec& grid, const LatticeIndex& m, std::size_t& flat) {
    const int n_axis = grid.points_per_axis();
    std::size_t out = 0;
    for (int d = 0; d < grid.dim; ++d) {
        if (m[d] < -n_axis / 2 || m[d] >= n_axis / 2) return false;
        const int i = m[d] >= 0 ? m[d] : m[d] + n_axis;
        out = out * n_axis + static_cast<std::size_t>(i);
    }
    flat = out;
    return true;
}

int floor_div(int a, int b) {
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

CubeIndex cube_of(const GridSpec& grid, const LatticeIndex& m) {
    CubeIndex c;
    c.dim = grid.dim;
    for (int d = 0; d < grid.dim; ++d) c.k[d] = floor_div(m[d], grid.cells_per_cube);
    return c;
}

bool cube_in_range(const GridSpec& grid, const CubeIndex& k) {
    if (k.dim != grid.dim) return false;
    for (int d = 0; d < grid.dim; ++d) {
        if (k.k[d] < -grid.cubes_per_axis / 2 || k.k[d] >= grid.cubes_per_axis / 2) return false;
    }
    return true;
}

std::size_t cube_slot(const GridSpec& grid, const CubeIndex& k) {
    std::size_t slot = 0;
    for (int d = 0; d < grid.dim; ++d) {
        slot = slot * grid.cubes_per_axis + static_cast<std::size_t>(k.k[d] + grid.cubes_per_axis / 2);
    }
    return slot;
}

CubeIndex cube_from_slot(const GridSpec& grid, std::size_t slot) {
    CubeIndex c;
    c.dim = grid.dim;
    for (int d = grid.dim - 1; d >= 0; --d) {
        c.k[d] = static_cast<int>(slot % grid.cubes_per_axis) - grid.cubes_per_axis / 2;
        slot /= grid.cubes_per_axis;
    }
    return c;
}

double frequency_norm(const GridSpec& grid, const LatticeIndex& m) {
    double acc = 0.0;
    for (int d = 0; d < grid.dim; ++d) {
        const double x = frequency(grid, m[d]);
        acc += x * x;
    }
    return std::sqrt(acc);
}

double frequency_max_norm(const GridSpec& grid, const LatticeIndex& m) {
    double v = 0.0;
    for (int d = 0; d < grid.dim; ++d) v = std::max(v, std::abs(frequency(grid, m[d])));
    return v;
}

bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

int next_power_of_two(long long v) {
    long long p = 1;
    while (p < v) p <<= 1;
    return static_cast<int>(p);
}

}  // namespace roughwave
