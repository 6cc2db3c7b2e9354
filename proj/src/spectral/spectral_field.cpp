#include "roughwave/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fft.hpp"
#include "roughwave/errors.hpp"

namespace roughwave {

namespace {

constexpr double kFloorSlack = 1e-12;
constexpr double kShellFraction = 0.1;

void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

SpectralField::SpectralField(GridSpec grid) : grid_(grid) {
    grid_.validate();
    coeffs_.assign(grid_.size(), cplx{0.0, 0.0});
}

SpectralField::SpectralField(GridSpec grid, std::vector<cplx> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    grid_.validate();
    if (coeffs_.size() != grid_.size()) throw std::invalid_argument("coefficient count does not match grid");
}

cplx SpectralField::at(const LatticeIndex& m) const {
    std::size_t flat = 0;
    if (!flat_index(grid_, m, flat)) throw std::out_of_range("lattice index outside grid");
    return coeffs_[flat];
}

SpectralField SpectralField::with_octant_floor(double floor) const {
    SpectralField out = *this;
    out.octant_floor_ = floor;
    return out;
}

bool SpectralField::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const cplx& c) { return c == cplx{}; });
}

double SpectralField::l2_norm() const {
    double acc = 0.0;
    for (const auto& c : coeffs_) acc += std::norm(c);
    return std::sqrt(acc * grid_.cell_volume());
}

double SpectralField::max_abs() const {
    double v = 0.0;
    for (const auto& c : coeffs_) v = std::max(v, std::abs(c));
    return v;
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    std::vector<cplx> out(a.coeffs_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.coeffs_[i];
    return SpectralField(a.grid_, std::move(out));
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    std::vector<cplx> out(a.coeffs_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.coeffs_[i];
    return SpectralField(a.grid_, std::move(out));
}

SpectralField operator*(cplx s, const SpectralField& a) {
    std::vector<cplx> out(a.coeffs_);
    for (auto& c : out) c *= s;
    SpectralField f(a.grid_, std::move(out));
    f.octant_floor_ = a.octant_floor_;
    return f;
}

SpectralField single_mode(const GridSpec& grid, const LatticeIndex& m, cplx value) {
    std::vector<cplx> c(grid.size());
    std::size_t flat = 0;
    if (!flat_index(grid, m, flat)) throw std::out_of_range("lattice index outside grid");
    c[flat] = value;
    return SpectralField(grid, std::move(c));
}

SpectralField cube_constant(const GridSpec& grid, const CubeIndex& k, cplx value) {
    if (!cube_in_range(grid, k)) throw std::out_of_range("cube index outside grid");
    std::vector<cplx> c(grid.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (cube_of(grid, lattice_index(grid, i)) == k) c[i] = value;
    }
    return SpectralField(grid, std::move(c));
}

SpectralField decompose(const SpectralField& f, const CubeIndex& k) {
    const GridSpec& g = f.grid();
    if (!cube_in_range(g, k)) throw std::out_of_range("cube index " + k.str() + " outside grid");
    std::vector<cplx> c(g.size());
    const auto src = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (src[i] != cplx{} && cube_of(g, lattice_index(g, i)) == k) c[i] = src[i];
    }
    return SpectralField(g, std::move(c));
}

bool in_admissible_set(const GridSpec& grid, const LatticeIndex& m, double floor) {
    for (int d = 0; d < grid.dim; ++d) {
        if (m[d] < 0) return false;
    }
    return frequency_max_norm(grid, m) >= floor - kFloorSlack;
}

SpectralField octant_mask(const SpectralField& f, double floor) {
    if (floor < 0.0) throw std::invalid_argument("octant floor must be nonnegative");
    const GridSpec& g = f.grid();
    std::vector<cplx> c(f.data());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] != cplx{} && !in_admissible_set(g, lattice_index(g, i), floor)) c[i] = cplx{};
    }
    return SpectralField(g, std::move(c)).with_octant_floor(floor);
}

double octant_leakage(const SpectralField& f, double floor) {
    const GridSpec& g = f.grid();
    double outside = 0.0;
    double overall = 0.0;
    const auto c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double a = std::abs(c[i]);
        if (a == 0.0) continue;
        overall = std::max(overall, a);
        if (!in_admissible_set(g, lattice_index(g, i), floor)) outside = std::max(outside, a);
    }
    return overall > 0.0 ? outside / overall : 0.0;
}

int dealias_padding(int degree) {
    if (degree < 1) throw std::invalid_argument("product degree must be positive");
    // Smallest power of two P with P >= (degree + 1) / 2.
    int p = 1;
    while (2 * p < degree + 1) p *= 2;
    return p;
}

std::vector<cplx> to_physical(const SpectralField& f) {
    const GridSpec& g = f.grid();
    std::vector<cplx> buf(f.data());
    const double h = g.cell_volume();
    for (auto& c : buf) c *= h;
    detail::fft_inplace(buf, g.dim, g.points_per_axis(), +1);
    return buf;
}

SpectralField from_physical(const GridSpec& grid, std::span<const cplx> samples) {
    grid.validate();
    if (samples.size() != grid.size()) throw std::invalid_argument("sample count does not match grid");
    std::vector<cplx> buf(samples.begin(), samples.end());
    detail::fft_inplace(buf, grid.dim, grid.points_per_axis(), -1);
    const double scale = 1.0 / (static_cast<double>(grid.size()) * grid.cell_volume());
    for (auto& c : buf) c *= scale;
    return SpectralField(grid, std::move(buf));
}

double physical_l2_norm(const GridSpec& grid, std::span<const cplx> samples) {
    double acc = 0.0;
    for (const auto& v : samples) acc += std::norm(v);
    const double cell = std::pow(grid.box_period() / grid.points_per_axis(), grid.dim);
    return std::sqrt(acc * cell);
}

SpectralField regrid(const SpectralField& f, const GridSpec& target) {
    target.validate();
    const GridSpec& g = f.grid();
    if (g.dim != target.dim || g.cells_per_cube != target.cells_per_cube) {
        throw std::invalid_argument("regrid requires equal dimension and cells_per_cube");
    }
    std::vector<cplx> c(target.size());
    const auto src = f.coeffs();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] == cplx{}) continue;
        std::size_t flat = 0;
        if (flat_index(target, lattice_index(g, i), flat)) c[flat] = src[i];
    }
    SpectralField out(target, std::move(c));
    if (f.octant_floor()) out = out.with_octant_floor(*f.octant_floor());
    return out;
}

SpectralField pointwise_product(std::span<const SpectralField> factors, int padding) {
    if (factors.empty()) throw std::invalid_argument("product needs at least one factor");
    const GridSpec& g = factors.front().grid();
    for (const auto& f : factors) {
        if (!(f.grid() == g)) throw std::invalid_argument("product factors live on different grids");
    }
    const int degree = static_cast<int>(factors.size());
    const int needed = dealias_padding(degree);
    if (padding == 0) padding = needed;
    // Aliases of the product land at |m| >= P*N - degree*N/2; they stay outside the
    // kept range only if P >= (degree + 1) / 2.
    if (2 * padding < degree + 1) {
        throw AliasingError("padding factor " + std::to_string(padding) + " too small for a degree-" +
                            std::to_string(degree) + " product");
    }
    GridSpec padded = g;
    padded.cubes_per_axis = g.cubes_per_axis * padding;

    std::vector<cplx> acc;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        std::vector<cplx> samples = to_physical(regrid(factors[j], padded));
        if (j == 0) {
            acc = std::move(samples);
        } else {
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= samples[i];
        }
    }
    for (const auto& v : acc) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw std::overflow_error("pointwise product overflowed the double range");
        }
    }
    return regrid(from_physical(padded, acc), g);
}

SpectralField pointwise_power(const SpectralField& f, int power, int padding) {
    if (power < 1) throw std::invalid_argument("power must be positive");
    const GridSpec& g = f.grid();
    const int needed = dealias_padding(power);
    if (padding == 0) padding = needed;
    if (2 * padding < power + 1) {
        throw AliasingError("padding factor " + std::to_string(padding) + " too small for power " +
                            std::to_string(power));
    }
    if (f.is_zero()) return SpectralField(g);
    GridSpec padded = g;
    padded.cubes_per_axis = g.cubes_per_axis * padding;
    std::vector<cplx> samples = to_physical(regrid(f, padded));
    for (auto& v : samples) {
        cplx r = v;
        for (int k = 1; k < power; ++k) r *= v;
        if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) {
            throw std::overflow_error("pointwise power overflowed the double range");
        }
        v = r;
    }
    return regrid(from_physical(padded, samples), g);
}

std::set<CubeIndex> support_cubes(const SpectralField& f, double tol) {
    if (tol < 0.0) throw std::invalid_argument("tolerance must be nonnegative");
    std::set<CubeIndex> out;
    const GridSpec& g = f.grid();
    std::vector<double> mass(g.cube_count(), 0.0);
    const auto c = f.coeffs();
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double a = std::norm(c[i]);
        if (a == 0.0) continue;
        mass[cube_slot(g, cube_of(g, lattice_index(g, i)))] += a;
        total += a;
    }
    if (total == 0.0) return out;
    const double threshold = tol * tol * total;
    for (std::size_t s = 0; s < mass.size(); ++s) {
        if (mass[s] > threshold) out.insert(cube_from_slot(g, s));
    }
    return out;
}

double outer_shell_fraction(const SpectralField& f) {
    const GridSpec& g = f.grid();
    const int half = g.points_per_axis() / 2;
    const int edge = static_cast<int>(std::ceil((1.0 - kShellFraction) * half));
    double shell = 0.0;
    double total = 0.0;
    const auto c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double a = std::norm(c[i]);
        if (a == 0.0) continue;
        total += a;
        const LatticeIndex m = lattice_index(g, i);
        int mx = 0;
        for (int d = 0; d < g.dim; ++d) mx = std::max(mx, std::abs(m[d]));
        if (mx >= edge) shell += a;
    }
    return total > 0.0 ? std::sqrt(shell / total) : 0.0;
}

}  // namespace roughwave
