#pragma once

#include <complex>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "roughwave/grid.hpp"

namespace roughwave {

using cplx = std::complex<double>;

// Complex field stored by Fourier coefficients on a GridSpec lattice.
//
// Coefficients are samples of a Fourier density: the physical function is
// u(x) = sum_xi h^n * c(xi) * exp(i xi.x) with h the lattice spacing. The
// spectral L2 norm is (h^n sum |c|^2)^(1/2), so a cube filled with ones has unit mass.
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(GridSpec grid);
    SpectralField(GridSpec grid, std::vector<cplx> coeffs);

    [[nodiscard]] const GridSpec& grid() const { return grid_; }
    [[nodiscard]] std::span<const cplx> coeffs() const { return coeffs_; }
    [[nodiscard]] const std::vector<cplx>& data() const { return coeffs_; }
    [[nodiscard]] std::size_t size() const { return coeffs_.size(); }
    [[nodiscard]] cplx at(const LatticeIndex& m) const;

    // Set by octant_mask; records the support floor the field was masked to.
    [[nodiscard]] std::optional<double> octant_floor() const { return octant_floor_; }
    [[nodiscard]] SpectralField with_octant_floor(double floor) const;

    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] double l2_norm() const;
    [[nodiscard]] double max_abs() const;

    friend SpectralField operator+(const SpectralField& a, const SpectralField& b);
    friend SpectralField operator-(const SpectralField& a, const SpectralField& b);
    friend SpectralField operator*(cplx s, const SpectralField& a);

private:
    GridSpec grid_{};
    std::vector<cplx> coeffs_{};
    std::optional<double> octant_floor_{};
};

// Field with a single nonzero coefficient.
[[nodiscard]] SpectralField single_mode(const GridSpec& grid, const LatticeIndex& m, cplx value);
// Field equal to `value` on every lattice point of cube k.
[[nodiscard]] SpectralField cube_constant(const GridSpec& grid, const CubeIndex& k, cplx value);

[[nodiscard]] SpectralField decompose(const SpectralField& f, const CubeIndex& k);
[[nodiscard]] SpectralField octant_mask(const SpectralField& f, double floor);

// Largest |coefficient| outside {xi >= 0 componentwise, |xi|_inf >= floor},
// relative to the largest coefficient overall. Zero for the zero field.
[[nodiscard]] double octant_leakage(const SpectralField& f, double floor);
[[nodiscard]] bool in_admissible_set(const GridSpec& grid, const LatticeIndex& m, double floor);

// Dealiased u^p; `padding` of 0 selects the automatic factor.
[[nodiscard]] SpectralField pointwise_power(const SpectralField& f, int power, int padding = 0);
[[nodiscard]] SpectralField pointwise_product(std::span<const SpectralField> factors, int padding = 0);
[[nodiscard]] int dealias_padding(int degree);

[[nodiscard]] std::set<CubeIndex> support_cubes(const SpectralField& f, double tol);

// Physical samples u(x_j) on the N^n point grid of the period box.
[[nodiscard]] std::vector<cplx> to_physical(const SpectralField& f);
[[nodiscard]] SpectralField from_physical(const GridSpec& grid, std::span<const cplx> samples);
// Integral of |u|^2 over the period box from physical samples.
[[nodiscard]] double physical_l2_norm(const GridSpec& grid, std::span<const cplx> samples);

// Same cell size, different number of cubes. Growing is exact; shrinking drops
// coefficients outside the target lattice.
[[nodiscard]] SpectralField regrid(const SpectralField& f, const GridSpec& target);

// Norm fraction held by the outer 10% (in |m|_inf) of the lattice.
[[nodiscard]] double outer_shell_fraction(const SpectralField& f);

}  // namespace roughwave
