#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "roughwave/field_io.hpp"
#include "roughwave/random_fields.hpp"
#include "roughwave/spectral_field.hpp"

using namespace roughwave;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SpectralField gaussian(const GridSpec& g, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> n;
    std::vector<cplx> c(g.size());
    for (auto& v : c) v = {n(rng), n(rng)};
    return SpectralField(g, c);
}

// u(x_j) = h sum_m c_m exp(i 2 pi m.j / N), summed directly.
std::vector<cplx> direct_synthesis(const SpectralField& f) {
    const GridSpec& g = f.grid();
    const int n = g.points_per_axis();
    std::vector<cplx> out(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        const LatticeIndex x = lattice_index(g, j);
        cplx acc{};
        for (std::size_t i = 0; i < g.size(); ++i) {
            const LatticeIndex m = lattice_index(g, i);
            double phase = 0.0;
            for (int d = 0; d < g.dim; ++d) {
                const int xj = ((x[d] % n) + n) % n;
                phase += 2.0 * std::numbers::pi * m[d] * xj / n;
            }
            acc += f.data()[i] * std::polar(1.0, phase);
        }
        out[j] = g.cell_volume() * acc;
    }
    return out;
}

}  // namespace

TEST_CASE("physical samples match direct synthesis", "[spectral]") {
    for (const GridSpec g : {GridSpec{1, 4, 8}, GridSpec{2, 2, 4}}) {
        const SpectralField f = gaussian(g, 3);
        const auto fast = to_physical(f);
        const auto slow = direct_synthesis(f);
        // Sample order of to_physical follows the same storage convention as lattice_index.
        double worst = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(fast[j] - slow[j]));
        CHECK(worst < 1e-11);
    }
}

TEST_CASE("round trip through physical space", "[spectral]") {
    const GridSpec g{2, 4, 4};
    const SpectralField f = gaussian(g, 11);
    const SpectralField back = from_physical(g, to_physical(f));
    CHECK((back - f).max_abs() < 1e-12 * f.max_abs());
}

TEST_CASE("Parseval with the (2 pi)^n box factor", "[spectral]") {
    for (const GridSpec g : {GridSpec{1, 8, 16}, GridSpec{2, 4, 4}}) {
        const SpectralField f = gaussian(g, 5);
        const double phys = physical_l2_norm(g, to_physical(f));
        CHECK_THAT(phys, WithinRel(std::pow(2.0 * std::numbers::pi, g.dim / 2.0) * f.l2_norm(), 1e-12));
    }
}

TEST_CASE("square matches direct lattice convolution", "[spectral]") {
    const GridSpec g{1, 4, 16};
    Rng rng(9);
    const SpectralField f = random_octant_field(g, {make_cube({1}), make_cube({2})}, 1.0, rng);
    const SpectralField sq = pointwise_power(f, 2);
    const double h = g.cell_volume();
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const LatticeIndex m = lattice_index(g, i);
        cplx acc{};
        for (std::size_t a = 0; a < g.size(); ++a) {
            const LatticeIndex ma = lattice_index(g, a);
            std::size_t b = 0;
            if (flat_index(g, {m[0] - ma[0], 0, 0}, b)) acc += f.data()[a] * f.data()[b];
        }
        worst = std::max(worst, std::abs(sq.data()[i] - h * acc));
    }
    CHECK(worst < 1e-12 * std::max(1.0, sq.max_abs()));
}

TEST_CASE("cube constant and octant mask", "[spectral]") {
    const GridSpec g{2, 2, 8};
    const SpectralField f = cube_constant(g, make_cube({1, 2}), 2.0);
    std::size_t nonzero = 0;
    for (const auto& c : f.data()) nonzero += c != cplx{} ? 1 : 0;
    CHECK(nonzero == 4);
    CHECK_THAT(f.l2_norm(), WithinRel(2.0, 1e-15));  // sqrt(h * 4 * 4) with h = 1/4

    const SpectralField all = gaussian(g, 1);
    const SpectralField masked = octant_mask(all, 1.5);
    CHECK(octant_leakage(masked, 1.5) == 0.0);
    CHECK(octant_leakage(all, 1.5) > 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const LatticeIndex m = lattice_index(g, i);
        const double x = frequency(g, m[0]);
        const double y = frequency(g, m[1]);
        const bool keep = x >= 0 && y >= 0 && std::max(x, y) >= 1.5;
        CHECK((masked.data()[i] == all.data()[i]) == (keep || all.data()[i] == cplx{}));
        if (!keep) CHECK(masked.data()[i] == cplx{});
    }
}

TEST_CASE("regrid grows exactly and shrinks by truncation", "[spectral]") {
    const GridSpec small{1, 4, 4};
    const GridSpec big{1, 4, 16};
    const SpectralField f = gaussian(small, 2);
    const SpectralField back = regrid(regrid(f, big), small);
    CHECK((back - f).max_abs() == 0.0);
}

TEST_CASE("field serialization round trips", "[spectral][io]") {
    const GridSpec g{2, 2, 4};
    const SpectralField f = octant_mask(gaussian(g, 4), 1.0);
    std::stringstream csv;
    write_field_csv(csv, f);
    CHECK((read_field_csv(csv) - f).max_abs() == 0.0);
    std::stringstream bin;
    write_field_binary(bin, f);
    const SpectralField b = read_field_binary(bin);
    CHECK(b.grid() == g);
    CHECK((b - f).max_abs() == 0.0);

    std::stringstream broken("not a field\n");
    CHECK_THROWS(read_field_csv(broken));
}

TEST_CASE("grid validation", "[spectral]") {
    CHECK_THROWS(GridSpec{4, 2, 4}.validate());
    CHECK_THROWS(GridSpec{1, 0, 4}.validate());
    CHECK_NOTHROW(GridSpec{3, 1, 4}.validate());
    CHECK(GridSpec{2, 4, 8}.size() == 32u * 32u);
}
