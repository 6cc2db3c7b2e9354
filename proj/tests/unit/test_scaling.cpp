#include <catch_amalgamated.hpp>

#include <cmath>

#include "roughwave/errors.hpp"
#include "roughwave/random_fields.hpp"
#include "roughwave/scaling.hpp"

using namespace roughwave;
using Catch::Matchers::WithinRel;

TEST_CASE("data amplitude exponent", "[scaling]") {
    CHECK(data_scale_exponent({1.0, 0.0, 2, 1}) == 0.0);
    CHECK(data_scale_exponent({2.0, 1.0, 2, 1}) == 4.0);
    CHECK(data_scale_exponent({1.0, 1.0, 3, 1}) == 1.0);
}

TEST_CASE("scaled data move each coefficient to lambda m", "[scaling]") {
    const ModelParams p{2.0, 1.0, 2, 1};  // low order 2: amplitudes lambda^4 and lambda^6
    const GridSpec g{1, 4, 8};
    Rng rng(3);
    const SpectralField u0 = random_octant_field(g, {make_cube({1})}, 0.25, rng);
    const SpectralField u1 = random_octant_field(g, {make_cube({2})}, 0.25, rng);
    const int lam = 3;
    const DataPair s = scale_data(u0, u1, lam, p);
    CHECK(s.position.grid().cubes_per_axis == 32);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const LatticeIndex m = lattice_index(g, i);
        const LatticeIndex to{lam * m[0], 0, 0};
        CHECK(std::abs(s.position.at(to) - 81.0 * u0.data()[i]) <= 1e-12 * std::abs(81.0 * u0.data()[i]));
        CHECK(std::abs(s.velocity.at(to) - 729.0 * u1.data()[i]) <= 1e-12 * std::abs(729.0 * u1.data()[i]));
    }
    // Everything off the sublattice is zero.
    double off = 0.0;
    for (std::size_t i = 0; i < s.position.size(); ++i) {
        if (lattice_index(s.position.grid(), i)[0] % lam != 0) off = std::max(off, std::abs(s.position.data()[i]));
    }
    CHECK(off == 0.0);

    const DataPair back = descale_data(s.position, s.velocity, lam, p, g);
    CHECK((back.position - u0).max_abs() <= 1e-14 * u0.max_abs());
    CHECK((back.velocity - u1).max_abs() <= 1e-14 * u1.max_abs());
}

TEST_CASE("relocated norm equals the norm of the relocated field", "[scaling]") {
    const GridSpec g{2, 2, 4};
    Rng rng(5);
    const SpectralField f = random_octant_field(g, {make_cube({1, 0}), make_cube({1, 1})}, 0.5, rng);
    const GridSpec target = scaled_grid(g, 3);
    const NormSpec spec{-0.5, 1.5};
    CHECK_THAT(relocated_norm(f, 3, 2.0, spec), WithinRel(e_norm(relocate(f, 3, 2.0, target), spec), 1e-13));
}

TEST_CASE("relocation off the target lattice is an error", "[scaling]") {
    const GridSpec g{1, 4, 8};
    const SpectralField f = single_mode(g, {15, 0, 0}, 1.0);
    CHECK_THROWS_AS(relocate(f, 2, 1.0, g), std::overflow_error);
    const SpectralField odd = single_mode(g, {3, 0, 0}, 1.0);
    CHECK_THROWS_AS(unrelocate(odd, 2, 1.0, g), std::logic_error);
}

TEST_CASE("scaled grid is the smallest power of two holding the range", "[scaling]") {
    CHECK(scaled_grid({1, 4, 16}, 14).cubes_per_axis == 256);
    CHECK(scaled_grid({1, 4, 16}, 2).cubes_per_axis == 32);
    CHECK(scaled_grid({2, 1, 8}, 3).cubes_per_axis == 32);
}

TEST_CASE("support floor of data", "[scaling]") {
    const GridSpec g{2, 4, 8};
    const SpectralField a = single_mode(g, {6, 3, 0}, 1.0);
    const SpectralField b = single_mode(g, {2, 5, 0}, 1.0);
    CHECK(support_floor_of(a, b) == 1.25);
}

TEST_CASE("selection returns the smallest admissible scale", "[scaling]") {
    const ModelParams p{1.0, 0.0, 2, 1};
    const ScalingConstants k{1.3, 0.7, 0.9, 1.1};
    for (double size : {1e-3, 1.0, 50.0, 1e4}) {
        const int lam = select_lambda(size, p, -1.0, 0.0, k, 1.0, 0.5);
        int brute = minimal_scale(p, kDefaultInvariantFloor);
        while (selection_lhs(p, brute, -1.0, 0.0, 1.0) > selection_rhs(p, k, size, 0.5)) ++brute;
        CHECK(lam == brute);
    }
    CHECK_THROWS_AS(select_lambda(1.0, p, 0.0, 0.0, k, 1.0), PreconditionError);
    CHECK(minimal_scale({2.0, 1.0, 2, 1}, 0.25) == 4);
}

TEST_CASE("plan at the selected scale meets the budget", "[scaling]") {
    const ModelParams p{1.0, 0.0, 2, 1};
    const GridSpec g{1, 4, 16};
    const SpectralField u0 = cplx(40.0) * cube_constant(g, make_cube({1}), 1.0);
    const SpectralField u1(g);
    const ScalingConstants k{1.0, 1.0, 1.0, 1.0};
    const double size = data_norm(p, u0, u1, -1.0, 0.0);
    const int lam = select_lambda(size, p, -1.0, 0.0, k, support_floor_of(u0, u1), 0.5);
    const ScalingPlan plan = make_plan(p, u0, u1, lam, -1.0, 0.0, k, 0.5);
    CHECK(plan.lambda == lam);
    CHECK(plan.scaled_norm <= plan.epsilon);
    CHECK(plan.radius_after == -lam);
    CHECK(plan.margin >= 1.0);
}
