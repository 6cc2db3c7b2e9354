#include <catch_amalgamated.hpp>

#include <cmath>

#include "roughwave/errors.hpp"
#include "roughwave/norms.hpp"
#include "roughwave/spectral_field.hpp"
#include "roughwave/time_series.hpp"

using namespace roughwave;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("cube weight", "[norms]") {
    CHECK_THAT(cube_weight(make_cube({3}), -1.0, 2.0), WithinRel(10.0 / 8.0, 1e-15));
    CHECK_THAT(cube_weight(make_cube({3, 4}), 0.0, 1.0), WithinRel(std::sqrt(26.0), 1e-15));
    CHECK(cube_weight(make_cube({0}), -5.0, 3.0) == 1.0);
}

TEST_CASE("weighted norm of two cubes by hand", "[norms]") {
    const GridSpec g{1, 4, 16};
    // cube 1 carries 4 coefficients of size 2, cube 3 carries 4 of size 1; h = 1/4.
    const SpectralField f = cube_constant(g, make_cube({1}), 2.0) + cube_constant(g, make_cube({3}), 1.0);
    const double c1 = std::sqrt(0.25 * 4 * 4);
    const double c3 = std::sqrt(0.25 * 4 * 1);
    const NormSpec spec{-0.5, 1.0};
    const double w1 = std::sqrt(2.0) * std::exp2(-0.5);
    const double w3 = std::sqrt(10.0) * std::exp2(-1.5);
    CHECK_THAT(e_norm(f, spec), WithinRel(std::hypot(w1 * c1, w3 * c3), 1e-14));

    const NormReport rep = e_norm_report(f, spec);
    REQUIRE(rep.per_cube.size() == 2);
    CHECK(rep.per_cube[0].cube == make_cube({1}));
    CHECK_THAT(rep.per_cube[1].weighted, WithinRel(w3 * c3, 1e-14));
}

TEST_CASE("positive radius is refused", "[norms]") {
    CHECK_THROWS(NormSpec{0.5, 0.0}.validate());
    CHECK_THROWS(MixedNormSpec{0.5, 0.0, 0.0, std::nullopt}.validate());
}

TEST_CASE("mixed norms of an exponential profile", "[norms]") {
    const GridSpec g{1, 4, 8};
    const SpectralField f = cube_constant(g, make_cube({2}), 1.0);
    const double a = 0.7;
    const std::vector<double> times = uniform_times(6.0, 6000);
    const TimeSeries u = profiled_series(f, times, [a](double t) { return std::exp(-a * t); });
    const double base = e_norm(f, {0.0, 0.0});
    // L^1: (1 - e^{-6a}) / a,  L^2: sqrt((1 - e^{-12a}) / 2a),  L^inf: 1.
    CHECK_THAT(mixed_norm(u, {1.0, 0.0, 0.0, std::nullopt}), WithinRel(base * (1 - std::exp(-6 * a)) / a, 1e-6));
    CHECK_THAT(mixed_norm(u, {2.0, 0.0, 0.0, std::nullopt}),
               WithinRel(base * std::sqrt((1 - std::exp(-12 * a)) / (2 * a)), 1e-6));
    CHECK_THAT(mixed_norm(u, {kInfiniteExponent, 0.0, 0.0, std::nullopt}), WithinRel(base, 1e-15));
    CHECK_THROWS(MixedNormSpec{0.5, 0.0, 0.0, std::nullopt}.validate());
}

TEST_CASE("mixed norm restricted to a cube set", "[norms]") {
    const GridSpec g{1, 2, 8};
    const SpectralField f = cube_constant(g, make_cube({1}), 1.0) + cube_constant(g, make_cube({2}), 3.0);
    const TimeSeries u = profiled_series(f, uniform_times(1.0, 4), [](double) { return 1.0; });
    MixedNormSpec spec{kInfiniteExponent, 0.0, 0.0, std::set<CubeIndex>{make_cube({2})}};
    CHECK_THAT(mixed_norm(u, spec), WithinRel(e_norm(decompose(f, make_cube({2})), {0.0, 0.0}), 1e-15));
}

TEST_CASE("product threshold and interaction sum", "[norms]") {
    // n/2 - p/(p-1) * gain
    CHECK(product_threshold(1, 2, 1.0) == -1.5);
    CHECK(product_threshold(2, 3, 0.5) == 0.25);
    // The lattice sum converges above the threshold: a larger box changes little.
    const double s = product_threshold(1, 2, 1.0) + 0.5;
    const double small = interaction_sum(2, 1, s, 1.0, 256);
    const double large = interaction_sum(2, 1, s, 1.0, 1024);
    CHECK_THAT(large, WithinRel(small, 0.01));
}

TEST_CASE("product estimate refuses data outside the octant", "[norms]") {
    const GridSpec g{1, 4, 8};
    SpectralField f = cube_constant(g, make_cube({-1}), 1.0);
    const TimeSeries u = profiled_series(f, uniform_times(1.0, 4), [](double) { return 1.0; });
    const std::vector<TimeSeries> factors{u, u};
    CHECK_THROWS_AS(product_estimate_ratio(factors, -1.0, 2.0, 1.0), PreconditionError);
}
