#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "roughwave/errors.hpp"
#include "roughwave/propagator.hpp"

using namespace roughwave;
using Catch::Matchers::WithinRel;

namespace {

const GridSpec kGrid{1, 4, 8};
constexpr int kMode = 9;  // frequency 9/4, above every unit-scale floor used here

double mode_frequency() { return frequency(kGrid, kMode); }

}  // namespace

TEST_CASE("linear evolution of a single mode follows the kernels", "[propagator]") {
    for (auto [s, d] : {std::pair{1.0, 0.0}, {2.0, 1.0}, {1.0, 0.5}}) {
        const ModelParams p{s, d, 2, 1};
        const SpectralField u0 = single_mode(kGrid, {kMode, 0, 0}, cplx(2.0, -1.0));
        const SpectralField u1 = single_mode(kGrid, {kMode, 0, 0}, cplx(0.5, 0.0));
        const std::vector<double> times{0.0, 0.3, 1.0, 2.5};
        const LinearEvolution ev = linear_evolve(p, 1.0, u0, u1, times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const oracle::Closed k = oracle::closed_form(s, d, mode_frequency(), times[i]);
            const cplx want = k.pos * cplx(2.0, -1.0) + k.vel * 0.5;
            CHECK(std::abs(ev.value.fields[i].at({kMode, 0, 0}) - want) < 1e-13);
        }
    }
}

TEST_CASE("data below the floor is refused", "[propagator]") {
    const ModelParams p{1.0, 1.0, 2, 1};  // floor sqrt 5
    const SpectralField u0 = single_mode(kGrid, {4, 0, 0}, 1.0);
    CHECK_THROWS_AS(linear_evolve(p, 1.0, u0, SpectralField(kGrid), {0.0, 1.0}), PreconditionError);
}

TEST_CASE("Duhamel term of a constant forcing", "[propagator]") {
    const ModelParams p{1.0, 0.0, 2, 1};
    const std::vector<double> times = uniform_times(3.0, 192);
    const SpectralField g = single_mode(kGrid, {kMode, 0, 0}, cplx(1.0, 0.5));
    const TimeSeries forcing = profiled_series(g, times, [](double) { return 1.0; });
    const SpectralField out = duhamel(p, 1.0, forcing, times.size() - 1);
    const cplx want = oracle::velocity_integral(1.0, 0.0, mode_frequency(), 3.0) * cplx(1.0, 0.5);
    CHECK(std::abs(out.at({kMode, 0, 0}) - want) < 1e-12);
}

TEST_CASE("Duhamel term of an exponential forcing converges at third order", "[propagator]") {
    // Forcing e^{-t}: int_0^t vel(t - tau) e^{-tau} dtau in closed form.
    const double r = mode_frequency();
    const auto [mp, mm] = oracle::roots(1.0, 0.0, r);
    const double t = 2.0;
    auto part = [&](oracle::C mu) { return (std::exp(mu * t) - std::exp(-t)) / (mu + 1.0); };
    const oracle::C want = (part(mp) - part(mm)) / (mp - mm);
    double prev = 0.0;
    for (int steps : {16, 32, 64}) {
        const std::vector<double> times = uniform_times(t, steps);
        const TimeSeries forcing =
            profiled_series(single_mode(kGrid, {kMode, 0, 0}, 1.0), times, [](double s) { return std::exp(-s); });
        const double err = std::abs(duhamel({1.0, 0.0, 2, 1}, 1.0, forcing, times.size() - 1).at({kMode, 0, 0}) - want);
        if (prev > 0.0) CHECK(prev / err > 6.0);
        prev = err;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("nu bound in the scale-invariant case", "[propagator]") {
    const ModelParams p{2.0, 1.0, 2, 1};
    for (double lam : {1.0, 4.0, 16.0}) {
        CHECK_THAT(nu_bound(p, lam, 0.3, 0.2), WithinRel(1.0 / 0.8, 1e-14));
    }
    // Cubic power: square root of the reciprocal.
    CHECK_THAT(nu_bound({2.0, 1.0, 3, 1}, 1.0, 1.0, 1.0), WithinRel(0.5, 1e-14));
}

TEST_CASE("Picard solver on a small problem", "[propagator]") {
    const ModelParams p{1.0, 0.0, 2, 1};
    const GridSpec g{1, 4, 32};
    PicardConfig cfg;
    cfg.radius = -1.0;
    const SpectralField shape = octant_mask(cube_constant(g, make_cube({1}), 1.0), propagation_floor(p, 1.0));
    const SpectralField zero(g);

    SECTION("zero data gives the zero solution") {
        const SolutionRecord rec = picard_solve(p, 1.0, zero, zero, cfg);
        CHECK(rec.converged);
        for (const auto& f : rec.series.fields) CHECK(f.is_zero());
    }
    SECTION("linear run equals the linear evolution") {
        PicardConfig lin = cfg;
        lin.nonlinear = false;
        lin.enforce_smallness = false;
        const SolutionRecord rec = picard_solve(p, 1.0, shape, zero, lin);
        const LinearEvolution ev = linear_evolve(p, 1.0, shape, zero, solver_times(p, 1.0, g, lin));
        double worst = 0.0;
        for (std::size_t i = 0; i < ev.value.size(); ++i) {
            worst = std::max(worst, (ev.value.fields[i] - rec.series.fields[i]).max_abs());
        }
        CHECK(worst == 0.0);
    }
    SECTION("small data contract and satisfy the mild equation") {
        const SpectralField u0 = cplx(0.05) * shape;
        const SolutionRecord rec = picard_solve(p, 1.0, u0, zero, cfg);
        REQUIRE(rec.converged);
        CHECK(rec.contraction_ok);
        CHECK(rec.residual < 1e-6);
        CHECK(rec.support_leakage <= 1e-12);
        const MildDefect md = mild_defect(p, 1.0, u0, zero, rec.series, solution_norm_spec(p, -1.0, 0.0));
        CHECK(md.relative < 1e-6);
    }
    SECTION("data above the budget are refused") {
        CHECK_THROWS_AS(picard_solve(p, 1.0, cplx(1e3) * shape, zero, cfg), SmallnessError);
    }
}

TEST_CASE("solver configuration validation", "[propagator]") {
    PicardConfig c;
    c.contraction_tol = 1.0;
    CHECK_THROWS(c.validate());
    c = {};
    c.radius = 0.1;
    CHECK_THROWS(c.validate());
    c = {};
    c.nu_fraction = 0.0;
    CHECK_THROWS(c.validate());
}
