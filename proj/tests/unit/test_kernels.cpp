#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "roughwave/errors.hpp"
#include "roughwave/kernels.hpp"
#include "roughwave/model.hpp"
#include "roughwave/ode_oracle.hpp"
#include "oracles.hpp"

using namespace roughwave;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using C = std::complex<double>;

using oracle::Closed;
using oracle::closed_form;

namespace {

// Classical RK4 with a fine fixed step.
Closed rk4(double sigma, double delta, double r, double t) {
    const double b = std::pow(r, 2 * delta);
    const double c = std::pow(r, 2 * sigma);
    auto run = [&](C v, C w) {
        const int steps = 20000;
        const double h = t / steps;
        auto f = [&](C x, C y) { return std::pair<C, C>{y, -b * y - c * x}; };
        for (int i = 0; i < steps; ++i) {
            auto [k1x, k1y] = f(v, w);
            auto [k2x, k2y] = f(v + 0.5 * h * k1x, w + 0.5 * h * k1y);
            auto [k3x, k3y] = f(v + 0.5 * h * k2x, w + 0.5 * h * k2y);
            auto [k4x, k4y] = f(v + h * k3x, w + h * k3y);
            v += h / 6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            w += h / 6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        }
        return v;
    };
    return {run(1.0, 0.0), run(0.0, 1.0)};
}

}  // namespace

TEST_CASE("derived exponents and regimes", "[kernels]") {
    const DerivedExponents plate = derived_exponents({2.0, 1.0, 3, 2}, 0.25);
    CHECK(plate.low_order == 2.0);
    CHECK(plate.high_order == 2.0);
    CHECK(plate.regime == Regime::scale_invariant);
    CHECK(plate.support_floor == 0.25);
    CHECK_THAT(plate.critical_smoothness, WithinAbs(-3.0, 1e-14));

    const DerivedExponents eff = derived_exponents({1.0, 0.0, 2, 1});
    CHECK(eff.regime == Regime::effective);
    CHECK(eff.low_order == 0.0);
    CHECK(eff.high_order == 1.0);
    CHECK_THAT(eff.support_floor, WithinRel(1.0 / std::sqrt(3.0), 1e-15));

    const DerivedExponents non = derived_exponents({1.0, 1.0, 2, 1});
    CHECK(non.regime == Regime::non_effective);
    CHECK_THAT(non.support_floor, WithinRel(std::sqrt(5.0), 1e-15));

    CHECK_THAT(scaled_support_floor({1.0, 0.0, 2, 1}, eff, 4.0), WithinRel(4.0 / std::sqrt(3.0), 1e-15));
    CHECK(scaled_support_floor({2.0, 1.0, 2, 1}, derived_exponents({2.0, 1.0, 2, 1}), 8.0) == 1.0);
}

TEST_CASE("model validation rejects bad parameters", "[kernels]") {
    CHECK_THROWS(ModelParams{1.0, 2.0, 2, 1}.validate());
    CHECK_THROWS(ModelParams{1.0, 0.0, 1, 1}.validate());
    CHECK_THROWS(ModelParams{1.0, -0.5, 2, 1}.validate());
    CHECK_THROWS(ModelParams{1.0, 0.0, 2, 4}.validate());
    CHECK_NOTHROW(ModelParams{1.5, 0.5, 4, 3}.validate());
    CHECK(parse_regime("scale_invariant") == Regime::scale_invariant);
    CHECK_THROWS(parse_regime("nope"));
}

TEST_CASE("roots of the unit-frequency effective mode", "[kernels]") {
    const CharacteristicRoots cr = characteristic_roots({1.0, 0.0, 2, 1}, 1.0, 1.0);
    const C want(-0.5, std::sqrt(3.0) / 2);
    CHECK(std::abs(cr.slow - want) < 1e-15);
    CHECK(std::abs(cr.fast - std::conj(want)) < 1e-15);
}

TEST_CASE("scale-invariant roots do not depend on the scale", "[kernels]") {
    for (double lam : {1.0, 3.0, 16.0}) {
        const CharacteristicRoots cr = characteristic_roots({2.0, 1.0, 2, 1}, lam, 1.5);
        CHECK(std::abs(cr.slow - C(-0.5, std::sqrt(3.0) / 2) * 2.25) < 1e-13);
    }
}

TEST_CASE("scale-invariant closed value at t = 2 pi / sqrt 3", "[kernels]") {
    const KernelValue kv = kernel_eval({2.0, 1.0, 2, 1}, 1.0, 1.0, 2 * std::numbers::pi / std::sqrt(3.0));
    CHECK_THAT(kv.pos.real(), WithinRel(-std::exp(-std::numbers::pi / std::sqrt(3.0)), 1e-12));
    CHECK_THAT(kv.pos.imag(), WithinAbs(0.0, 1e-14));
}

TEST_CASE("kernels match the quadratic-formula closed form at unit scale", "[kernels]") {
    for (auto [s, d] : {std::pair{1.0, 0.0}, {1.0, 1.0}, {2.0, 1.0}, {1.5, 0.25}}) {
        for (double r : {0.7, 1.3, 3.0}) {
            for (double t : {0.0, 0.4, 2.0, 7.5}) {
                const KernelValue kv = kernel_eval({s, d, 2, 1}, 1.0, r, t);
                const Closed want = closed_form(s, d, r, t);
                CHECK(std::abs(kv.pos - want.pos) <= 1e-11 * std::max(1.0, std::abs(want.pos)));
                CHECK(std::abs(kv.vel - want.vel) <= 1e-11 * std::max(1.0, std::abs(want.vel)));
            }
        }
    }
}

TEST_CASE("kernels match a fixed-step RK4 integration", "[kernels]") {
    for (auto [s, d] : {std::pair{1.0, 0.0}, {1.0, 1.0}, {2.0, 1.0}}) {
        const Closed ref = rk4(s, d, 1.7, 1.5);
        const KernelValue kv = kernel_eval({s, d, 2, 1}, 1.0, 1.7, 1.5);
        CHECK(std::abs(kv.pos - ref.pos) < 1e-9);
        CHECK(std::abs(kv.vel - ref.vel) < 1e-9);
    }
}

TEST_CASE("degenerate double root stays finite and matches the limit", "[kernels]") {
    // (1,0): damping 1, stiffness r^2; double root at r = 1/2 where pos = (1 + t/2) e^{-t/2}.
    for (double t : {0.0, 1.0, 5.0}) {
        const KernelValue kv = kernel_eval({1.0, 0.0, 2, 1}, 1.0, 0.5, t);
        CHECK_THAT(kv.pos.real(), WithinRel((1 + t / 2) * std::exp(-t / 2), 1e-10));
        CHECK_THAT(kv.vel.real(), WithinAbs(t * std::exp(-t / 2), 1e-10));
    }
}

TEST_CASE("adaptive ODE oracle agrees with the closed form", "[kernels][oracle]") {
    const ModelParams p{1.0, 1.0, 2, 1};
    const Closed want = closed_form(1.0, 1.0, 2.5, 3.0);
    CHECK(std::abs(ode_oracle(p, 1.0, 2.5, 3.0, InitialData::position) - want.pos) < 1e-9);
    CHECK(std::abs(ode_oracle(p, 1.0, 2.5, 3.0, InitialData::velocity) - want.vel) < 1e-9);
}

TEST_CASE("pointwise bound refuses frequencies below the floor", "[kernels]") {
    const ModelParams p{1.0, 0.0, 2, 1};
    CHECK_THROWS_AS(pointwise_bound_ratio(p, 4.0, 1.0, 1.0, KernelPart::pos, 0.25), PreconditionError);
    CHECK(std::isfinite(pointwise_bound_ratio(p, 4.0, 3.0, 1.0, KernelPart::pos, 0.25)));
}

TEST_CASE("phi1 is accurate near zero", "[kernels]") {
    CHECK_THAT(phi1(C(1e-10)).real(), WithinRel(1.0 + 0.5e-10, 1e-15));
    CHECK(std::abs(phi1(C(1.0, 0.0)) - (std::exp(1.0) - 1.0)) < 1e-15);
}
