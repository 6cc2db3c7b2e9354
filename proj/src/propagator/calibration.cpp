#include "roughwave/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roughwave {

namespace {

struct Sample {
    SpectralField position;
    SpectralField velocity;
};

// Random data alternating between position-only, velocity-only and mixed.
std::vector<Sample> draw_samples(const CalibrationSetup& s, double floor) {
    Rng rng(s.seed);
    std::vector<Sample> out;
    for (const auto& [a, b] : s.shapes) out.push_back({a, b});
    const SpectralField zero(s.grid);
    for (int i = 0; i < s.samples; ++i) {
        SpectralField a = random_octant_field(s.grid, s.cubes, floor, rng);
        SpectralField b = random_octant_field(s.grid, s.cubes, floor, rng);
        switch (i % 3) {
            case 0:
                out.push_back({a, zero});
                break;
            case 1:
                out.push_back({zero, b});
                break;
            default:
                out.push_back({a, b});
                break;
        }
    }
    return out;
}

TimeSeries masked_power(const TimeSeries& u, int power, double floor) {
    TimeSeries g;
    g.times = u.times;
    for (const auto& f : u.fields) g.fields.push_back(octant_mask(pointwise_power(f, power), floor));
    return g;
}

}  // namespace

double data_norm(const ModelParams& params, const SpectralField& u0, const SpectralField& u1, double radius,
                 double smoothness) {
    const DerivedExponents dx = derived_exponents(params);
    return e_norm(u0, {radius, smoothness + dx.high_order}) + e_norm(u1, {radius, smoothness});
}

double fit_linear_constant(const CalibrationSetup& s) {
    const double floor = propagation_floor(s.params, s.scale, s.invariant_floor);
    const MixedNormSpec xspec = solution_norm_spec(s.params, s.radius, s.smoothness);
    const double bfac = ball_norm_factor(s.params, s.scale);
    double best = 0.0;
    for (const auto& smp : draw_samples(s, floor)) {
        const double d = data_norm(s.params, smp.position, smp.velocity, s.radius, s.smoothness);
        if (d == 0.0) continue;
        const LinearEvolution lin =
            linear_evolve(s.params, s.scale, smp.position, smp.velocity, s.times, s.invariant_floor);
        best = std::max(best, bfac * mixed_norm(lin.value, xspec) / d);
    }
    if (best == 0.0) throw std::invalid_argument("calibration sweep has no nonzero samples");
    return best;
}

ContractionConstants fit_contraction_constants(const CalibrationSetup& s) {
    const double floor = propagation_floor(s.params, s.scale, s.invariant_floor);
    const MixedNormSpec xspec = solution_norm_spec(s.params, s.radius, s.smoothness);
    const double bfac = ball_norm_factor(s.params, s.scale);
    const double lam = std::pow(s.scale, nonlinear_scale_exponent(s.params));
    const int p = s.params.power;
    const DuhamelIntegrator integ(s.params, s.scale, s.grid, s.times, floor);
    auto bnorm = [&](const TimeSeries& u) { return bfac * mixed_norm(u, xspec); };

    std::vector<TimeSeries> evolutions;
    for (const auto& smp : draw_samples(s, floor)) {
        if (smp.position.is_zero() && smp.velocity.is_zero()) continue;
        evolutions.push_back(
            linear_evolve(s.params, s.scale, smp.position, smp.velocity, s.times, s.invariant_floor).value);
    }
    if (evolutions.empty()) throw std::invalid_argument("calibration sweep has no nonzero samples");

    ContractionConstants out;
    std::vector<TimeSeries> powers;
    powers.reserve(evolutions.size());
    for (const auto& u : evolutions) {
        powers.push_back(masked_power(u, p, floor));
        const double nu = bnorm(u);
        const double image = bnorm(integ.apply(powers.back(), false).value);
        out.product = std::max(out.product, image / (lam * std::pow(nu, p)));
    }
    // Pairs: neighbours in the sweep, and each sample against a half-size copy.
    auto lipschitz = [&](const TimeSeries& u, const TimeSeries& gu, const TimeSeries& v, const TimeSeries& gv) {
        const double du = bnorm(series_difference(u, v));
        if (du == 0.0) return 0.0;
        const double image = bnorm(integ.apply(series_difference(gu, gv), false).value);
        return image / (lam * du * (std::pow(bnorm(u), p - 1) + std::pow(bnorm(v), p - 1)));
    };
    for (std::size_t i = 0; i < evolutions.size(); ++i) {
        const std::size_t j = (i + 1) % evolutions.size();
        if (j != i) {
            out.lipschitz = std::max(out.lipschitz, lipschitz(evolutions[i], powers[i], evolutions[j], powers[j]));
        }
        TimeSeries half = evolutions[i];
        for (auto& f : half.fields) f = cplx(0.5) * f;
        TimeSeries half_power = powers[i];
        for (auto& f : half_power.fields) f = cplx(std::pow(0.5, p)) * f;
        out.lipschitz = std::max(out.lipschitz, lipschitz(evolutions[i], powers[i], half, half_power));
    }
    return out;
}

}  // namespace roughwave
