#include <cmath>
#include <string>
#include <vector>

#include "roughwave/decay_quadrature.hpp"
#include "roughwave/verify.hpp"

namespace roughwave {

namespace {

using json = nlohmann::ordered_json;

constexpr double kHorizon = 16777216.0;  // 2^24
constexpr double kInnerRadius = 9.5367431640625e-07;  // 2^-20
constexpr double kStableChange = 0.01;
constexpr double kClosedFormTol = 1e-8;

struct Tuple {
    double time_power, freq_power;
    int dim;
    double freq_exponent, time_exponent, diffusion, damping;
};

DecayIntegrand integrand(const Tuple& t) {
    DecayIntegrand f;
    f.params = ModelParams{t.diffusion, t.damping, 2, t.dim};
    f.time_power = t.time_power;
    f.freq_power = t.freq_power;
    f.freq_exponent = t.freq_exponent;
    f.time_exponent = t.time_exponent;
    f.decay_constant = 1.0;
    return f;
}

json tuple_json(const Tuple& t) {
    return json{{"time_power", t.time_power},       {"freq_power", t.freq_power}, {"dim", t.dim},
                {"freq_exponent", t.freq_exponent}, {"time_exponent", t.time_exponent},
                {"diffusion_order", t.diffusion},   {"damping_order", t.damping}};
}

// Relative change of the truncated norm when the truncation is relaxed once.
double doubling_change(const DecayIntegrand& f) {
    if (frequency_condition(f)) {
        const double a = decay_quadrature(f, kHorizon);
        const double b = decay_quadrature(f, 2.0 * kHorizon);
        return std::abs(b - a) / a;
    }
    const double a = decay_quadrature(f, kHorizon, kInnerRadius);
    const double b = decay_quadrature(f, kHorizon, 0.5 * kInnerRadius);
    return std::abs(b - a) / a;
}

}  // namespace

SuiteReport suite_time_quadrature(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "time_quadrature";
    rep.estimate = "time-frequency decay integrals of the low-frequency kernel majorant";
    rep.seed = opts.seed;

    // int_0^T int_0^1 e^{-r^2 t} dr dt = sqrt(pi T) erf(sqrt T) - 1 + e^{-T}.
    {
        const Tuple t{0, 0, 1, 1, 1, 1, 0};
        const double horizon = 100.0;
        const double exact = std::sqrt(M_PI * horizon) * std::erf(std::sqrt(horizon)) - 1.0 + std::exp(-horizon);
        const double got = decay_quadrature(integrand(t), horizon);
        json in = tuple_json(t);
        in["horizon"] = horizon;
        add_upper(rep, "closed_form_oracle", in, std::abs(got - exact) / exact, kClosedFormTol);
    }

    const std::vector<Tuple> satisfying{
        {0, 0, 3, 2, 2, 1, 0}, {-1, 0, 1, 2, 2, 1, 0}, {-1.5, 0.25, 1, 2, 1, 1, 0},
        {0, 0, 3, 1, 1, 1, 1}, {0.25, 0, 3, 1, 1, 2, 1},
    };
    for (std::size_t i = 0; i < satisfying.size(); ++i) {
        const DecayIntegrand f = integrand(satisfying[i]);
        const bool conditions = frequency_condition(f) && time_condition(f);
        const double change = doubling_change(f);
        json in = tuple_json(satisfying[i]);
        in["conditions_hold"] = conditions;
        in["horizon"] = kHorizon;
        const double value = decay_quadrature(f, kHorizon);
        rep.fitted_constants["decay_integral_" + std::to_string(i)] = value;
        add_case(rep, "stable_" + std::to_string(i), in, change, kStableChange,
                 conditions && std::isfinite(value) && change < kStableChange);
    }

    const std::vector<std::pair<Tuple, const char*>> violating{
        {{0, 0, 1, 2, 1, 1, 0}, "slow_time_decay_1d"},
        {{0, 0, 3, 2, 1, 1, 0}, "slow_time_decay_3d"},
        {{0, 1, 1, 2, 2, 1, 0}, "singular_at_origin"},
    };
    for (const auto& [t, label] : violating) {
        const DecayIntegrand f = integrand(t);
        const bool conditions = frequency_condition(f) && time_condition(f);
        const double change = doubling_change(f);
        json in = tuple_json(t);
        in["conditions_hold"] = conditions;
        add_case(rep, std::string("divergent_") + label, in, change, kStableChange,
                 !conditions && change > kStableChange, CaseKind::negative_control,
                 "growth under relaxed truncation flags divergence");
    }
    return rep;
}

}  // namespace roughwave
