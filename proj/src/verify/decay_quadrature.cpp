#include "roughwave/decay_quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace roughwave {

namespace {

constexpr std::array<double, 8> kNodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                       -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                       0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kWeights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                         0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                         0.2223810344533745, 0.1012285362903763};
constexpr int kDyadicPanels = 120;
constexpr double kLogPanel = 0.5;

template <typename F>
double gauss(double a, double b, F f) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < kNodes.size(); ++i) acc += kWeights[i] * f(mid + half * kNodes[i]);
    return half * acc;
}

double space_margin(const DecayIntegrand& f) { return f.params.dim - f.freq_power * f.freq_exponent; }

double decay_exponent(const DecayIntegrand& f) {
    const DerivedExponents dx = derived_exponents(f.params);
    return 2.0 * dx.high_order - 2.0 * f.params.damping_order;
}

void validate(const DecayIntegrand& f) {
    f.params.validate();
    if (!(f.freq_exponent >= 1.0) || !(f.time_exponent >= 1.0)) throw std::domain_error("exponents must be >= 1");
    if (!(f.decay_constant > 0.0)) throw std::domain_error("decay constant must be positive");
    if (!(decay_exponent(f) > 0.0)) throw std::domain_error("decay exponent must be positive");
}

// int_{inner}^1 r^{q-1} e^{-a r^b} dr.
double radial_integral(double q, double b, double a, double inner) {
    if (inner == 0.0) {
        // w = r^q turns the weight into dw / q.
        const double p = b / q;
        double acc = 0.0;
        double hi = 1.0;
        for (int k = 0; k < kDyadicPanels; ++k) {
            const double lo = 0.5 * hi;
            acc += gauss(lo, hi, [&](double w) { return std::exp(-a * std::pow(w, p)); });
            hi = lo;
        }
        return acc / q;
    }
    // r = e^u.
    const double u0 = std::log(inner);
    const int panels = std::max(1, static_cast<int>(std::ceil(-u0 / kLogPanel)));
    const double width = -u0 / panels;
    double acc = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = u0 + k * width;
        acc += gauss(lo, lo + width, [&](double u) {
            const double r = std::exp(u);
            return std::pow(r, q) * std::exp(-a * std::pow(r, b));
        });
    }
    return acc;
}

}  // namespace

bool frequency_condition(const DecayIntegrand& f) { return space_margin(f) > 0.0; }

bool time_condition(const DecayIntegrand& f) {
    const double e = f.time_power - space_margin(f) / (decay_exponent(f) * f.freq_exponent);
    if (std::isinf(f.time_exponent)) return e <= 0.0;
    return e * f.time_exponent < -1.0;
}

double decay_quadrature(const DecayIntegrand& f, double horizon, double inner_radius) {
    validate(f);
    if (!(horizon > 0.0)) throw std::domain_error("horizon must be positive");
    if (!(inner_radius >= 0.0 && inner_radius < 1.0)) throw std::domain_error("inner radius must lie in [0, 1)");
    const double q = space_margin(f);
    if (inner_radius == 0.0 && !(q > 0.0)) throw std::domain_error("space integral diverges at the origin");
    const double b = decay_exponent(f);
    const double m = f.freq_exponent;
    auto slice = [&](double t) {
        const double inner = radial_integral(q, b, f.decay_constant * m * t, inner_radius);
        return std::pow(1.0 + t, f.time_power) * std::pow(inner, 1.0 / m);
    };
    const double g = f.time_exponent;
    double acc = 0.0;
    double lo = 0.0;
    double hi = std::min(1.0, horizon);
    while (lo < horizon) {
        if (std::isinf(g)) {
            acc = std::max({acc, slice(lo), slice(hi)});
            gauss(lo, hi, [&](double t) {
                acc = std::max(acc, slice(t));
                return 0.0;
            });
        } else {
            acc += gauss(lo, hi, [&](double t) { return std::pow(slice(t), g); });
        }
        lo = hi;
        hi = std::min(2.0 * hi, horizon);
    }
    return std::isinf(g) ? acc : std::pow(acc, 1.0 / g);
}

}  // namespace roughwave
