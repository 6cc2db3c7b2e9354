#pragma once

#include <cmath>
#include <complex>

namespace oracle {

using C = std::complex<double>;

// Roots of mu^2 + b mu + c = 0 for the unit-scale mode v'' + r^{2 damping} v' + r^{2 diffusion} v = 0.
struct Roots {
    C plus, minus;
};

inline Roots roots(double sigma, double delta, double r) {
    const double b = std::pow(r, 2 * delta);
    const double c = std::pow(r, 2 * sigma);
    const C disc = std::sqrt(C(b * b - 4 * c));
    return {0.5 * (-b + disc), 0.5 * (-b - disc)};
}

struct Closed {
    C pos, vel;
};

inline Closed closed_form(double sigma, double delta, double r, double t) {
    const auto [mp, mm] = roots(sigma, delta, r);
    return {(mp * std::exp(mm * t) - mm * std::exp(mp * t)) / (mp - mm), (std::exp(mp * t) - std::exp(mm * t)) / (mp - mm)};
}

// int_0^t vel(t - tau) dtau
inline C velocity_integral(double sigma, double delta, double r, double t) {
    const auto [mp, mm] = roots(sigma, delta, r);
    return ((std::exp(mp * t) - 1.0) / mp - (std::exp(mm * t) - 1.0) / mm) / (mp - mm);
}

}  // namespace oracle
