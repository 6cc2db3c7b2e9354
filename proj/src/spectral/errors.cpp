#include "roughwave/errors.hpp"

#include <sstream>

namespace roughwave {

namespace {

std::string smallness_message(double measured, double budget) {
    std::ostringstream os;
    os.precision(6);
    os << "linear part too large for the contraction ball: weighted norm " << measured
       << " exceeds half the ball radius " << budget;
    return os.str();
}

std::string overflow_message(double fraction, double tol) {
    std::ostringstream os;
    os.precision(6);
    os << "spectral truncation monitor: outer-shell fraction " << fraction << " exceeds " << tol;
    return os.str();
}

}  // namespace

SmallnessError::SmallnessError(double measured_b_norm, double budget)
    : std::runtime_error(smallness_message(measured_b_norm, budget)),
      measured_(measured_b_norm),
      budget_(budget) {}

DivergenceError::DivergenceError(const std::string& what, int iteration)
    : std::runtime_error(what), iteration_(iteration) {}

SpectralOverflowError::SpectralOverflowError(double shell_fraction, double tolerance)
    : std::runtime_error(overflow_message(shell_fraction, tolerance)), fraction_(shell_fraction) {}

}  // namespace roughwave
