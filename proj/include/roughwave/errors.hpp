#pragma once

#include <stdexcept>
#include <string>

namespace roughwave {

// An operation was called outside the region where its estimate is claimed.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class AliasingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OracleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SmallnessError : public std::runtime_error {
public:
    SmallnessError(double measured_b_norm, double budget);
    [[nodiscard]] double measured() const { return measured_; }
    [[nodiscard]] double budget() const { return budget_; }

private:
    double measured_;
    double budget_;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int iteration);
    [[nodiscard]] int iteration() const { return iteration_; }

private:
    int iteration_;
};

class SpectralOverflowError : public std::runtime_error {
public:
    SpectralOverflowError(double shell_fraction, double tolerance);
    [[nodiscard]] double shell_fraction() const { return fraction_; }

private:
    double fraction_;
};

}  // namespace roughwave
