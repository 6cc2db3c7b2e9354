#include "roughwave/ode_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "roughwave/errors.hpp"
#include "roughwave/kernels.hpp"

namespace roughwave {

namespace {

using cd = std::complex<double>;

struct State {
    cd v;
    cd w;
};

State operator+(State a, State b) { return {a.v + b.v, a.w + b.w}; }
State operator*(double s, State a) { return {s * a.v, s * a.w}; }

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr std::array<double, 7> kB5{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> kB4{5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

class Integrator {
public:
    Integrator(ModeCoefficients mc, OracleOptions opts) : mc_(mc), opts_(opts), root_k_(std::sqrt(mc.stiffness)) {}

    State rhs(const State& y) const { return {y.w, -mc_.damping * y.w - mc_.stiffness * y.v}; }

    double energy(const State& y) const { return std::max(root_k_ * std::abs(y.v), std::abs(y.w)); }

    // Advances y from t to t_end.
    void advance(State& y, double& t, double t_end, double& h) {
        const double min_step_scale = 1e-14 * std::max(1.0, t_end);
        while (t < t_end) {
            if (++steps_ > opts_.max_steps) throw OracleFailure("ODE oracle exceeded its step budget");
            double step = std::min(h, t_end - t);
            const bool last = step >= t_end - t;
            std::array<State, 7> k;
            k[0] = rhs(y);
            for (int s = 1; s < 7; ++s) {
                State acc = y;
                for (int j = 0; j < s; ++j) acc = acc + (step * kA[s][j]) * k[j];
                k[s] = rhs(acc);
            }
            State y5 = y;
            State err{};
            for (int s = 0; s < 7; ++s) {
                y5 = y5 + (step * kB5[s]) * k[s];
                err = err + (step * (kB5[s] - kB4[s])) * k[s];
            }
            const double scale = opts_.rel_tol * std::max(energy(y), energy(y5));
            const double e = scale > 0.0 ? energy(err) / scale : 0.0;
            if (e <= 1.0) {
                y = y5;
                t = last ? t_end : t + step;
                const double grow = e > 0.0 ? 0.9 * std::pow(e, -0.2) : 5.0;
                if (!last) h = step * std::clamp(grow, 0.2, 5.0);
            } else {
                h = step * std::max(0.2, 0.9 * std::pow(e, -0.2));
                if (h < min_step_scale) throw OracleFailure("ODE oracle step size underflow");
            }
        }
    }

private:
    ModeCoefficients mc_;
    OracleOptions opts_;
    double root_k_;
    long steps_ = 0;
};

}  // namespace

std::vector<OracleState> ode_oracle_trajectory(const ModelParams& params, double scale, double r,
                                               const std::vector<double>& times, InitialData ic,
                                               const OracleOptions& opts) {
    const ModeCoefficients mc = mode_coefficients(params, scale, r);
    Integrator integ(mc, opts);
    State y = ic == InitialData::position ? State{cd(1.0, 0.0), cd(0.0, 0.0)} : State{cd(0.0, 0.0), cd(1.0, 0.0)};
    double t = 0.0;
    const double freq = std::sqrt(mc.damping * mc.damping + mc.stiffness) + 1.0;
    double h = 0.01 / freq;
    std::vector<OracleState> out;
    out.reserve(times.size());
    for (double target : times) {
        if (target < t) throw std::invalid_argument("oracle times must be nondecreasing and nonnegative");
        integ.advance(y, t, target, h);
        out.push_back({y.v, y.w});
    }
    return out;
}

std::complex<double> ode_oracle(const ModelParams& params, double scale, double r, double t, InitialData ic,
                                const OracleOptions& opts) {
    if (t < 0.0) throw std::domain_error("time must be nonnegative");
    return ode_oracle_trajectory(params, scale, r, {t}, ic, opts).front().value;
}

}  // namespace roughwave
