#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "roughwave/kernels.hpp"
#include "roughwave/model.hpp"
#include "roughwave/norms.hpp"
#include "roughwave/time_series.hpp"

namespace roughwave {

struct LinearEvolution {
    TimeSeries value;  // K0 u0 + K1 u1
    TimeSeries rate;   // time derivative
};

// Support floor the propagator requires at this scale.
[[nodiscard]] double propagation_floor(const ModelParams& params, double scale,
                                       double invariant_floor = kDefaultInvariantFloor);

// Throws PreconditionError unless f vanishes outside the octant above `floor`
// (relative tolerance 1e-12 against the largest coefficient).
void require_admissible(const SpectralField& f, double floor, const char* what);

[[nodiscard]] LinearEvolution linear_evolve(const ModelParams& params, double scale, const SpectralField& u0,
                                            const SpectralField& u1, const std::vector<double>& times,
                                            double invariant_floor = kDefaultInvariantFloor);

struct DuhamelResult {
    TimeSeries value;  // int_0^t K1(t - tau) g(tau) dtau
    TimeSeries rate;   // int_0^t dK1(t - tau) g(tau) dtau
};

// Exponential integrator for the Duhamel term: on each step the forcing is
// replaced by its quadratic interpolant through three neighbouring samples and
// integrated exactly against the modal exponentials. Only modes in the
// admissible set are integrated; all other coefficients of the result are zero.
class DuhamelIntegrator {
public:
    DuhamelIntegrator(const ModelParams& params, double scale, const GridSpec& grid, std::vector<double> times,
                      double floor);

    [[nodiscard]] const GridSpec& grid() const { return grid_; }
    [[nodiscard]] const std::vector<double>& times() const { return times_; }
    [[nodiscard]] double floor() const { return floor_; }
    [[nodiscard]] std::size_t mode_count() const { return modes_.size(); }

    // Throws PreconditionError when the forcing leaves the admissible set.
    [[nodiscard]] DuhamelResult apply(const TimeSeries& forcing, bool with_rate = true) const;

private:
    struct Mode {
        std::size_t flat = 0;
        cplx slow;
        cplx fast;
        cplx gap;
        double stiffness = 0.0;
        double damping = 0.0;
        bool degenerate = false;
    };
    // Stencil of samples interpolated on step i -> i + 1.
    struct Stencil {
        std::size_t first = 0;
        int count = 2;
        std::array<double, 3> nodes{};  // sample offsets from t_i in units of the step
    };
    struct StepWeights {
        cplx decay_slow, decay_fast;
        std::array<cplx, 3> slow{}, fast{};
    };

    [[nodiscard]] Stencil stencil(std::size_t step) const;
    [[nodiscard]] StepWeights weights(const Mode& m, std::size_t step) const;
    void integrate_regular(const Mode& m, const TimeSeries& g, std::vector<std::vector<cplx>>& value,
                           std::vector<std::vector<cplx>>* rate) const;
    void integrate_degenerate(const Mode& m, const TimeSeries& g, std::vector<std::vector<cplx>>& value,
                              std::vector<std::vector<cplx>>* rate) const;

    ModelParams params_;
    double scale_ = 1.0;
    GridSpec grid_;
    std::vector<double> times_;
    double floor_ = 0.0;
    bool uniform_ = false;
    std::vector<Mode> modes_;
    std::vector<StepWeights> cached_;  // per mode: first step, then interior steps (uniform grids)
};

// Duhamel term at times[t_index]; throws std::out_of_range for a bad index.
[[nodiscard]] SpectralField duhamel(const ModelParams& params, double scale, const TimeSeries& forcing,
                                    std::size_t t_index, double invariant_floor = kDefaultInvariantFloor);

// Exponent e with  || Duhamel[u^p] ||_B <= C0 scale^e ||u||_B^p.
[[nodiscard]] double nonlinear_scale_exponent(const ModelParams& params);
// (max{2 C0, 4 C1})^{-1/(p-1)} scale^{-e/(p-1)}.
[[nodiscard]] double nu_bound(const ModelParams& params, double scale, double product_constant,
                              double lipschitz_constant);

// Solution-space norm L^p_t of E^{radius, smoothness + (2 low - 2 damping)/p + high}.
[[nodiscard]] MixedNormSpec solution_norm_spec(const ModelParams& params, double radius, double smoothness);
// Factor turning the solution-space norm into the scale-weighted ball norm.
[[nodiscard]] double ball_norm_factor(const ModelParams& params, double scale);

// Largest real part of the slow root over admissible modes of the grid.
[[nodiscard]] double slowest_decay_rate(const ModelParams& params, double scale, const GridSpec& grid, double floor);
// Horizon after which every admissible mode has decayed by `target`.
[[nodiscard]] double decay_horizon(const ModelParams& params, double scale, const GridSpec& grid, double floor,
                                   double target = 1e-8);

struct PicardConfig {
    double t_final = 0.0;          // 0 selects twice the decay horizon
    double time_step = 1.0 / 64;  // uniform grid spacing
    int max_iter = 40;
    double contraction_tol = 0.5;  // accepted factor after the first iteration
    double residual_tol = 1e-6;
    double nu_fraction = 0.5;
    double overflow_tol = 1e-8;  // outer-shell norm fraction
    double radius = -1.0;
    double smoothness = 0.0;
    double product_constant = 1.0;
    double lipschitz_constant = 1.0;
    double invariant_floor = kDefaultInvariantFloor;
    bool nonlinear = true;
    bool start_from_zero = false;
    bool enforce_smallness = true;

    void validate() const;
};

struct SolutionRecord {
    double scale = 1.0;
    double floor = 0.0;
    double split_time = 0.0;  // end of the main window; the rest is the decay tail
    TimeSeries series;
    TimeSeries dt_series;
    std::vector<double> norm_history;         // X norm of every iterate
    std::vector<double> increments;           // X norm of successive differences
    std::vector<double> contraction_factors;  // increments[m] / increments[m-1]
    double x_norm = 0.0;
    double b_norm = 0.0;
    double linear_b_norm = 0.0;
    double nu = 0.0;
    double residual = 0.0;          // X norm of the mild defect relative to x_norm
    double max_mode_defect = 0.0;   // largest coefficient defect relative to the largest coefficient
    double support_leakage = 0.0;   // largest relative mass outside the admissible set, before masking
    double shell_fraction = 0.0;    // outer-shell norm fraction, worst over time
    int iterations = 0;
    bool converged = false;
    bool contraction_ok = false;    // every factor after the first <= contraction_tol
};

[[nodiscard]] std::vector<double> solver_times(const ModelParams& params, double scale, const GridSpec& grid,
                                               const PicardConfig& cfg, double* split_time = nullptr);

// Global-in-time Picard iteration for u = K0 u0 + K1 u1 + Duhamel[u^p].
[[nodiscard]] SolutionRecord picard_solve(const ModelParams& params, double scale, const SpectralField& u0,
                                          const SpectralField& u1, const PicardConfig& cfg);

struct MildDefect {
    double relative = 0.0;         // X norm of defect / X norm of u
    double max_mode_relative = 0.0;
};

// Re-substitutes a series into the mild equation with the given data.
[[nodiscard]] MildDefect mild_defect(const ModelParams& params, double scale, const SpectralField& u0,
                                     const SpectralField& u1, const TimeSeries& u, const MixedNormSpec& norm,
                                     double invariant_floor = kDefaultInvariantFloor);

struct RegularityReport {
    double dissipative_norm = 0.0;  // L^1_t E^{radius, s + 2 low - 2 damping + high}
    double energy_norm = 0.0;       // L^inf_t E^{radius, s + high}
    double rate_norm = 0.0;         // L^inf_t E^{radius, s} of the time derivative
    double reference = 0.0;         // scale^{high - low} nu
    double tail_dissipative = 0.0;  // same norms over [split, end]
    double tail_energy = 0.0;
    double head_dissipative = 0.0;  // over [0, split]
    double head_energy = 0.0;
    double predicted_tail = 0.0;    // exp(-c floor^{2 low - 2 damping} split)
};

[[nodiscard]] RegularityReport regularity_norms(const SolutionRecord& rec, const ModelParams& params, double scale,
                                                double radius, double smoothness, double decay_constant);

}  // namespace roughwave
