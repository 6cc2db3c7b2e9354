#pragma once

#include <vector>

#include "roughwave/calibration.hpp"
#include "roughwave/propagator.hpp"

namespace roughwave {

// Amplitude exponent of the position data under scaling: 2 low / (p - 1).
[[nodiscard]] double data_scale_exponent(const ModelParams& params);

// Moves every coefficient from lattice point m to factor * m on `target`
// (same cell size) and multiplies it by `amplitude`. Throws std::overflow_error
// when a nonzero coefficient leaves the target lattice.
[[nodiscard]] SpectralField relocate(const SpectralField& f, int factor, double amplitude, const GridSpec& target);

// Inverse of relocate: m -> m / factor. Coefficients off the factor-sublattice
// must vanish (relative 1e-12, else std::logic_error); those beyond the target
// lattice are dropped.
[[nodiscard]] SpectralField unrelocate(const SpectralField& f, int factor, double amplitude, const GridSpec& target);

struct DataPair {
    SpectralField position;
    SpectralField velocity;
};

// Grid with the cell size of `grid` and 2^j cubes, the smallest holding factor
// times the lattice range of `grid`.
[[nodiscard]] GridSpec scaled_grid(const GridSpec& grid, int factor);

// Lattice scaling of the data; amplitudes scale^{2 low/(p-1)} and scale^{2 low/(p-1) + low}.
[[nodiscard]] DataPair scale_data(const SpectralField& u0, const SpectralField& u1, int scale,
                                  const ModelParams& params, const GridSpec& target);
[[nodiscard]] DataPair scale_data(const SpectralField& u0, const SpectralField& u1, int scale,
                                  const ModelParams& params);
[[nodiscard]] DataPair descale_data(const SpectralField& u0, const SpectralField& u1, int scale,
                                    const ModelParams& params, const GridSpec& target);

// Weighted norm of relocate(f, factor, amplitude, .) computed from the coefficient list.
[[nodiscard]] double relocated_norm(const SpectralField& f, int factor, double amplitude, const NormSpec& spec);

// Density dilation phi -> phi(factor x): each cell m feeds cells factor*m + j,
// j in [0, factor)^n, with weight factor^{-n}.
[[nodiscard]] SpectralField dilate_density(const SpectralField& phi, int factor, const GridSpec& target);
[[nodiscard]] GridSpec dilation_grid(const SpectralField& phi, int factor);

// ||phi(scale x)||_{E^radius_s} / (scale^{-n/2 + max{s,0}} 2^{radius (scale-1) support} ||phi||_{E^radius_s}).
// Throws PreconditionError when phi has frequencies below `support`.
[[nodiscard]] double scaling_bound_ratio(const SpectralField& phi, int scale, double radius, double smoothness,
                                         double support);

// Time series g(scale^{-low} t, x / scale) from a series whose support sits on
// the scale-sublattice; times are multiplied by scale^{low}.
[[nodiscard]] TimeSeries inverse_dilation(const TimeSeries& g, int scale, const ModelParams& params,
                                          const GridSpec& target);

struct ScalingConstants {
    double linear = 1.0;      // C
    double product = 1.0;     // C0
    double lipschitz = 1.0;   // C1
    double dilation = 1.0;    // C~1
};

// Exponent of scale in the left side of the selection inequality. The torus
// relocation keeps L2 masses, so the continuum factor scale^{-n/2} is absent.
[[nodiscard]] double selection_exponent(const ModelParams& params, double smoothness);
[[nodiscard]] double selection_lhs(const ModelParams& params, double scale, double radius, double smoothness,
                                   double support);
[[nodiscard]] double selection_rhs(const ModelParams& params, const ScalingConstants& k, double data_size,
                                   double nu_fraction);
[[nodiscard]] int minimal_scale(const ModelParams& params, double invariant_floor);

// Smallest admissible integer scale satisfying the selection inequality.
// Throws PreconditionError for radius >= 0.
[[nodiscard]] int select_lambda(double data_size, const ModelParams& params, double radius, double smoothness,
                                const ScalingConstants& k, double support, double nu_fraction = 1.0,
                                double invariant_floor = kDefaultInvariantFloor, int max_scale = 1 << 16);

// Sup over scale in [2, max_scale] of ||scaled data|| / (scale^{e} 2^{radius (scale-1) support} ||data||),
// e the data part of the selection exponent.
[[nodiscard]] double fit_dilation_constant(const ModelParams& params, const SpectralField& u0,
                                           const SpectralField& u1, double radius, double smoothness,
                                           double support, int max_scale);

// Smallest |xi|_inf over the nonzero coefficients of either field.
[[nodiscard]] double support_floor_of(const SpectralField& u0, const SpectralField& u1);

struct ScalingPlan {
    int lambda = 1;
    SpectralField scaled_u0;
    SpectralField scaled_u1;
    double nu = 0.0;
    double epsilon = 0.0;  // nu / (2 C)
    double scaled_floor = 0.0;
    double original_norm = 0.0;
    double scaled_norm = 0.0;
    double data_support = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs / lhs at the chosen scale
    double radius_after = 0.0;  // lambda * radius
    ScalingConstants constants;
    int selected = 1;  // from the inequality, before any smallness bump
};

// Scales the data by `lambda` and fills the bookkeeping fields.
[[nodiscard]] ScalingPlan make_plan(const ModelParams& params, const SpectralField& u0, const SpectralField& u1,
                                    int lambda, double radius, double smoothness, const ScalingConstants& k,
                                    double nu_fraction, double invariant_floor = kDefaultInvariantFloor);

struct DescaledSolution {
    TimeSeries series;
    TimeSeries dt_series;
    double radius = 0.0;            // scale * radius
    double dissipative_norm = 0.0;  // L^1_t E^{radius', s + 2 low - 2 damping + high}
    double energy_norm = 0.0;       // L^inf_t E^{radius', s + high}
    MildDefect original_defect;     // mild equation at unit scale
};

// Maps a scaled solution back to the original lattice `target` and re-checks
// the unit-scale mild equation with the original data.
[[nodiscard]] DescaledSolution descale_solution(const SolutionRecord& rec, int scale, const ModelParams& params,
                                                double radius, double smoothness, const SpectralField& u0,
                                                const SpectralField& u1, double invariant_floor = kDefaultInvariantFloor);

}  // namespace roughwave
