#pragma once

#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "roughwave/model.hpp"
#include "roughwave/time_series.hpp"

namespace roughwave {

// Weighted norm  ( sum_k ( <k>^smoothness 2^{radius |k|} ||box_k f||_2 )^2 )^{1/2}.
struct NormSpec {
    double radius = 0.0;  // <= 0; negative values admit exponentially growing spectra
    double smoothness = 0.0;

    void validate() const;
};

constexpr double kInfiniteExponent = std::numeric_limits<double>::infinity();

// Per-cube L^time_exponent_t L^2_x norms combined with the same cube weights.
struct MixedNormSpec {
    double time_exponent = 1.0;  // in [1, inf]
    double radius = 0.0;
    double smoothness = 0.0;
    std::optional<std::set<CubeIndex>> cubes;

    void validate() const;
};

[[nodiscard]] double cube_weight(const CubeIndex& k, double radius, double smoothness);

// Spectral L2 norm of every cube, indexed by cube_slot.
[[nodiscard]] std::vector<double> cube_l2_norms(const SpectralField& f);

struct CubeTerm {
    CubeIndex cube;
    double weighted = 0.0;
};

struct NormReport {
    NormSpec spec;
    double value = 0.0;
    std::vector<CubeTerm> per_cube;  // nonzero cubes in slot order
};

[[nodiscard]] double e_norm(const SpectralField& f, const NormSpec& spec);
// Share of the weighted norm carried by the outer 10% of the lattice (sup index).
[[nodiscard]] double weighted_shell_fraction(const SpectralField& f, const NormSpec& spec);
[[nodiscard]] NormReport e_norm_report(const SpectralField& f, const NormSpec& spec);

// Cube norms over time: history[i][slot] = ||box_slot u(t_i)||_2.
class CubeHistory {
public:
    explicit CubeHistory(const TimeSeries& u);

    [[nodiscard]] const GridSpec& grid() const { return grid_; }
    [[nodiscard]] const std::vector<double>& times() const { return times_; }
    [[nodiscard]] double at(std::size_t time_index, std::size_t slot) const {
        return values_[time_index * slots_ + slot];
    }
    [[nodiscard]] std::size_t slots() const { return slots_; }
    [[nodiscard]] bool slot_active(std::size_t slot) const { return active_[slot] != 0; }

    // Time norm of one cube over samples [first, last].
    [[nodiscard]] double time_norm(std::size_t slot, double exponent, std::size_t first, std::size_t last) const;

private:
    GridSpec grid_;
    std::vector<double> times_;
    std::size_t slots_ = 0;
    std::vector<double> values_;
    std::vector<char> active_;
};

[[nodiscard]] double mixed_norm(const TimeSeries& u, const MixedNormSpec& spec);
[[nodiscard]] double mixed_norm(const CubeHistory& h, const MixedNormSpec& spec);
// Same over the samples [first, last].
[[nodiscard]] double mixed_norm_window(const CubeHistory& h, const MixedNormSpec& spec, std::size_t first,
                                       std::size_t last);

// ||box_k f||_{L^q} / ||box_k f||_{L^m} on the period box (q may be infinite).
// Throws std::domain_error when box_k f vanishes.
[[nodiscard]] double bernstein_ratio(const SpectralField& f, const CubeIndex& k, double m, double q);

struct ProductEstimate {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool degenerate = false;  // 0/0: some factor vanishes identically
};

[[nodiscard]] double product_threshold(const ModelParams& params, double smoothness_gain);
[[nodiscard]] double product_threshold(int dim, int power, double smoothness_gain);

// L^1-in-time norm of the product against the product of L^p-in-time norms with
// smoothness raised by `smoothness_gain`. Requires octant supports and the
// smoothness threshold; throws PreconditionError otherwise.
[[nodiscard]] ProductEstimate product_estimate_ratio(std::span<const TimeSeries> factors, double radius,
                                                     double smoothness, double smoothness_gain);

// Sup over radii rho <= box of the octant lattice sum
//   ( sum_{|k| <= rho} <k>^{-2(s + gain)} )^{power - 1} * <rho>^{-2 gain},
// which bounds the cube-interaction count in the product estimate.
[[nodiscard]] double interaction_sum(int power, int dim, double smoothness, double gain, int box);

}  // namespace roughwave
