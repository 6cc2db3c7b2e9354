#include "roughwave/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace roughwave {

namespace {

constexpr double kRegimeTol = 1e-12;

}  // namespace

void ModelParams::validate() const {
    if (!(diffusion_order > 0.0) || !std::isfinite(diffusion_order)) {
        throw std::domain_error("diffusion order must be positive");
    }
    if (!(damping_order >= 0.0) || damping_order > diffusion_order) {
        throw std::domain_error("damping order must lie in [0, diffusion order]");
    }
    if (power < 2) throw std::invalid_argument("power must be an integer >= 2");
    if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
}

std::string ModelParams::describe() const {
    std::ostringstream os;
    os << "sigma=" << diffusion_order << " delta=" << damping_order << " p=" << power << " n=" << dim;
    return os.str();
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::effective:
            return "effective";
        case Regime::scale_invariant:
            return "scale_invariant";
        case Regime::non_effective:
            return "non_effective";
    }
    return "unknown";
}

Regime parse_regime(const std::string& name) {
    if (name == "effective") return Regime::effective;
    if (name == "scale_invariant") return Regime::scale_invariant;
    if (name == "non_effective") return Regime::non_effective;
    throw std::invalid_argument("unknown regime '" + name + "'");
}

Regime classify(const ModelParams& params) {
    const double gap = 2.0 * params.damping_order - params.diffusion_order;
    if (std::abs(gap) <= kRegimeTol * params.diffusion_order) return Regime::scale_invariant;
    return gap < 0.0 ? Regime::effective : Regime::non_effective;
}

DerivedExponents derived_exponents(const ModelParams& params, double invariant_floor) {
    params.validate();
    if (!(invariant_floor > 0.0)) throw std::domain_error("invariant floor must be positive");
    DerivedExponents dx;
    const double twice_damp = 2.0 * params.damping_order;
    const double sigma = params.diffusion_order;
    dx.regime = classify(params);
    if (dx.regime == Regime::scale_invariant) {
        dx.low_order = sigma;
        dx.high_order = sigma;
    } else {
        dx.low_order = std::min(twice_damp, sigma);
        dx.high_order = std::max(twice_damp, sigma);
    }
    switch (dx.regime) {
        case Regime::effective:
            dx.support_floor = std::pow(3.0, -1.0 / (2.0 * sigma - 4.0 * params.damping_order));
            break;
        case Regime::scale_invariant:
            dx.support_floor = invariant_floor;
            break;
        case Regime::non_effective:
            dx.support_floor = std::pow(5.0, 1.0 / (4.0 * params.damping_order - 2.0 * sigma));
            break;
    }
    const double p = params.power;
    dx.critical_smoothness = params.dim / 2.0 -
                             (2.0 * dx.low_order + dx.high_order - twice_damp) / (p - 1.0) - dx.high_order;
    return dx;
}

double scaled_support_floor(const ModelParams& params, const DerivedExponents& dx, double scale) {
    if (scale < 1.0) throw std::domain_error("scale must be >= 1");
    switch (dx.regime) {
        case Regime::effective:
            return std::pow(3.0, -1.0 / (2.0 * params.diffusion_order - 4.0 * params.damping_order)) * scale;
        case Regime::scale_invariant:
            return 1.0;
        case Regime::non_effective:
            return std::pow(5.0, 1.0 / (4.0 * params.damping_order - 2.0 * params.diffusion_order)) * scale;
    }
    return scale;
}

double default_decay_constant(const ModelParams& params) {
    // Effective and scale-invariant modes decay at half the damping symbol; the
    // slow non-effective root decays at least at the full reduced rate.
    const double coefficient = classify(params) == Regime::non_effective ? 1.0 : 0.5;
    return 0.25 * std::min(1.0, coefficient);
}

double default_low_frequency_cutoff(const ModelParams& params) {
    // Half the radius where r^{4 delta} - 4 r^{2 sigma} changes sign at unit scale.
    const double e = 4.0 * params.damping_order - 2.0 * params.diffusion_order;
    if (classify(params) == Regime::scale_invariant) return 0.5;
    return 0.5 * std::pow(4.0, 1.0 / e);
}

}  // namespace roughwave
