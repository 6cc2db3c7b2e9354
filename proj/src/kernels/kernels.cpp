#include "roughwave/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "roughwave/errors.hpp"

namespace roughwave {

namespace {

using cd = std::complex<double>;

constexpr double kDegenerateRelGap = 1e-6;
constexpr double kSeriesGap = 0.5;
constexpr double kFloorSlack = 1e-12;

double majorant_log(double scale, double r, const Majorant& m, double c, double t) {
    return m.scale_power * std::log(scale) + m.r_power * std::log(r) - c * m.rate * t;
}

double ratio_from_logs(double abs_value, double log_majorant) {
    if (abs_value == 0.0) return 0.0;
    return std::exp(std::log(abs_value) - log_majorant);
}

const cd& pick(const KernelValue& kv, KernelPart part) {
    switch (part) {
        case KernelPart::pos:
            return kv.pos;
        case KernelPart::vel:
            return kv.vel;
        case KernelPart::dpos:
            return kv.dpos;
        case KernelPart::dvel:
            return kv.dvel;
    }
    return kv.pos;
}

}  // namespace

const char* kernel_part_name(KernelPart part) {
    switch (part) {
        case KernelPart::pos:
            return "pos";
        case KernelPart::vel:
            return "vel";
        case KernelPart::dpos:
            return "dpos";
        case KernelPart::dvel:
            return "dvel";
    }
    return "unknown";
}

KernelPart parse_kernel_part(const std::string& name) {
    if (name == "pos") return KernelPart::pos;
    if (name == "vel") return KernelPart::vel;
    if (name == "dpos") return KernelPart::dpos;
    if (name == "dvel") return KernelPart::dvel;
    throw std::invalid_argument("unknown kernel part '" + name + "'");
}

ModeCoefficients mode_coefficients(const ModelParams& params, double scale, double r) {
    if (!(r > 0.0)) throw std::domain_error("frequency radius must be positive");
    if (scale < 1.0) throw std::domain_error("scale must be >= 1");
    const DerivedExponents dx = derived_exponents(params);
    const double twice_damp = 2.0 * params.damping_order;
    const double sigma = params.diffusion_order;
    ModeCoefficients mc;
    mc.damping = std::pow(scale, dx.low_order - twice_damp) * std::pow(r, twice_damp);
    mc.stiffness = std::pow(scale, 2.0 * dx.low_order - 2.0 * sigma) * std::pow(r, 2.0 * sigma);
    return mc;
}

CharacteristicRoots roots_of(const ModeCoefficients& mc) {
    const double a = mc.damping;
    const double b = mc.stiffness;
    const double disc = a * a - 4.0 * b;
    CharacteristicRoots roots;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        roots.fast = cd(-(a + sq) / 2.0, 0.0);
        // Product of roots is b; avoids cancellation in -a + sq.
        roots.slow = (a + sq) > 0.0 ? cd(-2.0 * b / (a + sq), 0.0) : cd(0.0, 0.0);
    } else {
        const double im = std::sqrt(-disc) / 2.0;
        roots.slow = cd(-a / 2.0, im);
        roots.fast = cd(-a / 2.0, -im);
    }
    return roots;
}

CharacteristicRoots characteristic_roots(const ModelParams& params, double scale, double r) {
    return roots_of(mode_coefficients(params, scale, r));
}

cd phi1(cd z) {
    if (std::abs(z) < 1.0) {
        cd term(1.0, 0.0);
        cd sum(1.0, 0.0);
        for (int k = 1; k < 30; ++k) {
            term *= z / static_cast<double>(k + 1);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

KernelValue kernel_from_roots(const CharacteristicRoots& roots, const ModeCoefficients& mc, double t) {
    if (t < 0.0) throw std::domain_error("time must be nonnegative");
    const cd s = roots.slow;
    const cd f = roots.fast;
    const cd gap = s - f;
    KernelValue kv;
    if (std::abs(gap) * t <= kSeriesGap || std::abs(gap) < kDegenerateRelGap * std::abs(s)) {
        // Divided-difference form: vel = t e^{f t} phi1(gap t).
        const cd ef = std::exp(f * t);
        const cd dd = t * phi1(gap * t);
        kv.vel = ef * dd;
        kv.pos = ef * (1.0 - f * dd);
        kv.dvel = ef * (1.0 + s * dd);
    } else {
        const cd es = std::exp(s * t);
        const cd ef = std::exp(f * t);
        kv.vel = (es - ef) / gap;
        kv.pos = (s * ef - f * es) / gap;
        kv.dvel = (s * es - f * ef) / gap;
    }
    kv.dpos = -mc.stiffness * kv.vel;
    return kv;
}

KernelValue kernel_eval(const ModelParams& params, double scale, double r, double t) {
    if (t < 0.0) throw std::domain_error("time must be nonnegative");
    const ModeCoefficients mc = mode_coefficients(params, scale, r);
    if (classify(params) != Regime::scale_invariant) return kernel_from_roots(roots_of(mc), mc, t);

    // Closed form: roots are damping * (-1 +- i sqrt 3) / 2 independently of the scale.
    const double rho = mc.damping;
    const double w = std::sqrt(3.0) / 2.0 * rho * t;
    const double env = std::exp(-rho * t / 2.0);
    KernelValue kv;
    kv.pos = (std::cos(w) + std::sin(w) / std::sqrt(3.0)) * env;
    kv.vel = 2.0 / std::sqrt(3.0) * std::sin(w) / rho * env;
    kv.dpos = -mc.stiffness * kv.vel;
    kv.dvel = kv.pos - mc.damping * kv.vel;
    return kv;
}

Majorant pointwise_majorant(const ModelParams& params, double scale, double r, KernelPart part) {
    const DerivedExponents dx = derived_exponents(params);
    const double twice_damp = 2.0 * params.damping_order;
    const double sigma = params.diffusion_order;
    Majorant m;
    m.rate = std::pow(scale, twice_damp - dx.low_order) * std::pow(r, 2.0 * dx.low_order - twice_damp);
    switch (part) {
        case KernelPart::pos:
            break;
        case KernelPart::dpos:
            m.scale_power = twice_damp - sigma;
            m.r_power = 2.0 * sigma - dx.high_order;
            break;
        case KernelPart::vel:
            m.scale_power = dx.high_order - dx.low_order;
            m.r_power = -dx.high_order;
            break;
        case KernelPart::dvel:
            break;
    }
    return m;
}

double pointwise_bound_ratio(const ModelParams& params, double scale, double r, double t, KernelPart part,
                             double decay_constant) {
    if (!(decay_constant > 0.0)) throw std::domain_error("decay constant must be positive");
    const DerivedExponents dx = derived_exponents(params);
    const double floor = scaled_support_floor(params, dx, scale);
    if (r < floor * (1.0 - kFloorSlack)) {
        throw PreconditionError("pointwise bounds are only claimed for r >= the scaled support floor");
    }
    const KernelValue kv = kernel_eval(params, scale, r, t);
    const Majorant m = pointwise_majorant(params, scale, r, part);
    return ratio_from_logs(std::abs(pick(kv, part)), majorant_log(scale, r, m, decay_constant, t));
}

double low_frequency_bound_ratio(const ModelParams& params, double r, double t, KernelPart part,
                                 double decay_constant, double cutoff, LowFrequencyMajorant variant) {
    if (!(r > 0.0) || r > cutoff) throw PreconditionError("low-frequency bounds need 0 < r <= cutoff");
    if (!(decay_constant > 0.0)) throw std::domain_error("decay constant must be positive");
    const DerivedExponents dx = derived_exponents(params);
    const KernelValue kv = kernel_eval(params, 1.0, r, t);
    const double rate = std::pow(r, 2.0 * dx.high_order - 2.0 * params.damping_order);
    const double log_decay = -decay_constant * rate * t;
    switch (part) {
        case KernelPart::pos:
            return ratio_from_logs(std::abs(kv.pos), log_decay);
        case KernelPart::vel: {
            const double inv = std::pow(r, -dx.low_order);
            double prefactor = 0.0;
            switch (variant) {
                case LowFrequencyMajorant::inverse_power:
                    prefactor = inv;
                    break;
                case LowFrequencyMajorant::time:
                    prefactor = t;
                    break;
                case LowFrequencyMajorant::minimum:
                    prefactor = std::min(inv, t);
                    break;
            }
            if (std::abs(kv.vel) == 0.0) return 0.0;
            if (prefactor == 0.0) return std::numeric_limits<double>::infinity();
            return ratio_from_logs(std::abs(kv.vel), std::log(prefactor) + log_decay);
        }
        default:
            throw std::invalid_argument("low-frequency bounds are stated for pos and vel only");
    }
}

}  // namespace roughwave
