#include "roughwave/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "roughwave/errors.hpp"

namespace roughwave {

namespace {

constexpr double kSublatticeTol = 1e-12;

void require_factor(int factor) {
    if (factor < 1) throw std::invalid_argument("scale factor must be a positive integer");
}

}  // namespace

double data_scale_exponent(const ModelParams& params) {
    return 2.0 * derived_exponents(params).low_order / (params.power - 1.0);
}

SpectralField relocate(const SpectralField& f, int factor, double amplitude, const GridSpec& target) {
    require_factor(factor);
    if (target.dim != f.grid().dim || target.cells_per_cube != f.grid().cells_per_cube) {
        throw std::invalid_argument("relocation target must share dimension and cell size");
    }
    std::vector<cplx> out(target.size());
    const auto c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == cplx{}) continue;
        LatticeIndex m = lattice_index(f.grid(), i);
        for (int d = 0; d < target.dim; ++d) m[d] *= factor;
        std::size_t flat = 0;
        if (!flat_index(target, m, flat)) throw std::overflow_error("scaled support exceeds the target lattice");
        out[flat] = amplitude * c[i];
    }
    return SpectralField(target, std::move(out));
}

SpectralField unrelocate(const SpectralField& f, int factor, double amplitude, const GridSpec& target) {
    require_factor(factor);
    if (target.dim != f.grid().dim || target.cells_per_cube != f.grid().cells_per_cube) {
        throw std::invalid_argument("relocation target must share dimension and cell size");
    }
    const double top = f.max_abs();
    std::vector<cplx> out(target.size());
    const auto c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == cplx{}) continue;
        LatticeIndex m = lattice_index(f.grid(), i);
        bool on_sublattice = true;
        for (int d = 0; d < target.dim; ++d) {
            if (m[d] % factor != 0) on_sublattice = false;
            m[d] /= factor;
        }
        if (!on_sublattice) {
            if (std::abs(c[i]) > kSublatticeTol * top) {
                throw std::logic_error("support is not on the scale sublattice");
            }
            continue;
        }
        std::size_t flat = 0;
        if (flat_index(target, m, flat)) out[flat] = amplitude * c[i];
    }
    return SpectralField(target, std::move(out));
}

GridSpec scaled_grid(const GridSpec& grid, int factor) {
    require_factor(factor);
    GridSpec g = grid;
    g.cubes_per_axis = next_power_of_two(static_cast<long long>(grid.cubes_per_axis) * factor);
    g.validate();
    return g;
}

DataPair scale_data(const SpectralField& u0, const SpectralField& u1, int scale, const ModelParams& params,
                    const GridSpec& target) {
    const double a = data_scale_exponent(params);
    const double low = derived_exponents(params).low_order;
    const double lam = scale;
    return {relocate(u0, scale, std::pow(lam, a), target), relocate(u1, scale, std::pow(lam, a + low), target)};
}

DataPair scale_data(const SpectralField& u0, const SpectralField& u1, int scale, const ModelParams& params) {
    return scale_data(u0, u1, scale, params, scaled_grid(u0.grid(), scale));
}

DataPair descale_data(const SpectralField& u0, const SpectralField& u1, int scale, const ModelParams& params,
                      const GridSpec& target) {
    const double a = data_scale_exponent(params);
    const double low = derived_exponents(params).low_order;
    const double lam = scale;
    return {unrelocate(u0, scale, std::pow(lam, -a), target),
            unrelocate(u1, scale, std::pow(lam, -a - low), target)};
}

double relocated_norm(const SpectralField& f, int factor, double amplitude, const NormSpec& spec) {
    require_factor(factor);
    spec.validate();
    const GridSpec& g = f.grid();
    std::map<CubeIndex, double> mass;
    const auto c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == cplx{}) continue;
        const LatticeIndex m = lattice_index(g, i);
        CubeIndex k;
        k.dim = g.dim;
        for (int d = 0; d < g.dim; ++d) k.k[d] = floor_div(m[d] * factor, g.cells_per_cube);
        mass[k] += std::norm(c[i]);
    }
    double acc = 0.0;
    for (const auto& [k, m] : mass) {
        const double w = cube_weight(k, spec.radius, spec.smoothness);
        acc += w * w * m * g.cell_volume();
    }
    return std::abs(amplitude) * std::sqrt(acc);
}

GridSpec dilation_grid(const SpectralField& phi, int factor) { return scaled_grid(phi.grid(), factor); }

SpectralField dilate_density(const SpectralField& phi, int factor, const GridSpec& target) {
    require_factor(factor);
    const GridSpec& g = phi.grid();
    if (target.dim != g.dim || target.cells_per_cube != g.cells_per_cube) {
        throw std::invalid_argument("dilation target must share dimension and cell size");
    }
    const double weight = std::pow(static_cast<double>(factor), -g.dim);
    int block = 1;
    for (int d = 0; d < g.dim; ++d) block *= factor;
    std::vector<cplx> out(target.size());
    const auto c = phi.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == cplx{}) continue;
        const LatticeIndex m = lattice_index(g, i);
        for (int q = 0; q < block; ++q) {
            LatticeIndex mm{0, 0, 0};
            int rest = q;
            for (int d = 0; d < g.dim; ++d) {
                mm[d] = m[d] * factor + rest % factor;
                rest /= factor;
            }
            std::size_t flat = 0;
            if (!flat_index(target, mm, flat)) throw std::overflow_error("dilated support exceeds the target lattice");
            out[flat] = weight * c[i];
        }
    }
    return SpectralField(target, std::move(out));
}

double scaling_bound_ratio(const SpectralField& phi, int scale, double radius, double smoothness, double support) {
    require_factor(scale);
    if (!(support > 0.0)) throw std::domain_error("support threshold must be positive");
    if (radius > 0.0) throw std::domain_error("radius must be <= 0");
    const GridSpec& g = phi.grid();
    const auto c = phi.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] != cplx{} && frequency_norm(g, lattice_index(g, i)) < support * (1.0 - 1e-12)) {
            throw PreconditionError("scaling bound needs the spectrum away from the origin");
        }
    }
    const double base = e_norm(phi, {radius, smoothness});
    if (base == 0.0) throw std::domain_error("scaling ratio of the zero field is undefined");
    const SpectralField dil = scale == 1 ? phi : dilate_density(phi, scale, dilation_grid(phi, scale));
    const double lam = scale;
    const double bound = std::pow(lam, -g.dim / 2.0 + std::max(smoothness, 0.0)) *
                         std::exp2(radius * (lam - 1.0) * support);
    return e_norm(dil, {radius, smoothness}) / (bound * base);
}

TimeSeries inverse_dilation(const TimeSeries& g, int scale, const ModelParams& params, const GridSpec& target) {
    g.validate();
    const double stretch = std::pow(static_cast<double>(scale), derived_exponents(params).low_order);
    TimeSeries out;
    out.times.reserve(g.size());
    for (double t : g.times) out.times.push_back(stretch * t);
    for (const auto& f : g.fields) out.fields.push_back(unrelocate(f, scale, 1.0, target));
    return out;
}

double selection_exponent(const ModelParams& params, double smoothness) {
    const DerivedExponents dx = derived_exponents(params);
    const double p = params.power;
    const double k = dx.low_order;
    const double kb = dx.high_order;
    return (3.0 * k - 2.0 * params.damping_order + (kb - k) * p) / (p - 1.0) + std::max(smoothness + kb, k);
}

double selection_lhs(const ModelParams& params, double scale, double radius, double smoothness, double support) {
    return std::exp2(radius * (scale - 1.0) * support) * std::pow(scale, selection_exponent(params, smoothness));
}

double selection_rhs(const ModelParams& params, const ScalingConstants& k, double data_size, double nu_fraction) {
    if (!(data_size > 0.0)) throw std::domain_error("data size must be positive");
    const double q = params.power - 1.0;
    const double base = std::max(2.0 * k.product, 4.0 * k.lipschitz);
    return nu_fraction * std::pow(base, -1.0 / q) / (2.0 * k.linear * k.dilation * data_size);
}

int minimal_scale(const ModelParams& params, double invariant_floor) {
    if (classify(params) == Regime::scale_invariant) {
        return std::max(2, static_cast<int>(std::ceil(1.0 / invariant_floor - 1e-12)));
    }
    return 2;
}

int select_lambda(double data_size, const ModelParams& params, double radius, double smoothness,
                  const ScalingConstants& k, double support, double nu_fraction, double invariant_floor,
                  int max_scale) {
    if (!(radius < 0.0)) {
        throw PreconditionError("scale selection needs a negative radius; nonnegative radii need small data");
    }
    if (!(support > 0.0)) throw std::domain_error("data support floor must be positive");
    const double rhs = selection_rhs(params, k, data_size, nu_fraction);
    for (int lam = minimal_scale(params, invariant_floor); lam <= max_scale; ++lam) {
        if (selection_lhs(params, lam, radius, smoothness, support) <= rhs) return lam;
    }
    throw std::range_error("no admissible scale below the search limit");
}

double fit_dilation_constant(const ModelParams& params, const SpectralField& u0, const SpectralField& u1,
                             double radius, double smoothness, double support, int max_scale) {
    const DerivedExponents dx = derived_exponents(params);
    const double a = data_scale_exponent(params);
    const double e = a + std::max(smoothness + dx.high_order, dx.low_order);
    const double base = data_norm(params, u0, u1, radius, smoothness);
    if (base == 0.0) throw std::domain_error("dilation constant of zero data is undefined");
    double best = 0.0;
    for (int lam = 2; lam <= max_scale; ++lam) {
        const double l = lam;
        const double scaled = relocated_norm(u0, lam, std::pow(l, a), {radius, smoothness + dx.high_order}) +
                              relocated_norm(u1, lam, std::pow(l, a + dx.low_order), {radius, smoothness});
        const double bound = std::pow(l, e) * std::exp2(radius * (l - 1.0) * support) * base;
        best = std::max(best, scaled / bound);
    }
    return best;
}

double support_floor_of(const SpectralField& u0, const SpectralField& u1) {
    double best = std::numeric_limits<double>::infinity();
    for (const SpectralField* f : {&u0, &u1}) {
        const auto c = f->coeffs();
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i] != cplx{}) best = std::min(best, frequency_max_norm(f->grid(), lattice_index(f->grid(), i)));
        }
    }
    if (!std::isfinite(best)) throw std::domain_error("zero data has no support floor");
    return best;
}

ScalingPlan make_plan(const ModelParams& params, const SpectralField& u0, const SpectralField& u1, int lambda,
                      double radius, double smoothness, const ScalingConstants& k, double nu_fraction,
                      double invariant_floor) {
    ScalingPlan plan;
    plan.lambda = lambda;
    plan.selected = lambda;
    plan.constants = k;
    plan.data_support = support_floor_of(u0, u1);
    plan.original_norm = data_norm(params, u0, u1, radius, smoothness);
    DataPair scaled = scale_data(u0, u1, lambda, params);
    plan.scaled_floor = propagation_floor(params, lambda, invariant_floor);
    plan.scaled_u0 = octant_mask(scaled.position, plan.scaled_floor);
    plan.scaled_u1 = octant_mask(scaled.velocity, plan.scaled_floor);
    if (!(plan.scaled_u0.data() == scaled.position.data()) || !(plan.scaled_u1.data() == scaled.velocity.data())) {
        throw PreconditionError("scaled data violates the support condition at this scale");
    }
    plan.scaled_norm = data_norm(params, plan.scaled_u0, plan.scaled_u1, radius, smoothness);
    plan.nu = nu_fraction * nu_bound(params, lambda, k.product, k.lipschitz);
    plan.epsilon = plan.nu / (2.0 * k.linear);
    plan.lhs = selection_lhs(params, lambda, radius, smoothness, plan.data_support);
    plan.rhs = selection_rhs(params, k, plan.original_norm, nu_fraction);
    plan.margin = plan.rhs / plan.lhs;
    plan.radius_after = lambda * radius;
    return plan;
}

DescaledSolution descale_solution(const SolutionRecord& rec, int scale, const ModelParams& params, double radius,
                                  double smoothness, const SpectralField& u0, const SpectralField& u1,
                                  double invariant_floor) {
    require_factor(scale);
    const GridSpec& target = u0.grid();
    const DerivedExponents dx = derived_exponents(params);
    const double lam = scale;
    const double a = data_scale_exponent(params);
    const double stretch = std::pow(lam, dx.low_order);
    DescaledSolution out;
    out.radius = lam * radius;
    for (double t : rec.series.times) {
        out.series.times.push_back(stretch * t);
        out.dt_series.times.push_back(stretch * t);
    }
    for (const auto& f : rec.series.fields) out.series.fields.push_back(unrelocate(f, scale, std::pow(lam, -a), target));
    for (const auto& f : rec.dt_series.fields) {
        out.dt_series.fields.push_back(unrelocate(f, scale, std::pow(lam, -a - dx.low_order), target));
    }
    const double shift = 2.0 * dx.low_order - 2.0 * params.damping_order;
    const CubeHistory h(out.series);
    out.dissipative_norm = mixed_norm(h, {1.0, out.radius, smoothness + shift + dx.high_order, std::nullopt});
    out.energy_norm = mixed_norm(h, {kInfiniteExponent, out.radius, smoothness + dx.high_order, std::nullopt});
    out.original_defect = mild_defect(params, 1.0, u0, u1, out.series,
                                      solution_norm_spec(params, out.radius, smoothness), invariant_floor);
    return out;
}

}  // namespace roughwave
