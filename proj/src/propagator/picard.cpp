#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "roughwave/errors.hpp"
#include "roughwave/propagator.hpp"

namespace roughwave {

namespace {

constexpr double kAdmissibleTol = 1e-12;
constexpr int kDivergenceRun = 3;
constexpr double kStopFraction = 0.1;
constexpr double kResolvedIncrement = 1e-13;

TimeSeries power_series(const TimeSeries& u, int power) {
    TimeSeries g;
    g.times = u.times;
    g.fields.reserve(u.size());
    for (const auto& f : u.fields) g.fields.push_back(pointwise_power(f, power));
    return g;
}

TimeSeries add_series(const TimeSeries& a, const TimeSeries& b) {
    TimeSeries s;
    s.times = a.times;
    s.fields.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) s.fields.push_back(a.fields[i] + b.fields[i]);
    return s;
}

double max_coefficient(const TimeSeries& u) {
    double m = 0.0;
    for (const auto& f : u.fields) m = std::max(m, f.max_abs());
    return m;
}

bool all_finite(const TimeSeries& u) {
    for (const auto& f : u.fields) {
        for (const auto& c : f.coeffs()) {
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        }
    }
    return true;
}

std::size_t index_at_or_after(const std::vector<double>& t, double target) {
    const auto it = std::lower_bound(t.begin(), t.end(), target - 1e-12 * std::max(1.0, target));
    return it == t.end() ? t.size() - 1 : static_cast<std::size_t>(it - t.begin());
}

}  // namespace

double propagation_floor(const ModelParams& params, double scale, double invariant_floor) {
    const DerivedExponents dx = derived_exponents(params, invariant_floor);
    return scaled_support_floor(params, dx, scale);
}

void require_admissible(const SpectralField& f, double floor, const char* what) {
    if (octant_leakage(f, floor) > kAdmissibleTol) {
        throw PreconditionError(std::string(what) + " leaves the octant above the support floor");
    }
}

LinearEvolution linear_evolve(const ModelParams& params, double scale, const SpectralField& u0,
                              const SpectralField& u1, const std::vector<double>& times, double invariant_floor) {
    if (!(u0.grid() == u1.grid())) throw std::invalid_argument("initial data on different grids");
    if (times.empty()) throw std::invalid_argument("no output times");
    const double floor = propagation_floor(params, scale, invariant_floor);
    require_admissible(u0, floor, "initial position");
    require_admissible(u1, floor, "initial velocity");

    const GridSpec& g = u0.grid();
    const std::size_t nt = times.size();
    std::vector<std::vector<cplx>> value(nt, std::vector<cplx>(g.size()));
    std::vector<std::vector<cplx>> rate(nt, std::vector<cplx>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx a = u0.data()[i];
        const cplx b = u1.data()[i];
        if (a == cplx{} && b == cplx{}) continue;
        const double r = frequency_norm(g, lattice_index(g, i));
        for (std::size_t j = 0; j < nt; ++j) {
            const KernelValue kv = kernel_eval(params, scale, r, times[j]);
            value[j][i] = kv.pos * a + kv.vel * b;
            rate[j][i] = kv.dpos * a + kv.dvel * b;
        }
    }
    LinearEvolution out;
    out.value.times = times;
    out.rate.times = times;
    for (std::size_t j = 0; j < nt; ++j) {
        out.value.fields.emplace_back(g, std::move(value[j]));
        out.rate.fields.emplace_back(g, std::move(rate[j]));
    }
    return out;
}

double nonlinear_scale_exponent(const ModelParams& params) {
    const DerivedExponents dx = derived_exponents(params);
    return dx.low_order - 2.0 * params.damping_order + (dx.high_order - dx.low_order) * params.power;
}

double nu_bound(const ModelParams& params, double scale, double product_constant, double lipschitz_constant) {
    if (scale < 1.0) throw std::domain_error("scale must be >= 1");
    if (!(product_constant > 0.0) || !(lipschitz_constant > 0.0)) {
        throw std::domain_error("contraction constants must be positive");
    }
    const double q = params.power - 1.0;
    const double base = std::max(2.0 * product_constant, 4.0 * lipschitz_constant);
    return std::pow(base, -1.0 / q) * std::pow(scale, -nonlinear_scale_exponent(params) / q);
}

MixedNormSpec solution_norm_spec(const ModelParams& params, double radius, double smoothness) {
    const DerivedExponents dx = derived_exponents(params);
    const double p = params.power;
    MixedNormSpec spec;
    spec.time_exponent = p;
    spec.radius = radius;
    spec.smoothness = smoothness + (2.0 * dx.low_order - 2.0 * params.damping_order) / p + dx.high_order;
    return spec;
}

double ball_norm_factor(const ModelParams& params, double scale) {
    const DerivedExponents dx = derived_exponents(params);
    const double p = params.power;
    return std::pow(scale, (2.0 * params.damping_order - dx.low_order) / p + dx.low_order - dx.high_order);
}

double slowest_decay_rate(const ModelParams& params, double scale, const GridSpec& grid, double floor) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const LatticeIndex m = lattice_index(grid, i);
        if (!in_admissible_set(grid, m, floor)) continue;
        const double r = frequency_norm(grid, m);
        if (!(r > 0.0)) continue;
        worst = std::max(worst, characteristic_roots(params, scale, r).slow.real());
    }
    if (!std::isfinite(worst)) throw PreconditionError("grid has no admissible modes above the support floor");
    return worst;
}

double decay_horizon(const ModelParams& params, double scale, const GridSpec& grid, double floor, double target) {
    if (!(target > 0.0 && target < 1.0)) throw std::domain_error("decay target must lie in (0, 1)");
    const double rate = slowest_decay_rate(params, scale, grid, floor);
    if (!(rate < 0.0)) throw PreconditionError("admissible modes do not decay");
    return std::log(1.0 / target) / -rate;
}

void PicardConfig::validate() const {
    if (t_final < 0.0) throw std::domain_error("t_final must be nonnegative");
    if (!(time_step > 0.0)) throw std::domain_error("time_step must be positive");
    if (max_iter < 1) throw std::domain_error("max_iter must be positive");
    if (!(contraction_tol > 0.0 && contraction_tol < 1.0)) throw std::domain_error("contraction_tol must be in (0,1)");
    if (!(residual_tol > 0.0)) throw std::domain_error("residual_tol must be positive");
    if (!(nu_fraction > 0.0 && nu_fraction <= 1.0)) throw std::domain_error("nu_fraction must be in (0,1]");
    if (!(overflow_tol > 0.0)) throw std::domain_error("overflow_tol must be positive");
    if (radius > 0.0) throw std::domain_error("radius must be <= 0");
}

std::vector<double> solver_times(const ModelParams& params, double scale, const GridSpec& grid,
                                 const PicardConfig& cfg, double* split_time) {
    double total = cfg.t_final;
    double split = 0.5 * cfg.t_final;
    if (total == 0.0) {
        split = decay_horizon(params, scale, grid, propagation_floor(params, scale, cfg.invariant_floor));
        total = 2.0 * split;
    }
    const int steps = static_cast<int>(std::ceil(total / cfg.time_step - 1e-9));
    if (split_time) *split_time = split;
    return uniform_times(total, std::max(steps, 1));
}

MildDefect mild_defect(const ModelParams& params, double scale, const SpectralField& u0, const SpectralField& u1,
                       const TimeSeries& u, const MixedNormSpec& norm, double invariant_floor) {
    u.validate();
    const double floor = propagation_floor(params, scale, invariant_floor);
    const LinearEvolution lin = linear_evolve(params, scale, u0, u1, u.times, invariant_floor);
    const DuhamelIntegrator integ(params, scale, u.grid(), u.times, floor);
    TimeSeries g = power_series(u, params.power);
    for (auto& f : g.fields) f = octant_mask(f, floor);
    const TimeSeries image = add_series(lin.value, integ.apply(g, false).value);
    const TimeSeries defect = series_difference(u, image);
    MildDefect out;
    const double base = mixed_norm(u, norm);
    const double d = mixed_norm(defect, norm);
    out.relative = base > 0.0 ? d / base : d;
    const double top = max_coefficient(u);
    const double worst = max_coefficient(defect);
    out.max_mode_relative = top > 0.0 ? worst / top : worst;
    return out;
}

SolutionRecord picard_solve(const ModelParams& params, double scale, const SpectralField& u0,
                            const SpectralField& u1, const PicardConfig& cfg) {
    cfg.validate();
    params.validate();
    if (!(u0.grid() == u1.grid())) throw std::invalid_argument("initial data on different grids");
    const GridSpec grid = u0.grid();
    const double floor = propagation_floor(params, scale, cfg.invariant_floor);
    require_admissible(u0, floor, "initial position");
    require_admissible(u1, floor, "initial velocity");

    SolutionRecord rec;
    rec.scale = scale;
    rec.floor = floor;
    const std::vector<double> times = solver_times(params, scale, grid, cfg, &rec.split_time);
    const MixedNormSpec xspec = solution_norm_spec(params, cfg.radius, cfg.smoothness);
    const double bfac = ball_norm_factor(params, scale);

    const LinearEvolution lin = linear_evolve(params, scale, u0, u1, times, cfg.invariant_floor);
    rec.linear_b_norm = bfac * mixed_norm(lin.value, xspec);
    rec.nu = cfg.nu_fraction * nu_bound(params, scale, cfg.product_constant, cfg.lipschitz_constant);
    if (cfg.enforce_smallness && rec.linear_b_norm > 0.5 * rec.nu * (1.0 + 1e-12)) {
        throw SmallnessError(rec.linear_b_norm, rec.nu);
    }

    const NormSpec shell_spec{cfg.radius, xspec.smoothness};
    const DuhamelIntegrator integ(params, scale, grid, times, floor);
    auto nonlinear_image = [&](const TimeSeries& u, bool with_rate) {
        TimeSeries g = power_series(u, params.power);
        for (auto& f : g.fields) {
            rec.support_leakage = std::max(rec.support_leakage, octant_leakage(f, floor));
            f = octant_mask(f, floor);
        }
        return integ.apply(g, with_rate);
    };

    TimeSeries u = cfg.start_from_zero ? zero_series(grid, times) : lin.value;
    int over_one = 0;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        TimeSeries next = cfg.nonlinear ? add_series(lin.value, nonlinear_image(u, false).value) : lin.value;
        if (!all_finite(next)) throw DivergenceError("iterate became non-finite", it);
        const TimeSeries diff = series_difference(next, u);
        const double inc = mixed_norm(diff, xspec);
        const double size = mixed_norm(next, xspec);
        const double sup_inc = max_coefficient(diff);
        const double sup_size = max_coefficient(next);
        rec.norm_history.push_back(size);
        rec.increments.push_back(inc);
        if (rec.increments.size() >= 2) {
            const double prev = rec.increments[rec.increments.size() - 2];
            // Increments at roundoff level carry no contraction information.
            const double factor = prev > kResolvedIncrement * size ? inc / prev : 0.0;
            rec.contraction_factors.push_back(factor);
            over_one = factor > 1.0 ? over_one + 1 : 0;
            if (over_one >= kDivergenceRun) {
                throw DivergenceError("contraction factor above 1 for three consecutive iterations", it);
            }
        }
        for (const auto& f : next.fields) {
            rec.shell_fraction = std::max(rec.shell_fraction, weighted_shell_fraction(f, shell_spec));
        }
        if (rec.shell_fraction > cfg.overflow_tol) throw SpectralOverflowError(rec.shell_fraction, cfg.overflow_tol);
        u = std::move(next);
        rec.iterations = it;
        if (inc <= kStopFraction * cfg.residual_tol * size && sup_inc <= kStopFraction * cfg.residual_tol * sup_size) {
            rec.converged = true;
            break;
        }
    }

    const DuhamelResult last = cfg.nonlinear ? nonlinear_image(u, true) : DuhamelResult{};
    rec.x_norm = mixed_norm(u, xspec);
    rec.b_norm = bfac * rec.x_norm;
    if (cfg.nonlinear) {
        const TimeSeries image = add_series(lin.value, last.value);
        const TimeSeries defect = series_difference(u, image);
        const double d = mixed_norm(defect, xspec);
        rec.residual = rec.x_norm > 0.0 ? d / rec.x_norm : d;
        const double top = max_coefficient(u);
        rec.max_mode_defect = top > 0.0 ? max_coefficient(defect) / top : max_coefficient(defect);
        rec.dt_series = add_series(lin.rate, last.rate);
    } else {
        rec.dt_series = lin.rate;
    }
    rec.series = std::move(u);
    rec.contraction_ok = std::all_of(rec.contraction_factors.begin(), rec.contraction_factors.end(),
                                     [&](double f) { return f <= cfg.contraction_tol; });
    return rec;
}

RegularityReport regularity_norms(const SolutionRecord& rec, const ModelParams& params, double scale, double radius,
                                  double smoothness, double decay_constant) {
    const DerivedExponents dx = derived_exponents(params);
    const double shift = 2.0 * dx.low_order - 2.0 * params.damping_order;
    const MixedNormSpec diss{1.0, radius, smoothness + shift + dx.high_order, std::nullopt};
    const MixedNormSpec energy{kInfiniteExponent, radius, smoothness + dx.high_order, std::nullopt};
    const MixedNormSpec rate{kInfiniteExponent, radius, smoothness, std::nullopt};

    RegularityReport out;
    out.reference = std::pow(scale, dx.high_order - dx.low_order) * rec.nu;
    if (rec.series.empty()) return out;
    const CubeHistory hu(rec.series);
    const CubeHistory hr(rec.dt_series);
    out.dissipative_norm = mixed_norm(hu, diss);
    out.energy_norm = mixed_norm(hu, energy);
    out.rate_norm = mixed_norm(hr, rate);

    const std::size_t last = rec.series.size() - 1;
    const std::size_t split = index_at_or_after(rec.series.times, rec.split_time);
    if (split > 0 && split < last) {
        out.head_dissipative = mixed_norm_window(hu, diss, 0, split);
        out.head_energy = mixed_norm_window(hu, energy, 0, split);
        out.tail_dissipative = mixed_norm_window(hu, diss, split, last);
        out.tail_energy = mixed_norm_window(hu, energy, split, last);
    }
    const double rate_coeff = std::pow(scale, 2.0 * params.damping_order - dx.low_order) *
                              std::pow(rec.floor, shift);
    out.predicted_tail = std::exp(-decay_constant * rate_coeff * rec.series.times[split]);
    return out;
}

}  // namespace roughwave
