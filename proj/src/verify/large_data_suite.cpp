#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "roughwave/calibration.hpp"
#include "roughwave/errors.hpp"
#include "roughwave/norms.hpp"
#include "roughwave/propagator.hpp"
#include "roughwave/scaling.hpp"
#include "roughwave/verify.hpp"

namespace roughwave {

namespace {

using json = nlohmann::ordered_json;

constexpr double kRadius = -1.0;
constexpr double kSmoothness = 0.0;
constexpr double kOversize = 10.0;
constexpr double kNuFraction = 0.5;
constexpr double kContraction = 0.5;
constexpr int kMaxIterations = 20;
constexpr double kResidual = 1e-6;
constexpr double kOriginalDefect = 1e-5;
constexpr double kLeakage = 1e-12;
constexpr int kReferenceScale = 2;
constexpr int kMaxBumps = 6;

struct Setup {
    ModelParams params{1.0, 0.0, 2, 1};
    SpectralField u0;
    SpectralField u1;
    ScalingConstants constants;
    double support = 0.0;
    double admissible = 0.0;  // largest data size accepted at the minimal scale
};

// Constants are fitted once on the reference scale and reused for every scale.
Setup calibrate(std::uint64_t seed) {
    Setup s;
    const GridSpec g{1, 4, 16};
    s.u0 = octant_mask(cube_constant(g, make_cube({1}), 1.0), propagation_floor(s.params, 1.0));
    s.u1 = SpectralField(g);
    const GridSpec gr = scaled_grid(g, kReferenceScale);
    const DataPair sd = scale_data(s.u0, s.u1, kReferenceScale, s.params, gr);
    PicardConfig cfg;
    cfg.radius = kRadius;
    cfg.smoothness = kSmoothness;
    const std::vector<double> times = solver_times(s.params, kReferenceScale, gr, cfg);
    const CalibrationSetup cs{s.params,  kReferenceScale, gr, times, kRadius, kSmoothness, kDefaultInvariantFloor,
                              {make_cube({2}), make_cube({3})}, 6, seed, {{sd.position, sd.velocity}}};
    s.constants.linear = fit_linear_constant(cs);
    const ContractionConstants cc = fit_contraction_constants(cs);
    s.constants.product = cc.product;
    s.constants.lipschitz = cc.lipschitz;
    s.support = support_floor_of(s.u0, s.u1);
    s.constants.dilation = fit_dilation_constant(s.params, s.u0, s.u1, kRadius, kSmoothness, s.support, 64);
    const int lo = minimal_scale(s.params, kDefaultInvariantFloor);
    s.admissible = selection_rhs(s.params, s.constants, 1.0, kNuFraction) /
                   selection_lhs(s.params, lo, kRadius, kSmoothness, s.support);
    return s;
}

void end_to_end(SuiteReport& rep, const Setup& s) {
    const ModelParams& p = s.params;
    const double base = data_norm(p, s.u0, s.u1, kRadius, kSmoothness);
    const SpectralField u0 = cplx(kOversize * s.admissible / base) * s.u0;
    const double size = data_norm(p, u0, s.u1, kRadius, kSmoothness);
    const int lo = minimal_scale(p, kDefaultInvariantFloor);

    const json in{{"diffusion_order", p.diffusion_order}, {"damping_order", p.damping_order}, {"power", p.power},
                  {"dim", p.dim},        {"radius", kRadius},    {"smoothness", kSmoothness},
                  {"data_size", size},   {"oversize", kOversize}};
    const double at_minimal = selection_lhs(p, lo, kRadius, kSmoothness, s.support) /
                              selection_rhs(p, s.constants, size, kNuFraction);
    add_case(rep, "data_oversized_at_minimal_scale", in, at_minimal, 1.0, at_minimal > 1.0);

    int lam = select_lambda(size, p, kRadius, kSmoothness, s.constants, s.support, kNuFraction);
    const int selected = lam;
    PicardConfig cfg;
    cfg.radius = kRadius;
    cfg.smoothness = kSmoothness;
    cfg.nu_fraction = kNuFraction;
    cfg.product_constant = s.constants.product;
    cfg.lipschitz_constant = s.constants.lipschitz;
    SolutionRecord rec;
    ScalingPlan plan;
    bool solved = false;
    std::string failure;
    for (int bump = 0; bump <= kMaxBumps && !solved; ++bump, ++lam) {
        plan = make_plan(p, u0, s.u1, lam, kRadius, kSmoothness, s.constants, kNuFraction);
        try {
            rec = picard_solve(p, lam, plan.scaled_u0, plan.scaled_u1, cfg);
            solved = true;
        } catch (const SmallnessError& e) {
            failure = e.what();
        } catch (const std::exception& e) {
            failure = e.what();
            break;
        }
    }
    if (!solved) {
        add_case(rep, "solve_scaled_problem", in, 1.0, 0.0, false, CaseKind::check, failure);
        return;
    }
    lam = plan.lambda;
    rep.fitted_constants["linear"] = s.constants.linear;
    rep.fitted_constants["product"] = s.constants.product;
    rep.fitted_constants["lipschitz"] = s.constants.lipschitz;
    rep.fitted_constants["dilation"] = s.constants.dilation;
    rep.fitted_constants["admissible_data_size"] = s.admissible;

    json lin = in;
    lin["selected"] = selected;
    lin["scale"] = lam;
    add_case(rep, "scale_selected_finite", lin, lam, 1 << 16, lam >= lo && lam < (1 << 16));
    add_upper(rep, "scaled_data_within_budget", lin, plan.scaled_norm, plan.epsilon);

    double worst = 0.0;
    for (double f : rec.contraction_factors) worst = std::max(worst, f);
    add_case(rep, "scaled_contraction", lin, worst, kContraction, rec.converged && worst <= kContraction);
    add_case(rep, "scaled_iterations", lin, rec.iterations, kMaxIterations,
             rec.converged && rec.iterations <= kMaxIterations);
    add_upper(rep, "scaled_mild_residual", lin, rec.residual, kResidual);
    add_upper(rep, "scaled_support_invariance", lin, rec.support_leakage, kLeakage);

    const DescaledSolution ds = descale_solution(rec, lam, p, kRadius, kSmoothness, u0, s.u1);
    add_upper(rep, "original_mild_defect", lin, ds.original_defect.relative, kOriginalDefect);
    const double want = lam * kRadius;
    add_case(rep, "descaled_radius", lin, ds.radius, want, ds.radius == want);

    // At the minimal scale the oversized data exceed the budget.
    const ScalingPlan minimal = make_plan(p, u0, s.u1, lo, kRadius, kSmoothness, s.constants, kNuFraction);
    json bin = in;
    bin["scale"] = lo;
    add_case(rep, "budget_violated_at_minimal_scale", bin, minimal.scaled_norm / minimal.epsilon, 1.0,
             minimal.scaled_norm > minimal.epsilon, CaseKind::negative_control);
}

void small_and_invalid(SuiteReport& rep, const Setup& s) {
    const double size = 1e-3 * s.admissible;
    const int lam = select_lambda(size, s.params, kRadius, kSmoothness, s.constants, s.support, kNuFraction);
    add_case(rep, "small_data_minimal_scale", json{{"data_size", size}}, lam, 2.0, lam == 2);

    bool rejected = false;
    try {
        (void)select_lambda(1.0, s.params, 0.0, kSmoothness, s.constants, s.support, kNuFraction);
    } catch (const PreconditionError&) {
        rejected = true;
    }
    add_case(rep, "zero_radius_rejected", json{{"radius", 0.0}}, rejected ? 1.0 : 0.0, 1.0, rejected,
             CaseKind::negative_control, "large data needs exponential room in the norm");
}

}  // namespace

SuiteReport suite_large_data(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "large_data";
    rep.estimate = "large data made small by scaling, solved, and mapped back";
    rep.seed = opts.seed;
    const Setup s = calibrate(opts.seed);
    end_to_end(rep, s);
    small_and_invalid(rep, s);
    return rep;
}

}  // namespace roughwave
