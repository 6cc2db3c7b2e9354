#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "roughwave/calibration.hpp"
#include "roughwave/cli.hpp"
#include "roughwave/errors.hpp"
#include "roughwave/field_io.hpp"
#include "roughwave/norms.hpp"
#include "roughwave/propagator.hpp"
#include "roughwave/random_fields.hpp"
#include "roughwave/scaling.hpp"
#include "roughwave/verify.hpp"

namespace roughwave {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kMaxBumps = 6;
constexpr std::size_t kNormCurvePoints = 257;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

CubeIndex diagonal_cube(int dim, int k) {
    CubeIndex c;
    c.dim = dim;
    for (int d = 0; d < dim; ++d) c.k[d] = k;
    return c;
}

int first_cube_above(double floor) { return std::max(1, static_cast<int>(std::ceil(floor))); }

// Unit-amplitude data shape above the support floor of `scale`.
DataPair data_shape(const RunConfig& cfg, const GridSpec& grid, double scale) {
    const double floor = propagation_floor(cfg.model, scale, cfg.invariant_floor);
    const std::string& gen = cfg.data.generator;
    if (gen == "zero") return {SpectralField(grid), SpectralField(grid)};
    if (gen == "file") {
        SpectralField u0 = load_field(cfg.data.position_file);
        SpectralField u1 = cfg.data.velocity_file.empty() ? SpectralField(u0.grid()) : load_field(cfg.data.velocity_file);
        if (u0.grid().dim != cfg.model.dim || !(u1.grid() == u0.grid())) {
            throw PreconditionError("data files do not match model.dim or each other");
        }
        return {octant_mask(u0, floor), octant_mask(u1, floor)};
    }
    SpectralField shape;
    if (gen == "single_cube") {
        CubeIndex k = diagonal_cube(cfg.model.dim, first_cube_above(floor));
        if (!cfg.data.cube.empty()) {
            for (int d = 0; d < cfg.model.dim; ++d) k.k[d] = cfg.data.cube[d];
        }
        if (!cube_in_range(grid, k)) throw PreconditionError("data cube " + k.str() + " lies outside the grid");
        shape = octant_mask(cube_constant(grid, k, 1.0), floor);
    } else {
        Rng rng(cfg.seed);
        const int lo = std::max(cfg.data.cube_lo, first_cube_above(floor));
        const int hi = std::max(cfg.data.cube_hi, lo);
        shape = random_octant_field(grid, octant_cubes(grid, lo, hi), floor, rng);
    }
    if (shape.is_zero()) throw PreconditionError("data shape vanishes above the support floor " + fmt(floor));
    return {shape, cfg.data.with_velocity ? shape : SpectralField(grid)};
}

PicardConfig picard_config(const RunConfig& cfg) {
    PicardConfig pc = cfg.solver;
    pc.radius = cfg.radius;
    pc.smoothness = cfg.smoothness;
    pc.invariant_floor = cfg.invariant_floor;
    return pc;
}

// Fitted constants of the scaled problem, unless fixed in the config.
ScalingConstants fit_constants(const RunConfig& cfg, double scale, const GridSpec& grid, const DataPair& shape) {
    ScalingConstants k;
    const bool need_linear = !cfg.constants.linear;
    const bool need_contraction = !cfg.constants.product || !cfg.constants.lipschitz;
    if (need_linear || need_contraction) {
        const double floor = propagation_floor(cfg.model, scale, cfg.invariant_floor);
        const int first = first_cube_above(floor);
        CalibrationSetup cs{cfg.model,
                            scale,
                            grid,
                            solver_times(cfg.model, scale, grid, picard_config(cfg)),
                            cfg.radius,
                            cfg.smoothness,
                            cfg.invariant_floor,
                            {diagonal_cube(cfg.model.dim, first), diagonal_cube(cfg.model.dim, first + 1)},
                            cfg.calibration_samples,
                            cfg.seed,
                            {}};
        if (!shape.position.is_zero() || !shape.velocity.is_zero()) cs.shapes.push_back({shape.position, shape.velocity});
        if (need_linear) k.linear = fit_linear_constant(cs);
        if (need_contraction) {
            const ContractionConstants cc = fit_contraction_constants(cs);
            k.product = cc.product;
            k.lipschitz = cc.lipschitz;
        }
    }
    if (cfg.constants.linear) k.linear = *cfg.constants.linear;
    if (cfg.constants.product) k.product = *cfg.constants.product;
    if (cfg.constants.lipschitz) k.lipschitz = *cfg.constants.lipschitz;
    if (cfg.constants.dilation) k.dilation = *cfg.constants.dilation;
    return k;
}

json constants_json(const ScalingConstants& k) {
    return json{{"linear", k.linear}, {"product", k.product}, {"lipschitz", k.lipschitz}, {"dilation", k.dilation}};
}

json params_json(const ModelParams& p) {
    return json{{"diffusion_order", p.diffusion_order},
                {"damping_order", p.damping_order},
                {"power", p.power},
                {"dim", p.dim},
                {"regime", regime_name(classify(p))}};
}

std::vector<std::size_t> snapshot_indices(std::size_t n, int count) {
    std::vector<std::size_t> idx;
    if (n == 0 || count <= 0) return idx;
    if (count == 1) return {0};
    for (int i = 0; i < count; ++i) {
        const std::size_t k = static_cast<std::size_t>(std::llround(static_cast<double>(i) * (n - 1) / (count - 1)));
        if (idx.empty() || idx.back() != k) idx.push_back(k);
    }
    return idx;
}

// Writes record.json and field snapshots into `dir`; returns the record JSON.
json persist_record(const fs::path& dir, const RunConfig& cfg, const SolutionRecord& rec, const ScalingConstants& k,
                    double scale) {
    fs::create_directories(dir / "fields");
    const DerivedExponents dx = derived_exponents(cfg.model, cfg.invariant_floor);
    json j;
    j["kind"] = "solution";
    j["params"] = params_json(cfg.model);
    j["grid"] = {{"cells_per_cube", rec.series.empty() ? cfg.grid.cells_per_cube : rec.series.grid().cells_per_cube},
                 {"cubes_per_axis", rec.series.empty() ? cfg.grid.cubes_per_axis : rec.series.grid().cubes_per_axis}};
    j["scale"] = scale;
    j["radius"] = cfg.radius;
    j["smoothness"] = cfg.smoothness;
    j["floor"] = rec.floor;
    j["split_time"] = rec.split_time;
    j["constants"] = constants_json(k);
    j["nu"] = rec.nu;
    j["linear_b_norm"] = rec.linear_b_norm;
    j["b_norm"] = rec.b_norm;
    j["x_norm"] = rec.x_norm;
    j["converged"] = rec.converged;
    j["contraction_ok"] = rec.contraction_ok;
    j["iterations"] = rec.iterations;
    j["residual"] = rec.residual;
    j["max_mode_defect"] = rec.max_mode_defect;
    j["support_leakage"] = rec.support_leakage;
    j["shell_fraction"] = rec.shell_fraction;
    j["norm_history"] = rec.norm_history;
    j["increments"] = rec.increments;
    j["contraction_factors"] = rec.contraction_factors;

    if (!rec.series.empty() && rec.x_norm > 0.0) {
        const RegularityReport reg = regularity_norms(rec, cfg.model, scale, cfg.radius, cfg.smoothness,
                                                      default_decay_constant(cfg.model));
        j["regularity"] = {{"dissipative_norm", reg.dissipative_norm}, {"energy_norm", reg.energy_norm},
                           {"rate_norm", reg.rate_norm},               {"reference", reg.reference},
                           {"tail_dissipative", reg.tail_dissipative}, {"tail_energy", reg.tail_energy},
                           {"head_dissipative", reg.head_dissipative}, {"head_energy", reg.head_energy},
                           {"predicted_tail", reg.predicted_tail}};
    }

    const NormSpec energy{cfg.radius, cfg.smoothness + dx.high_order};
    json curve = json::array();
    const std::size_t n = rec.series.size();
    const std::size_t stride = std::max<std::size_t>(1, (n + kNormCurvePoints - 2) / (kNormCurvePoints - 1));
    for (std::size_t i = 0; i < n; i += stride) {
        curve.push_back({rec.series.times[i], e_norm(rec.series.fields[i], energy)});
    }
    if (n > 0 && (n - 1) % stride != 0) curve.push_back({rec.series.times[n - 1], e_norm(rec.series.fields[n - 1], energy)});
    j["norm_vs_time"] = {{"norm", {{"radius", energy.radius}, {"smoothness", energy.smoothness}}}, {"points", curve}};

    json snaps = json::array();
    const std::string ext = cfg.field_format == "csv" ? ".csv" : ".bin";
    for (std::size_t i : snapshot_indices(n, cfg.snapshots)) {
        char name[32];
        std::snprintf(name, sizeof name, "u_%05zu%s", i, ext.c_str());
        const fs::path rel = fs::path("fields") / name;
        save_field((dir / rel).string(), rec.series.fields[i]);
        snaps.push_back({{"index", i}, {"t", rec.series.times[i]}, {"file", rel.generic_string()}});
    }
    j["snapshots"] = snaps;
    write_json(dir / "record.json", j);
    return j;
}

double linear_ball_norm(const RunConfig& cfg, double scale, const DataPair& d, const PicardConfig& pc) {
    const std::vector<double> times = solver_times(cfg.model, scale, d.position.grid(), pc);
    const LinearEvolution lin = linear_evolve(cfg.model, scale, d.position, d.velocity, times, cfg.invariant_floor);
    return ball_norm_factor(cfg.model, scale) *
           mixed_norm(lin.value, solution_norm_spec(cfg.model, cfg.radius, cfg.smoothness));
}

void explain_smallness(std::ostream& err, const SmallnessError& e, double nu) {
    err << "error: data above the smallness budget\n"
        << "  linear ball norm " << fmt(e.measured()) << " exceeds budget " << fmt(e.budget()) << " (nu = " << fmt(nu)
        << ")\n"
        << "  reduce data.amplitude or data.budget_fraction, or run `scale` to pick a larger lambda\n";
}

// --- report helpers ---

struct KernelCurveKey {
    double diffusion_order, damping_order, scale;
    std::string part;
    auto operator<=>(const KernelCurveKey&) const = default;
};

std::string tag_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void emit_kernel_curves(const fs::path& out, const std::vector<KernelSweepRow>& rows, const std::string& stem,
                        std::vector<std::string>& written) {
    // Decay curves: |kernel| against t at fixed r, with the running sup taken from the right.
    std::map<KernelCurveKey, std::map<double, std::vector<std::pair<double, double>>>> curves;
    std::map<std::tuple<double, double, std::string>, std::map<double, double>> ratios;
    for (const auto& r : rows) {
        const std::string part = kernel_part_name(r.part);
        curves[{r.diffusion_order, r.damping_order, r.scale, part}][r.r].push_back({r.t, std::abs(r.value)});
        double& worst = ratios[{r.diffusion_order, r.damping_order, part}][r.scale];
        worst = std::max(worst, r.ratio);
    }
    for (auto& [key, by_r] : curves) {
        const std::string name = stem + "decay_" + key.part + "_s" + tag_number(key.diffusion_order) + "_d" +
                                 tag_number(key.damping_order) + "_l" + tag_number(key.scale) + ".dat";
        std::ostringstream os;
        os << "# t abs_value envelope  (one block per r)\n";
        for (auto& [r, pts] : by_r) {
            std::sort(pts.begin(), pts.end());
            std::vector<double> env(pts.size());
            double sup = 0.0;
            for (std::size_t i = pts.size(); i-- > 0;) env[i] = sup = std::max(sup, pts[i].second);
            os << "# r " << fmt(r) << '\n';
            for (std::size_t i = 0; i < pts.size(); ++i) {
                os << fmt(pts[i].first) << ' ' << fmt(pts[i].second) << ' ' << fmt(env[i]) << '\n';
            }
            os << "\n\n";
        }
        write_text(out / name, os.str());
        written.push_back(name);
    }
    for (const auto& [key, by_scale] : ratios) {
        const auto& [s, d, part] = key;
        const std::string name =
            stem + "ratio_vs_lambda_" + part + "_s" + tag_number(s) + "_d" + tag_number(d) + ".dat";
        std::ostringstream os;
        os << "# lambda max_ratio\n";
        for (const auto& [lam, v] : by_scale) os << fmt(lam) << ' ' << fmt(v) << '\n';
        write_text(out / name, os.str());
        written.push_back(name);
    }
}

std::string safe_stem(const fs::path& rel) {
    std::string s = rel.parent_path().generic_string();
    for (char& ch : s) {
        if (ch == '/' || ch == '.') ch = '_';
    }
    return s.empty() ? "" : s + "_";
}

struct Row {
    std::string kind, source, status, detail;
};

std::string render_rows(const std::vector<Row>& rows) {
    std::size_t w[3] = {4, 6, 6};
    for (const auto& r : rows) {
        w[0] = std::max(w[0], r.kind.size());
        w[1] = std::max(w[1], r.source.size());
        w[2] = std::max(w[2], r.status.size());
    }
    std::ostringstream os;
    auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
        os << std::left << std::setw(static_cast<int>(w[0])) << a << "  " << std::setw(static_cast<int>(w[1])) << b
           << "  " << std::setw(static_cast<int>(w[2])) << c << "  " << d << '\n';
    };
    line("kind", "source", "status", "detail");
    for (const auto& r : rows) line(r.kind, r.source, r.status, r.detail);
    return os.str();
}

}  // namespace

int cmd_kernels(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<KernelSweepRow> rows;
    try {
        cfg.sweep.validate();
        rows = kernel_sweep(cfg.sweep);
        if (!cfg.regime.empty()) {
            const Regime keep = parse_regime(cfg.regime);
            std::erase_if(rows, [&](const KernelSweepRow& r) { return r.regime != keep; });
        }
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    fs::create_directories(cfg.out);
    const fs::path path = fs::path(cfg.out) / "kernels.csv";
    std::ostringstream csv;
    write_kernel_csv(csv, rows);
    write_text(path, csv.str());
    write_manifest(cfg.out, cfg, "kernels");
    if (rows.empty()) err << "warning: no sweep rows in regime " << cfg.regime << '\n';
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.ratio);
    out << "kernels: " << rows.size() << " rows -> " << path.string() << " (max ratio " << fmt(worst) << ")\n";
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<std::string> names;
    try {
        names = expand_suite_selection(cfg.suite);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const SuiteOptions opts{cfg.seed};
    std::vector<std::function<SuiteReport()>> jobs;
    for (const auto& n : names) jobs.push_back([n, opts] { return run_suite(n, opts); });
    const std::vector<SuiteReport> reports = run_bounded(jobs, cfg.jobs);

    fs::create_directories(cfg.out);
    bool ok = true;
    for (const auto& r : reports) {
        write_json(fs::path(cfg.out) / (r.suite + ".json"), to_json(r));
        ok = ok && r.verdict();
    }
    const std::string table = summary_table(reports);
    write_text(fs::path(cfg.out) / "summary.txt", table);
    write_manifest(cfg.out, cfg, "verify");
    out << table;
    for (const auto& r : reports) {
        if (!r.verdict()) out << '\n' << case_table(r);
    }
    return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const double scale = cfg.lambda.value_or(1);
    PicardConfig pc = picard_config(cfg);
    DataPair data;
    ScalingConstants k;
    double nu = 0.0;
    try {
        const DataPair shape = data_shape(cfg, cfg.grid, scale);
        k = fit_constants(cfg, scale, shape.position.grid(), shape);
        pc.product_constant = k.product;
        pc.lipschitz_constant = k.lipschitz;
        nu = pc.nu_fraction * nu_bound(cfg.model, scale, k.product, k.lipschitz);
        double amp = cfg.data.amplitude;
        if (amp == 0.0 && cfg.data.generator != "zero") {
            amp = cfg.data.budget_fraction * nu / linear_ball_norm(cfg, scale, shape, pc);
        }
        data = {cplx(amp) * shape.position, cplx(amp) * shape.velocity};
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    SolutionRecord rec;
    try {
        rec = picard_solve(cfg.model, scale, data.position, data.velocity, pc);
    } catch (const SmallnessError& e) {
        explain_smallness(err, e, nu);
        return kExitSmallness;
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        err << "error: solver failed: " << e.what() << '\n';
        return kExitSolverFailed;
    }
    persist_record(cfg.out, cfg, rec, k, scale);
    write_manifest(cfg.out, cfg, "solve");
    double worst = 0.0;
    for (double f : rec.contraction_factors) worst = std::max(worst, f);
    out << "solve: scale " << fmt(scale) << ", nu " << fmt(rec.nu) << ", iterations " << rec.iterations
        << ", max contraction " << fmt(worst) << ", residual " << fmt(rec.residual)
        << (rec.converged ? ", converged" : ", NOT converged") << " -> " << cfg.out << '\n';
    return rec.converged ? kExitOk : kExitSolverFailed;
}

int cmd_scale(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!(cfg.radius < 0.0)) {
        err << "error: scale needs norm.radius < 0 (got " << fmt(cfg.radius)
            << "); with radius 0 scaling gives no exponential room\n";
        return kExitUsage;
    }
    const ModelParams& p = cfg.model;
    PicardConfig pc = picard_config(cfg);
    DataPair data;
    ScalingConstants k;
    double admissible = 0.0;
    int lo = 1;
    try {
        const DataPair shape = data_shape(cfg, cfg.grid, 1.0);
        if (shape.position.is_zero() && shape.velocity.is_zero()) {
            err << "error: scale needs nonzero data\n";
            return kExitUsage;
        }
        const int ref = cfg.reference_scale;
        const GridSpec gr = scaled_grid(shape.position.grid(), ref);
        const DataPair sd = scale_data(shape.position, shape.velocity, ref, p, gr);
        k = fit_constants(cfg, ref, gr, sd);
        const double support = support_floor_of(shape.position, shape.velocity);
        if (!cfg.constants.dilation) {
            k.dilation = fit_dilation_constant(p, shape.position, shape.velocity, cfg.radius, cfg.smoothness, support,
                                               cfg.max_scale);
        }
        lo = minimal_scale(p, cfg.invariant_floor);
        admissible = selection_rhs(p, k, 1.0, pc.nu_fraction) / selection_lhs(p, lo, cfg.radius, cfg.smoothness, support);
        double amp = cfg.data.amplitude;
        if (amp == 0.0) amp = cfg.data.oversize * admissible / data_norm(p, shape.position, shape.velocity, cfg.radius, cfg.smoothness);
        data = {cplx(amp) * shape.position, cplx(amp) * shape.velocity};
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    pc.product_constant = k.product;
    pc.lipschitz_constant = k.lipschitz;
    const double size = data_norm(p, data.position, data.velocity, cfg.radius, cfg.smoothness);
    const double support = support_floor_of(data.position, data.velocity);

    ScalingPlan plan;
    SolutionRecord rec;
    int selected = 0;
    try {
        if (cfg.lambda) {
            selected = *cfg.lambda;
            plan = make_plan(p, data.position, data.velocity, selected, cfg.radius, cfg.smoothness, k, pc.nu_fraction,
                             cfg.invariant_floor);
            if (selected < lo || plan.scaled_norm > plan.epsilon) {
                err << "error: lambda " << selected << " is not admissible: scaled data " << fmt(plan.scaled_norm)
                    << " vs budget " << fmt(plan.epsilon) << " (minimal scale " << lo << ")\n";
                return kExitSmallness;
            }
            rec = picard_solve(p, selected, plan.scaled_u0, plan.scaled_u1, pc);
        } else {
            selected = select_lambda(size, p, cfg.radius, cfg.smoothness, k, support, pc.nu_fraction,
                                     cfg.invariant_floor);
            bool solved = false;
            for (int lam = selected, bump = 0; !solved; ++lam, ++bump) {
                plan = make_plan(p, data.position, data.velocity, lam, cfg.radius, cfg.smoothness, k, pc.nu_fraction,
                                 cfg.invariant_floor);
                try {
                    rec = picard_solve(p, lam, plan.scaled_u0, plan.scaled_u1, pc);
                    solved = true;
                } catch (const SmallnessError&) {
                    if (bump == kMaxBumps) throw;
                }
            }
        }
    } catch (const SmallnessError& e) {
        explain_smallness(err, e, plan.nu);
        return kExitSmallness;
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        err << "error: solver failed: " << e.what() << '\n';
        return kExitSolverFailed;
    }

    const DescaledSolution ds =
        descale_solution(rec, plan.lambda, p, cfg.radius, cfg.smoothness, data.position, data.velocity, cfg.invariant_floor);

    const fs::path dir(cfg.out);
    fs::create_directories(dir);
    json pj;
    pj["kind"] = "scaling_plan";
    pj["params"] = params_json(p);
    pj["radius"] = cfg.radius;
    pj["smoothness"] = cfg.smoothness;
    pj["data_size"] = size;
    pj["admissible_at_minimal_scale"] = admissible;
    pj["minimal_scale"] = lo;
    pj["lambda_override"] = cfg.lambda ? json(*cfg.lambda) : json(nullptr);
    pj["selected"] = selected;
    pj["lambda"] = plan.lambda;
    pj["nu"] = plan.nu;
    pj["epsilon"] = plan.epsilon;
    pj["scaled_norm"] = plan.scaled_norm;
    pj["scaled_floor"] = plan.scaled_floor;
    pj["data_support"] = plan.data_support;
    pj["lhs"] = plan.lhs;
    pj["rhs"] = plan.rhs;
    pj["margin"] = plan.margin;
    pj["radius_after"] = plan.radius_after;
    pj["constants"] = constants_json(k);
    pj["descaled"] = {{"radius", ds.radius},
                      {"dissipative_norm", ds.dissipative_norm},
                      {"energy_norm", ds.energy_norm},
                      {"original_defect", ds.original_defect.relative},
                      {"original_max_mode_defect", ds.original_defect.max_mode_relative}};
    write_json(dir / "plan.json", pj);
    persist_record(dir / "scaled", cfg, rec, k, plan.lambda);
    write_manifest(cfg.out, cfg, "scale");

    out << "lambda           " << plan.lambda << (cfg.lambda ? " (override)" : "") << '\n'
        << "nu               " << fmt(plan.nu) << '\n'
        << "epsilon          " << fmt(plan.epsilon) << '\n'
        << "scaled_norm      " << fmt(plan.scaled_norm) << '\n'
        << "margin           " << fmt(plan.margin) << '\n'
        << "radius_after     " << fmt(ds.radius) << '\n'
        << "iterations       " << rec.iterations << '\n'
        << "original_defect  " << fmt(ds.original_defect.relative) << '\n';
    return rec.converged ? kExitOk : kExitSolverFailed;
}

int cmd_report(const std::string& dir_arg, std::ostream& out, std::ostream& err) {
    const fs::path dir(dir_arg);
    std::error_code ec;
    if (dir_arg.empty() || !fs::is_directory(dir, ec)) {
        err << "error: no such directory: " << dir_arg << '\n';
        return kExitUsage;
    }
    const fs::path dest = dir / "report";
    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(dir); it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_directory() && it->path() == dest) {
            it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file()) files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());

    std::vector<Row> rows;
    std::vector<std::string> written;
    std::vector<std::pair<std::string, json>> curves;  // norm_vs_time per record
    std::vector<std::pair<std::string, std::vector<KernelSweepRow>>> sweeps;
    for (const auto& f : files) {
        const fs::path rel = fs::relative(f, dir);
        const std::string name = rel.generic_string();
        if (f.filename() == "kernels.csv") {
            std::ifstream is(f);
            try {
                auto kr = read_kernel_csv(is);
                double worst = 0.0;
                for (const auto& r : kr) worst = std::max(worst, r.ratio);
                rows.push_back({"kernels", name, "ok", std::to_string(kr.size()) + " rows, max ratio " + fmt(worst)});
                sweeps.emplace_back(safe_stem(rel), std::move(kr));
            } catch (const std::exception& e) {
                err << "warning: skipping " << name << ": " << e.what() << '\n';
            }
            continue;
        }
        if (f.extension() != ".json" || f.filename() == "manifest.json") continue;
        json j;
        try {
            std::ifstream is(f);
            j = json::parse(is);
        } catch (const std::exception& e) {
            err << "warning: skipping " << name << ": " << e.what() << '\n';
            continue;
        }
        if (!j.is_object()) continue;
        if (j.contains("suite") && j.contains("cases")) {
            const SuiteReport rep = report_from_json(j);
            std::size_t failed = 0;
            for (const auto& c : rep.cases) failed += c.pass ? 0 : 1;
            rows.push_back({"suite", name, rep.verdict() ? "PASS" : "FAIL",
                            rep.suite + ": " + std::to_string(rep.cases.size()) + " cases, " + std::to_string(failed) +
                                " failed"});
        } else if (j.value("kind", "") == "solution") {
            double worst = 0.0;
            for (double v : j.value("contraction_factors", std::vector<double>{})) worst = std::max(worst, v);
            rows.push_back({"record", name, j.value("converged", false) ? "converged" : "diverged",
                            "scale " + fmt(j.value("scale", 1.0)) + ", iterations " +
                                std::to_string(j.value("iterations", 0)) + ", max contraction " + fmt(worst) +
                                ", residual " + fmt(j.value("residual", 0.0))});
            if (j.contains("norm_vs_time")) curves.emplace_back(safe_stem(rel), j["norm_vs_time"]["points"]);
        } else if (j.value("kind", "") == "scaling_plan") {
            rows.push_back({"plan", name, "ok",
                            "lambda " + std::to_string(j.value("lambda", 0)) + ", margin " + fmt(j.value("margin", 0.0)) +
                                ", original defect " + fmt(j["descaled"].value("original_defect", 0.0))});
        }
    }
    if (rows.empty()) {
        err << "error: no reports, records or kernel sweeps under " << dir_arg << '\n';
        return kExitUsage;
    }

    fs::create_directories(dest);
    for (const auto& [stem, pts] : curves) {
        std::ostringstream os;
        os << "# t energy_norm\n";
        for (const auto& pt : pts) os << fmt(pt[0].get<double>()) << ' ' << fmt(pt[1].get<double>()) << '\n';
        const std::string name = stem + "norm_vs_time.dat";
        write_text(dest / name, os.str());
        written.push_back(name);
    }
    for (const auto& [stem, kr] : sweeps) emit_kernel_curves(dest, kr, stem, written);
    const std::string table = render_rows(rows);
    write_text(dest / "summary.txt", table);
    out << table;
    out << "wrote " << written.size() + 1 << " files to " << dest.string() << '\n';
    return kExitOk;
}

}  // namespace roughwave
