#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "roughwave/errors.hpp"
#include "roughwave/norms.hpp"
#include "roughwave/random_fields.hpp"
#include "roughwave/verify.hpp"

namespace roughwave {

namespace {

using json = nlohmann::ordered_json;

constexpr double kRadius = -1.0;
constexpr double kRefinementFactor = 2.0;
constexpr double kOracleTol = 1e-12;
constexpr double kSumStable = 0.01;
constexpr double kSumGrowth = 10.0;

std::vector<double> sample_times() { return uniform_times(4.0, 32); }

// Octant field on 1-2 random cubes in [0, 6] with a random decaying profile.
TimeSeries random_factor(const GridSpec& g, Rng& rng) {
    std::uniform_int_distribution<int> count(1, 2);
    std::vector<CubeIndex> cubes;
    const int c = count(rng);
    for (int i = 0; i < c; ++i) cubes.push_back(random_cube(g, 0, 6, rng));
    const SpectralField f = random_octant_field(g, cubes, 0.0, rng);
    std::uniform_real_distribution<double> rate(0.5, 2.0);
    const double a = rate(rng);
    return profiled_series(f, sample_times(), [a](double t) { return std::exp(-a * t); });
}

// Piecewise-constant density on a lattice twice as fine: the same function at higher resolution.
SpectralField refine_density(const SpectralField& f) {
    const GridSpec& g = f.grid();
    const GridSpec fine{g.dim, 2 * g.cells_per_cube, g.cubes_per_axis};
    std::vector<cplx> out(fine.size());
    const auto src = f.coeffs();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] == cplx{}) continue;
        const LatticeIndex m = lattice_index(g, i);
        for (int corner = 0; corner < (1 << g.dim); ++corner) {
            LatticeIndex mf{0, 0, 0};
            for (int d = 0; d < g.dim; ++d) mf[d] = 2 * m[d] + ((corner >> d) & 1);
            std::size_t flat = 0;
            if (flat_index(fine, mf, flat)) out[flat] = src[i];
        }
    }
    SpectralField r(fine, std::move(out));
    if (f.octant_floor()) r = r.with_octant_floor(*f.octant_floor());
    return r;
}

TimeSeries refine_series(const TimeSeries& u) {
    TimeSeries r;
    r.times = u.times;
    for (const auto& f : u.fields) r.fields.push_back(refine_density(f));
    return r;
}

struct RatioPair {
    double coarse = 0.0;
    double fine = 0.0;
};

// Each instance is evaluated at 4 cells per cube and again after refinement to 8.
RatioPair max_ratios(int instances, double smoothness, double gain, Rng& rng) {
    const GridSpec g{1, 4, 32};
    RatioPair best;
    for (int i = 0; i < instances; ++i) {
        const std::vector<TimeSeries> pair{random_factor(g, rng), random_factor(g, rng)};
        const std::vector<TimeSeries> fine{refine_series(pair[0]), refine_series(pair[1])};
        best.coarse = std::max(best.coarse, product_estimate_ratio(pair, kRadius, smoothness, gain).ratio);
        best.fine = std::max(best.fine, product_estimate_ratio(fine, kRadius, smoothness, gain).ratio);
    }
    return best;
}

void refinement(SuiteReport& rep, Rng& rng) {
    struct Item {
        double gain;
        int instances;
    };
    for (const Item it : {Item{1.0, 100}, Item{0.0, 20}, Item{2.0, 20}}) {
        const double s = product_threshold(1, 2, it.gain);
        const RatioPair r = max_ratios(it.instances, s, it.gain, rng);
        const double coarse = r.coarse;
        const double fine = r.fine;
        const std::string tag = "gain" + std::to_string(static_cast<int>(it.gain));
        rep.fitted_constants["product_" + tag + "_cells4"] = coarse;
        rep.fitted_constants["product_" + tag + "_cells8"] = fine;
        const double change = std::max(fine / coarse, coarse / fine);
        json in{{"dim", 1},         {"power", 2},       {"gain", it.gain},   {"smoothness", s},
                {"radius", kRadius}, {"instances", it.instances}, {"cells", {4, 8}}};
        add_case(rep, "refinement_stable_" + tag, in, change, kRefinementFactor,
                 std::isfinite(coarse) && std::isfinite(fine) && coarse > 0.0 && change < kRefinementFactor);
    }
}

// Direct convolution of coefficient densities: (uv)^(xi) = h sum_eta c_u(eta) c_v(xi - eta).
SpectralField direct_product(const SpectralField& u, const SpectralField& v) {
    const GridSpec& g = u.grid();
    const double h = 1.0 / g.cells_per_cube;
    std::vector<cplx> out(g.size());
    const auto a = u.coeffs();
    const auto b = v.coeffs();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == cplx{}) continue;
        const LatticeIndex mi = lattice_index(g, i);
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j] == cplx{}) continue;
            const LatticeIndex mj = lattice_index(g, j);
            std::size_t flat = 0;
            if (flat_index(g, {mi[0] + mj[0], 0, 0}, flat)) out[flat] += h * a[i] * b[j];
        }
    }
    return SpectralField(g, std::move(out));
}

void oracles(SuiteReport& rep, Rng& rng) {
    const GridSpec g{1, 2, 16};
    const std::vector<double> times = uniform_times(1.0, 4);
    const SpectralField f = random_octant_field(g, {make_cube({2})}, 0.0, rng);
    const TimeSeries u = profiled_series(f, times, [](double) { return 1.0; });
    const std::vector<TimeSeries> pair{u, u};
    const double s = 0.0;
    const ProductEstimate pe = product_estimate_ratio(pair, kRadius, s, 1.0);
    const double direct = e_norm(direct_product(f, f), {kRadius, s});  // constant in time on [0, 1]
    add_upper(rep, "two_cube_direct_convolution", json{{"cube", 2}, {"cells", 2}, {"smoothness", s}},
              std::abs(pe.lhs - direct) / direct, kOracleTol);
    rep.fitted_constants["two_cube_ratio"] = pe.ratio;

    const std::vector<TimeSeries> with_zero{u, zero_series(g, times)};
    const ProductEstimate z = product_estimate_ratio(with_zero, kRadius, s, 1.0);
    add_case(rep, "zero_factor", json{{"cube", 2}}, z.lhs + z.ratio, 0.0, z.lhs == 0.0 && z.ratio == 0.0);
}

void interaction_sums(SuiteReport& rep) {
    const int p = 2;
    for (int n : {1, 2}) {
        const double gain = 1.0;
        const int box = n == 1 ? 1024 : 256;
        const std::vector<std::pair<const char*, double>> cases{
            {"at_threshold", product_threshold(n, p, gain)},
            {"at_half_dim_minus_gain", n / 2.0 - gain},
            {"between", n / 2.0 - 0.5 * gain},
            {"at_half_dim", n / 2.0},
            {"above", n / 2.0 + 0.5},
        };
        for (const auto& [label, s] : cases) {
            const double a = interaction_sum(p, n, s, gain, box);
            const double b = interaction_sum(p, n, s, gain, 2 * box);
            const double change = std::abs(b - a) / a;
            rep.fitted_constants[std::string("interaction_sum_") + label + "_" + std::to_string(n) + "d"] = b;
            add_upper(rep, std::string("interaction_sum_stable_") + label + "_" + std::to_string(n) + "d",
                      json{{"dim", n}, {"power", p}, {"gain", gain}, {"smoothness", s}, {"box", box}}, change,
                      kSumStable);
        }
        // No gain and smoothness below n/2: the sum grows without bound.
        const double s = n / 2.0 - 0.5;
        const double small = interaction_sum(p, n, s, 0.0, 16);
        const double large = interaction_sum(p, n, s, 0.0, n == 1 ? 1024 : 256);
        add_case(rep, "interaction_sum_diverges_" + std::to_string(n) + "d",
                 json{{"dim", n}, {"power", p}, {"gain", 0.0}, {"smoothness", s}, {"boxes", {16, n == 1 ? 1024 : 256}}},
                 large / small, kSumGrowth, large / small > kSumGrowth, CaseKind::negative_control,
                 "growth under box enlargement flags divergence");
    }
}

void controls(SuiteReport& rep, Rng& rng) {
    const GridSpec g{1, 4, 32};
    const std::vector<double> times = sample_times();
    const TimeSeries good = random_factor(g, rng);
    const SpectralField off = random_field(g, {make_cube({-3})}, rng);
    const TimeSeries bad = profiled_series(off, times, [](double t) { return std::exp(-t); });
    bool rejected = false;
    try {
        const std::vector<TimeSeries> pair{good, bad};
        (void)product_estimate_ratio(pair, kRadius, product_threshold(1, 2, 1.0), 1.0);
    } catch (const PreconditionError&) {
        rejected = true;
    }
    add_case(rep, "non_octant_rejected", json{{"cube", -3}}, rejected ? 1.0 : 0.0, 1.0, rejected,
             CaseKind::negative_control, "the estimate is claimed only for first-octant supports");

    rejected = false;
    try {
        const std::vector<TimeSeries> pair{good, good};
        (void)product_estimate_ratio(pair, kRadius, product_threshold(1, 2, 1.0) - 0.25, 1.0);
    } catch (const PreconditionError&) {
        rejected = true;
    }
    add_case(rep, "below_threshold_rejected", json{{"smoothness", product_threshold(1, 2, 1.0) - 0.25}},
             rejected ? 1.0 : 0.0, 1.0, rejected, CaseKind::negative_control);
}

}  // namespace

SuiteReport suite_product_estimate(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "product_estimate";
    rep.estimate = "p-linear product estimate for first-octant series and its interaction sum";
    rep.seed = opts.seed;
    Rng rng(opts.seed);
    refinement(rep, rng);
    oracles(rep, rng);
    interaction_sums(rep);
    controls(rep, rng);
    return rep;
}

}  // namespace roughwave
