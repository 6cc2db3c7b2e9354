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

constexpr int kTuples = 50;
constexpr double kLeakTol = 1e-12;
constexpr double kRoundoff = 1e-12;

struct WindowMass {
    double outside_wide = 0.0;   // cubes with |k - sum|_inf > p + 1
    double outside_tight = 0.0;  // cubes with k - sum outside [0, p - 1]^n
    double inside = 0.0;         // cubes with |k - sum|_inf <= p + 1
};

WindowMass window_mass(const SpectralField& prod, const CubeIndex& sum, int p) {
    const GridSpec& g = prod.grid();
    const auto norms = cube_l2_norms(prod);
    double total = 0.0;
    for (double v : norms) total += v * v;
    total = std::sqrt(total);
    WindowMass w;
    if (total == 0.0) return w;
    for (std::size_t s = 0; s < norms.size(); ++s) {
        if (norms[s] == 0.0) continue;
        const CubeIndex k = cube_from_slot(g, s);
        int wide = 0;
        bool tight = true;
        for (int d = 0; d < g.dim; ++d) {
            const int off = k.k[d] - sum.k[d];
            wide = std::max(wide, std::abs(off));
            if (off < 0 || off > p - 1) tight = false;
        }
        const double rel = norms[s] / total;
        if (wide > p + 1) w.outside_wide = std::max(w.outside_wide, rel);
        else w.inside = std::max(w.inside, rel);
        if (!tight) w.outside_tight = std::max(w.outside_tight, rel);
    }
    return w;
}

CubeIndex cube_sum(const std::vector<CubeIndex>& ks) {
    CubeIndex s = ks.front();
    for (std::size_t j = 1; j < ks.size(); ++j) {
        for (int d = 0; d < s.dim; ++d) s.k[d] += ks[j].k[d];
    }
    return s;
}

void orthogonality(SuiteReport& rep, Rng& rng) {
    double worst_wide = 0.0;
    double worst_tight = 0.0;
    int inside_nonzero = 0;
    for (int i = 0; i < kTuples; ++i) {
        const int p = 2 + i % 2;
        const int n = 1 + (i / 2) % 2;
        const GridSpec g = n == 1 ? GridSpec{1, 4, 32} : GridSpec{2, 2, 16};
        std::vector<CubeIndex> ks;
        std::vector<SpectralField> factors;
        for (int j = 0; j < p; ++j) {
            ks.push_back(random_cube(g, -2, 2, rng));
            factors.push_back(random_field(g, {ks.back()}, rng));
        }
        const SpectralField prod = pointwise_product(factors);
        const WindowMass w = window_mass(prod, cube_sum(ks), p);
        worst_wide = std::max(worst_wide, w.outside_wide);
        worst_tight = std::max(worst_tight, w.outside_tight);
        if (w.inside > kRoundoff) ++inside_nonzero;
    }
    const json in{{"tuples", kTuples}, {"powers", {2, 3}}, {"dims", {1, 2}}};
    add_upper(rep, "outside_window_vanishes", in, worst_wide, kLeakTol);
    add_upper(rep, "support_within_sum_cubes", in, worst_tight, kLeakTol);
    add_case(rep, "inside_window_nonzero", in, inside_nonzero, 1.0, inside_nonzero >= 1);

    // Products computed without padding wrap around the period box.
    const GridSpec g{1, 4, 32};
    const std::vector<CubeIndex> ks{make_cube({12}), make_cube({13})};
    std::vector<SpectralField> factors;
    for (const auto& k : ks) factors.push_back(random_field(g, {k}, rng));
    std::vector<cplx> a = to_physical(factors[0]);
    const std::vector<cplx> b = to_physical(factors[1]);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    const WindowMass aliased = window_mass(from_physical(g, a), cube_sum(ks), 2);
    add_case(rep, "aliased_product_detected", json{{"cubes", {12, 13}}, {"cubes_per_axis", 32}},
             aliased.outside_wide, kLeakTol, aliased.outside_wide > kLeakTol, CaseKind::negative_control,
             "wrapped mass must show up outside the window");

    bool rejected = false;
    try {
        (void)pointwise_product(factors, 1);
    } catch (const AliasingError&) {
        rejected = true;
    }
    add_case(rep, "insufficient_padding_rejected", json{{"padding", 1}, {"degree", 2}}, rejected ? 1.0 : 0.0, 1.0,
             rejected, CaseKind::negative_control);
}

void bernstein(SuiteReport& rep, Rng& rng) {
    for (int n : {1, 2}) {
        const GridSpec g = n == 1 ? GridSpec{1, 4, 16} : GridSpec{2, 4, 8};
        const std::string tag = std::to_string(n) + "d";
        // A single mode has constant modulus: ratio = (box measure)^{-1/2}.
        const double box = std::pow(g.box_period(), n);
        double worst = 0.0;
        for (int m = 0; m < 3 * g.cells_per_cube; m += 3) {
            LatticeIndex idx{m, 0, 0};
            if (n == 2) idx[1] = m / 2;
            const SpectralField f = single_mode(g, idx, cplx(0.7, -0.2));
            const double r = bernstein_ratio(f, cube_of(g, idx), 2.0, HUGE_VAL);
            worst = std::max(worst, std::abs(r * std::sqrt(box) - 1.0));
        }
        add_upper(rep, "single_mode_box_measure_" + tag, json{{"dim", n}}, worst, kRoundoff);

        // Cube-supported fields: |u| <= h^n sum|c| <= (2 pi)^{-n/2} ||u||_2 by Cauchy-Schwarz.
        const double sup_bound = std::pow(2.0 * M_PI, -n / 2.0);
        double sup = 0.0;
        double sup4 = 0.0;
        double modulation_gap = 0.0;
        for (int i = 0; i < 20; ++i) {
            const CubeIndex k = random_cube(g, 0, g.cubes_per_axis / 2 - 2, rng);
            const SpectralField f = random_field(g, {k}, rng);
            const double r = bernstein_ratio(f, k, 2.0, HUGE_VAL);
            sup = std::max(sup, r);
            sup4 = std::max(sup4, bernstein_ratio(f, k, 2.0, 4.0));
            // Moving the same coefficients to the next cube is a modulation.
            CubeIndex next = k;
            next.k[0] += 1;
            std::vector<cplx> shifted(g.size());
            const auto src = f.coeffs();
            for (std::size_t s = 0; s < src.size(); ++s) {
                if (src[s] == cplx{}) continue;
                LatticeIndex m = lattice_index(g, s);
                m[0] += g.cells_per_cube;
                std::size_t flat = 0;
                if (flat_index(g, m, flat)) shifted[flat] = src[s];
            }
            const SpectralField moved(g, std::move(shifted));
            modulation_gap = std::max(modulation_gap, std::abs(bernstein_ratio(moved, next, 2.0, HUGE_VAL) / r - 1.0));
        }
        rep.fitted_constants["bernstein_sup_" + tag] = sup;
        add_upper(rep, "cube_sup_bound_" + tag, json{{"dim", n}, {"m", 2}, {"q", "inf"}}, sup,
                  sup_bound * (1.0 + kRoundoff));
        add_upper(rep, "cube_l4_bound_" + tag, json{{"dim", n}, {"m", 2}, {"q", 4}}, sup4,
                  std::sqrt(sup_bound) * (1.0 + kRoundoff));
        add_upper(rep, "ratio_uniform_in_cube_" + tag, json{{"dim", n}}, modulation_gap, 1e-10);
    }
}

}  // namespace

SuiteReport suite_orthogonality(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "orthogonality";
    rep.estimate = "cube orthogonality of products and the per-cube Bernstein inequality";
    rep.seed = opts.seed;
    Rng rng(opts.seed);
    orthogonality(rep, rng);
    bernstein(rep, rng);
    return rep;
}

}  // namespace roughwave
