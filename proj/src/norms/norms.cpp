#include "roughwave/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "roughwave/errors.hpp"

namespace roughwave {

namespace {

constexpr double kLeakageTol = 1e-12;
constexpr double kThresholdSlack = 1e-12;

double weighted_sum(const std::vector<double>& cube_norms, const GridSpec& g, double radius, double smoothness,
                    const std::optional<std::set<CubeIndex>>& cubes) {
    double acc = 0.0;
    for (std::size_t s = 0; s < cube_norms.size(); ++s) {
        if (cube_norms[s] == 0.0) continue;
        const CubeIndex k = cube_from_slot(g, s);
        if (cubes && !cubes->contains(k)) continue;
        const double w = cube_weight(k, radius, smoothness) * cube_norms[s];
        acc += w * w;
    }
    return std::sqrt(acc);
}

}  // namespace

void NormSpec::validate() const {
    if (radius > 0.0) throw std::domain_error("only radius <= 0 is supported");
    if (!std::isfinite(smoothness)) throw std::domain_error("smoothness must be finite");
}

void MixedNormSpec::validate() const {
    if (!(time_exponent >= 1.0)) throw std::domain_error("time exponent must be >= 1");
    if (radius > 0.0) throw std::domain_error("only radius <= 0 is supported");
}

double cube_weight(const CubeIndex& k, double radius, double smoothness) {
    const double len = k.norm();
    return std::pow(1.0 + len * len, smoothness / 2.0) * std::exp2(radius * len);
}

std::vector<double> cube_l2_norms(const SpectralField& f) {
    const GridSpec& g = f.grid();
    std::vector<double> mass(g.cube_count(), 0.0);
    const auto c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double a = std::norm(c[i]);
        if (a == 0.0) continue;
        mass[cube_slot(g, cube_of(g, lattice_index(g, i)))] += a;
    }
    const double h = g.cell_volume();
    for (auto& m : mass) m = std::sqrt(m * h);
    return mass;
}

double e_norm(const SpectralField& f, const NormSpec& spec) {
    spec.validate();
    return weighted_sum(cube_l2_norms(f), f.grid(), spec.radius, spec.smoothness, std::nullopt);
}

double weighted_shell_fraction(const SpectralField& f, const NormSpec& spec) {
    spec.validate();
    const GridSpec& g = f.grid();
    const int half = g.points_per_axis() / 2;
    const int edge = static_cast<int>(std::ceil(0.9 * half));
    double shell = 0.0;
    double total = 0.0;
    const auto c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == cplx{}) continue;
        const LatticeIndex m = lattice_index(g, i);
        const double w = cube_weight(cube_of(g, m), spec.radius, spec.smoothness);
        const double a = w * w * std::norm(c[i]);
        total += a;
        int mx = 0;
        for (int d = 0; d < g.dim; ++d) mx = std::max(mx, std::abs(m[d]));
        if (mx >= edge) shell += a;
    }
    return total > 0.0 ? std::sqrt(shell / total) : 0.0;
}

NormReport e_norm_report(const SpectralField& f, const NormSpec& spec) {
    spec.validate();
    NormReport rep;
    rep.spec = spec;
    const auto norms = cube_l2_norms(f);
    double acc = 0.0;
    for (std::size_t s = 0; s < norms.size(); ++s) {
        if (norms[s] == 0.0) continue;
        const CubeIndex k = cube_from_slot(f.grid(), s);
        const double w = cube_weight(k, spec.radius, spec.smoothness) * norms[s];
        rep.per_cube.push_back({k, w});
        acc += w * w;
    }
    rep.value = std::sqrt(acc);
    return rep;
}

CubeHistory::CubeHistory(const TimeSeries& u) {
    u.validate();
    grid_ = u.grid();
    times_ = u.times;
    slots_ = grid_.cube_count();
    values_.assign(times_.size() * slots_, 0.0);
    active_.assign(slots_, 0);
    for (std::size_t i = 0; i < times_.size(); ++i) {
        const auto norms = cube_l2_norms(u.fields[i]);
        for (std::size_t s = 0; s < slots_; ++s) {
            values_[i * slots_ + s] = norms[s];
            if (norms[s] != 0.0) active_[s] = 1;
        }
    }
}

double CubeHistory::time_norm(std::size_t slot, double exponent, std::size_t first, std::size_t last) const {
    if (std::isinf(exponent)) {
        double v = 0.0;
        for (std::size_t i = first; i <= last; ++i) v = std::max(v, at(i, slot));
        return v;
    }
    if (first == last) return 0.0;
    double acc = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        const double dt = times_[i + 1] - times_[i];
        acc += 0.5 * dt * (std::pow(at(i, slot), exponent) + std::pow(at(i + 1, slot), exponent));
    }
    return std::pow(acc, 1.0 / exponent);
}

double mixed_norm_window(const CubeHistory& h, const MixedNormSpec& spec, std::size_t first, std::size_t last) {
    spec.validate();
    if (first > last || last >= h.times().size()) throw std::out_of_range("time window outside history");
    std::vector<double> per_cube(h.slots(), 0.0);
    for (std::size_t s = 0; s < h.slots(); ++s) {
        if (h.slot_active(s)) per_cube[s] = h.time_norm(s, spec.time_exponent, first, last);
    }
    return weighted_sum(per_cube, h.grid(), spec.radius, spec.smoothness, spec.cubes);
}

double mixed_norm(const CubeHistory& h, const MixedNormSpec& spec) {
    return mixed_norm_window(h, spec, 0, h.times().size() - 1);
}

double mixed_norm(const TimeSeries& u, const MixedNormSpec& spec) {
    if (u.empty()) throw std::invalid_argument("mixed norm of an empty series");
    return mixed_norm(CubeHistory(u), spec);
}

double bernstein_ratio(const SpectralField& f, const CubeIndex& k, double m, double q) {
    if (!(m > 1.0) || q < m) throw std::domain_error("need 1 < m <= q");
    const SpectralField piece = decompose(f, k);
    if (piece.is_zero()) throw std::domain_error("cube component vanishes; ratio undefined");
    const auto samples = to_physical(piece);
    const GridSpec& g = f.grid();
    const double cell = std::pow(g.box_period() / g.points_per_axis(), g.dim);
    auto lebesgue = [&](double e) {
        if (std::isinf(e)) {
            double v = 0.0;
            for (const auto& x : samples) v = std::max(v, std::abs(x));
            return v;
        }
        double acc = 0.0;
        for (const auto& x : samples) acc += std::pow(std::abs(x), e);
        return std::pow(acc * cell, 1.0 / e);
    };
    return lebesgue(q) / lebesgue(m);
}

double product_threshold(int dim, int power, double smoothness_gain) {
    if (smoothness_gain < 0.0) throw std::domain_error("smoothness gain must be nonnegative");
    if (power < 2) throw std::invalid_argument("power must be >= 2");
    return dim / 2.0 - static_cast<double>(power) / (power - 1.0) * smoothness_gain;
}

double product_threshold(const ModelParams& params, double smoothness_gain) {
    return product_threshold(params.dim, params.power, smoothness_gain);
}

ProductEstimate product_estimate_ratio(std::span<const TimeSeries> factors, double radius, double smoothness,
                                       double smoothness_gain) {
    const int power = static_cast<int>(factors.size());
    if (power < 2) throw std::invalid_argument("product estimate needs at least two factors");
    for (const auto& u : factors) {
        u.validate();
        if (u.times != factors.front().times || !(u.grid() == factors.front().grid())) {
            throw std::invalid_argument("product factors must share grid and times");
        }
        for (const auto& f : u.fields) {
            if (octant_leakage(f, 0.0) > kLeakageTol) {
                throw PreconditionError("product estimate is claimed only for first-octant supports");
            }
        }
    }
    const int dim = factors.front().grid().dim;
    if (smoothness < product_threshold(dim, power, smoothness_gain) - kThresholdSlack) {
        throw PreconditionError("smoothness below the product-estimate threshold");
    }

    TimeSeries product;
    product.times = factors.front().times;
    std::vector<SpectralField> slice(factors.size());
    for (std::size_t i = 0; i < product.times.size(); ++i) {
        for (std::size_t j = 0; j < factors.size(); ++j) slice[j] = factors[j].fields[i];
        product.fields.push_back(pointwise_product(slice));
    }
    ProductEstimate out;
    out.lhs = mixed_norm(product, {1.0, radius, smoothness, std::nullopt});
    out.rhs = 1.0;
    for (const auto& u : factors) {
        out.rhs *= mixed_norm(u, {static_cast<double>(power), radius, smoothness + smoothness_gain, std::nullopt});
    }
    if (out.rhs == 0.0) {
        out.degenerate = true;
        out.ratio = 0.0;
    } else {
        out.ratio = out.lhs / out.rhs;
    }
    return out;
}

double interaction_sum(int power, int dim, double smoothness, double gain, int box) {
    if (power < 2 || dim < 1 || dim > 3 || box < 0) throw std::invalid_argument("bad interaction-sum arguments");
    const double e = -(smoothness + gain);
    const long r2 = static_cast<long>(box) * box;
    // Shell counts: number of octant lattice points with |k|^2 = q.
    std::vector<double> shells(static_cast<std::size_t>(r2) + 1, 0.0);
    const int hi1 = dim >= 2 ? box : 0;
    const int hi2 = dim >= 3 ? box : 0;
    for (int a = 0; a <= box; ++a) {
        for (int b = 0; b <= hi1; ++b) {
            const long ab = static_cast<long>(a) * a + static_cast<long>(b) * b;
            if (ab > r2) break;
            for (int c = 0; c <= hi2; ++c) {
                const long q = ab + static_cast<long>(c) * c;
                if (q > r2) break;
                shells[static_cast<std::size_t>(q)] += 1.0;
            }
        }
    }
    double single = 0.0;
    double best = 0.0;
    for (std::size_t q = 0; q < shells.size(); ++q) {
        if (shells[q] == 0.0) continue;
        const double w = 1.0 + static_cast<double>(q);
        single += shells[q] * std::pow(w, e);
        best = std::max(best, std::pow(single, power - 1) * std::pow(w, -gain));
    }
    return best;
}

}  // namespace roughwave
