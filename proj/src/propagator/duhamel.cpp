#include <array>
#include <cmath>
#include <stdexcept>

#include "roughwave/errors.hpp"
#include "roughwave/propagator.hpp"

namespace roughwave {

namespace {

constexpr double kDegenerateGap = 1e-3;
constexpr double kUniformTol = 1e-12;
constexpr double kSeriesRadius = 2.0;

// Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                         -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                         0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

// Moments  int_0^1 e^{z(1-x)} x^k dx  for k = 0, 1, 2, i.e. phi_1, phi_2 and 2 phi_3.
std::array<cplx, 3> exp_moments(cplx z) {
    std::array<cplx, 3> phi{};  // phi_1, phi_2, phi_3
    if (std::abs(z) < kSeriesRadius) {
        // phi_j(z) = sum_k z^k / (k + j)!
        for (int j = 1; j <= 3; ++j) {
            double fact = 1.0;
            for (int q = 2; q <= j; ++q) fact *= q;
            cplx term(1.0 / fact, 0.0);
            cplx sum{};
            for (int k = 0; k < 60; ++k) {
                sum += term;
                term *= z / static_cast<double>(k + j + 1);
                if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            }
            phi[j - 1] = sum;
        }
    } else {
        phi[0] = (std::exp(z) - 1.0) / z;
        phi[1] = (phi[0] - 1.0) / z;
        phi[2] = (phi[1] - 0.5) / z;
    }
    return {phi[0], phi[1], 2.0 * phi[2]};
}

// Weights of the interpolating polynomial through `nodes` integrated against
// e^{mu (h - theta)}, theta = x h; `mom` are the moments scaled by h.
std::array<cplx, 3> lagrange_weights(const std::array<cplx, 3>& mom, const std::array<double, 3>& nodes, int count) {
    std::array<cplx, 3> w{};
    if (count == 2) {
        const double a = nodes[0];
        const double b = nodes[1];
        w[0] = (mom[1] - b * mom[0]) / (a - b);
        w[1] = (mom[1] - a * mom[0]) / (b - a);
        return w;
    }
    for (int j = 0; j < 3; ++j) {
        const double a = nodes[j];
        const double b = nodes[(j + 1) % 3];
        const double c = nodes[(j + 2) % 3];
        w[j] = (mom[2] - (b + c) * mom[1] + b * c * mom[0]) / ((a - b) * (a - c));
    }
    return w;
}

bool uniform_grid(const std::vector<double>& t) {
    if (t.size() < 3) return true;
    const double h = t[1] - t[0];
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        if (std::abs((t[i + 1] - t[i]) - h) > kUniformTol * std::max(1.0, t.back())) return false;
    }
    return true;
}

}  // namespace

DuhamelIntegrator::DuhamelIntegrator(const ModelParams& params, double scale, const GridSpec& grid,
                                     std::vector<double> times, double floor)
    : params_(params), scale_(scale), grid_(grid), times_(std::move(times)), floor_(floor) {
    params_.validate();
    grid_.validate();
    if (times_.empty() || times_.front() != 0.0) throw std::invalid_argument("Duhamel times must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("Duhamel times must increase strictly");
    }
    uniform_ = uniform_grid(times_);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const LatticeIndex m = lattice_index(grid_, i);
        if (!in_admissible_set(grid_, m, floor_)) continue;
        const double r = frequency_norm(grid_, m);
        if (!(r > 0.0)) continue;
        const ModeCoefficients mc = mode_coefficients(params_, scale_, r);
        const CharacteristicRoots roots = roots_of(mc);
        Mode mode;
        mode.flat = i;
        mode.slow = roots.slow;
        mode.fast = roots.fast;
        mode.gap = roots.slow - roots.fast;
        mode.stiffness = mc.stiffness;
        mode.damping = mc.damping;
        const double size = std::max(std::abs(roots.slow), std::abs(roots.fast));
        mode.degenerate = std::abs(mode.gap) < kDegenerateGap * size;
        modes_.push_back(mode);
    }
    if (uniform_ && times_.size() > 1) {
        cached_.reserve(2 * modes_.size());
        const std::size_t interior = times_.size() > 2 ? 1 : 0;
        for (const auto& m : modes_) {
            cached_.push_back(weights(m, 0));
            cached_.push_back(weights(m, interior));
        }
    }
}

DuhamelIntegrator::Stencil DuhamelIntegrator::stencil(std::size_t step) const {
    Stencil st;
    const double h = times_[step + 1] - times_[step];
    if (times_.size() < 3) {
        st.first = step;
        st.count = 2;
    } else {
        st.first = step == 0 ? 0 : step - 1;
        st.count = 3;
    }
    for (int j = 0; j < st.count; ++j) st.nodes[j] = (times_[st.first + j] - times_[step]) / h;
    return st;
}

DuhamelIntegrator::StepWeights DuhamelIntegrator::weights(const Mode& m, std::size_t step) const {
    const Stencil st = stencil(step);
    const double h = times_[step + 1] - times_[step];
    StepWeights w;
    auto fill = [&](cplx mu, cplx& decay, std::array<cplx, 3>& out) {
        decay = std::exp(mu * h);
        std::array<cplx, 3> mom = exp_moments(mu * h);
        for (auto& v : mom) v *= h;
        out = lagrange_weights(mom, st.nodes, st.count);
    };
    fill(m.slow, w.decay_slow, w.slow);
    fill(m.fast, w.decay_fast, w.fast);
    return w;
}

void DuhamelIntegrator::integrate_regular(const Mode& m, const TimeSeries& g, std::vector<std::vector<cplx>>& value,
                                          std::vector<std::vector<cplx>>* rate) const {
    const std::size_t idx = static_cast<std::size_t>(&m - modes_.data());
    cplx acc_slow{}, acc_fast{};
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
        const Stencil st = stencil(i);
        const StepWeights w = uniform_ ? cached_[2 * idx + (i == 0 ? 0 : 1)] : weights(m, i);
        acc_slow *= w.decay_slow;
        acc_fast *= w.decay_fast;
        for (int j = 0; j < st.count; ++j) {
            const cplx gj = g.fields[st.first + j].data()[m.flat];
            acc_slow += w.slow[j] * gj;
            acc_fast += w.fast[j] * gj;
        }
        value[i + 1][m.flat] = (acc_slow - acc_fast) / m.gap;
        if (rate) (*rate)[i + 1][m.flat] = (m.slow * acc_slow - m.fast * acc_fast) / m.gap;
    }
}

void DuhamelIntegrator::integrate_degenerate(const Mode& m, const TimeSeries& g,
                                             std::vector<std::vector<cplx>>& value,
                                             std::vector<std::vector<cplx>>* rate) const {
    // State-space stepping: y' = A y + (0, g) with the propagator matrix from the kernels.
    const CharacteristicRoots roots{m.slow, m.fast};
    const ModeCoefficients mc{m.damping, m.stiffness};
    cplx pos{}, vel{};
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
        const double h = times_[i + 1] - times_[i];
        const Stencil st = stencil(i);
        const KernelValue e = kernel_from_roots(roots, mc, h);
        cplx new_pos = e.pos * pos + e.vel * vel;
        cplx new_vel = e.dpos * pos + e.dvel * vel;
        for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
            const double x = 0.5 * (kGlNodes[q] + 1.0);
            const double wq = 0.5 * h * kGlWeights[q];
            cplx gq{};
            for (int j = 0; j < st.count; ++j) {
                double basis = 1.0;
                for (int l = 0; l < st.count; ++l) {
                    if (l != j) basis *= (x - st.nodes[l]) / (st.nodes[j] - st.nodes[l]);
                }
                gq += basis * g.fields[st.first + j].data()[m.flat];
            }
            const KernelValue k = kernel_from_roots(roots, mc, h * (1.0 - x));
            new_pos += wq * k.vel * gq;
            new_vel += wq * k.dvel * gq;
        }
        pos = new_pos;
        vel = new_vel;
        value[i + 1][m.flat] = pos;
        if (rate) (*rate)[i + 1][m.flat] = vel;
    }
}

DuhamelResult DuhamelIntegrator::apply(const TimeSeries& forcing, bool with_rate) const {
    if (forcing.times != times_) throw std::invalid_argument("forcing is sampled on different times");
    for (const auto& f : forcing.fields) {
        if (!(f.grid() == grid_)) throw std::invalid_argument("forcing lives on a different grid");
        require_admissible(f, floor_, "Duhamel forcing");
    }
    const std::size_t nt = times_.size();
    std::vector<std::vector<cplx>> value(nt, std::vector<cplx>(grid_.size()));
    std::vector<std::vector<cplx>> rate;
    if (with_rate) rate.assign(nt, std::vector<cplx>(grid_.size()));
    for (const auto& m : modes_) {
        bool active = false;
        for (const auto& f : forcing.fields) {
            if (f.data()[m.flat] != cplx{}) {
                active = true;
                break;
            }
        }
        if (!active) continue;
        if (m.degenerate) {
            integrate_degenerate(m, forcing, value, with_rate ? &rate : nullptr);
        } else {
            integrate_regular(m, forcing, value, with_rate ? &rate : nullptr);
        }
    }
    DuhamelResult out;
    out.value.times = times_;
    out.value.fields.reserve(nt);
    for (auto& v : value) out.value.fields.emplace_back(grid_, std::move(v));
    if (with_rate) {
        out.rate.times = times_;
        out.rate.fields.reserve(nt);
        for (auto& v : rate) out.rate.fields.emplace_back(grid_, std::move(v));
    }
    return out;
}

SpectralField duhamel(const ModelParams& params, double scale, const TimeSeries& forcing, std::size_t t_index,
                      double invariant_floor) {
    if (t_index >= forcing.size()) throw std::out_of_range("time index outside the forcing series");
    forcing.validate();
    const double floor = propagation_floor(params, scale, invariant_floor);
    const TimeSeries head = series_window(forcing, 0, t_index);
    if (t_index == 0) return SpectralField(forcing.grid());
    const DuhamelIntegrator integ(params, scale, forcing.grid(), head.times, floor);
    return integ.apply(head, false).value.fields.back();
}

}  // namespace roughwave
