#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "roughwave/kernels.hpp"
#include "roughwave/model.hpp"

namespace roughwave {

struct KernelSweepSpec {
    std::vector<std::pair<double, double>> orders{{1.0, 0.0}, {1.0, 1.0}, {2.0, 1.0}};  // (diffusion, damping)
    std::vector<double> scales{1.0, 2.0, 4.0, 8.0};
    std::vector<double> radius_multiples{1.0, 2.0, 4.0, 8.0};  // of the scaled support floor
    std::vector<double> times{0.0, 0.125, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    double decay_constant = 0.0;  // 0 selects default_decay_constant
    void validate() const;
};

struct KernelSweepRow {
    double diffusion_order = 0.0;
    double damping_order = 0.0;
    double scale = 1.0;
    double r = 0.0;
    double t = 0.0;
    KernelPart part = KernelPart::pos;
    std::complex<double> value;
    double ratio = 0.0;  // |kernel| / pointwise majorant
    Regime regime = Regime::effective;
};

// One row per (orders, scale, r, t, part), in that nesting order.
[[nodiscard]] std::vector<KernelSweepRow> kernel_sweep(const KernelSweepSpec& spec);

// Header: sigma,delta,lambda,r,t,which,value_re,value_im,ratio
void write_kernel_csv(std::ostream& os, const std::vector<KernelSweepRow>& rows);
[[nodiscard]] std::vector<KernelSweepRow> read_kernel_csv(std::istream& is);

}  // namespace roughwave
