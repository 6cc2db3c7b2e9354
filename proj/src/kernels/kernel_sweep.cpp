#include "roughwave/kernel_sweep.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace roughwave {

namespace {

constexpr KernelPart kParts[] = {KernelPart::pos, KernelPart::vel, KernelPart::dpos, KernelPart::dvel};
constexpr const char* kHeader = "sigma,delta,lambda,r,t,which,value_re,value_im,ratio";

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void KernelSweepSpec::validate() const {
    if (orders.empty() || scales.empty() || radius_multiples.empty() || times.empty()) {
        throw std::invalid_argument("kernel sweep needs orders, scales, radii and times");
    }
    for (const auto& [s, d] : orders) ModelParams{s, d, 2, 1}.validate();
    for (double l : scales) {
        if (!(l >= 1.0)) throw std::domain_error("sweep scales must be >= 1");
    }
    for (double m : radius_multiples) {
        if (!(m >= 1.0)) throw std::domain_error("radius multiples must be >= 1 (bounds hold above the floor)");
    }
    for (double t : times) {
        if (!(t >= 0.0)) throw std::domain_error("sweep times must be nonnegative");
    }
    if (decay_constant < 0.0) throw std::domain_error("decay constant must be nonnegative");
}

std::vector<KernelSweepRow> kernel_sweep(const KernelSweepSpec& spec) {
    spec.validate();
    std::vector<KernelSweepRow> rows;
    for (const auto& [sigma, delta] : spec.orders) {
        const ModelParams p{sigma, delta, 2, 1};
        const DerivedExponents dx = derived_exponents(p);
        const double c = spec.decay_constant > 0.0 ? spec.decay_constant : default_decay_constant(p);
        for (double lam : spec.scales) {
            const double floor = scaled_support_floor(p, dx, lam);
            for (double m : spec.radius_multiples) {
                const double r = m * floor;
                for (double t : spec.times) {
                    const KernelValue kv = kernel_eval(p, lam, r, t);
                    for (KernelPart part : kParts) {
                        KernelSweepRow row;
                        row.diffusion_order = sigma;
                        row.damping_order = delta;
                        row.scale = lam;
                        row.r = r;
                        row.t = t;
                        row.part = part;
                        row.regime = dx.regime;
                        switch (part) {
                            case KernelPart::pos: row.value = kv.pos; break;
                            case KernelPart::vel: row.value = kv.vel; break;
                            case KernelPart::dpos: row.value = kv.dpos; break;
                            case KernelPart::dvel: row.value = kv.dvel; break;
                        }
                        row.ratio = pointwise_bound_ratio(p, lam, r, t, part, c);
                        rows.push_back(row);
                    }
                }
            }
        }
    }
    return rows;
}

void write_kernel_csv(std::ostream& os, const std::vector<KernelSweepRow>& rows) {
    os << kHeader << '\n';
    for (const auto& r : rows) {
        os << num(r.diffusion_order) << ',' << num(r.damping_order) << ',' << num(r.scale) << ',' << num(r.r) << ','
           << num(r.t) << ',' << kernel_part_name(r.part) << ',' << num(r.value.real()) << ',' << num(r.value.imag())
           << ',' << num(r.ratio) << '\n';
    }
}

std::vector<KernelSweepRow> read_kernel_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kHeader) throw std::runtime_error("not a kernel sweep CSV");
    std::vector<KernelSweepRow> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9) throw std::runtime_error("kernel CSV line " + std::to_string(lineno) + ": expected 9 fields");
        try {
            KernelSweepRow r;
            r.diffusion_order = std::stod(cells[0]);
            r.damping_order = std::stod(cells[1]);
            r.scale = std::stod(cells[2]);
            r.r = std::stod(cells[3]);
            r.t = std::stod(cells[4]);
            r.part = parse_kernel_part(cells[5]);
            r.value = {std::stod(cells[6]), std::stod(cells[7])};
            r.ratio = std::stod(cells[8]);
            r.regime = classify(ModelParams{r.diffusion_order, r.damping_order, 2, 1});
            rows.push_back(r);
        } catch (const std::exception& e) {
            throw std::runtime_error("kernel CSV line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

}  // namespace roughwave
