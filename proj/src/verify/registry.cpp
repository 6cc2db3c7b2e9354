#include <stdexcept>

#include "roughwave/verify.hpp"

namespace roughwave {

const std::vector<std::pair<std::string, SuiteRunner>>& suite_registry() {
    static const std::vector<std::pair<std::string, SuiteRunner>> suites{
        {"kernel_bounds", suite_kernel_bounds},     {"linear_estimates", suite_linear_estimates},
        {"time_quadrature", suite_time_quadrature}, {"orthogonality", suite_orthogonality},
        {"product_estimate", suite_product_estimate}, {"scaling_bounds", suite_scaling_bounds},
        {"fixed_point", suite_fixed_point},         {"large_data", suite_large_data},
    };
    return suites;
}

std::vector<std::string> expand_suite_selection(const std::string& selection) {
    std::vector<std::string> out;
    for (const auto& [name, run] : suite_registry()) {
        if (selection == "all" || selection == name) out.push_back(name);
    }
    if (out.empty()) throw std::invalid_argument("unknown suite '" + selection + "'");
    return out;
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& opts) {
    for (const auto& [n, run] : suite_registry()) {
        if (n == name) {
            SuiteReport rep = run(opts);
            rep.suite = name;
            rep.seed = opts.seed;
            return rep;
        }
    }
    throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace roughwave
