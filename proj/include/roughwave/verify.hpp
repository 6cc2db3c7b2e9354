#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace roughwave {

enum class CaseKind { check, negative_control };

// One certified inequality. For checks, pass means measured <= bound unless the
// case states otherwise; negative controls pass when the violation is detected.
struct CaseResult {
    std::string name;
    CaseKind kind = CaseKind::check;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    double measured = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
    bool pass = false;
    std::string note;
};

struct SuiteReport {
    std::string suite;
    std::string estimate;  // what the suite certifies
    std::uint64_t seed = 0;
    std::vector<CaseResult> cases;
    std::map<std::string, double> fitted_constants;

    [[nodiscard]] bool verdict() const;
    [[nodiscard]] const CaseResult* find(const std::string& case_name) const;
};

struct SuiteOptions {
    std::uint64_t seed = 7;
};

// Adds a case with ratio = measured / bound.
CaseResult& add_case(SuiteReport& rep, std::string name, nlohmann::ordered_json inputs, double measured, double bound,
                     bool pass, CaseKind kind = CaseKind::check, std::string note = {});
// Case that passes iff measured <= bound.
CaseResult& add_upper(SuiteReport& rep, std::string name, nlohmann::ordered_json inputs, double measured,
                      double bound);

[[nodiscard]] SuiteReport suite_kernel_bounds(const SuiteOptions& opts);
[[nodiscard]] SuiteReport suite_linear_estimates(const SuiteOptions& opts);
[[nodiscard]] SuiteReport suite_time_quadrature(const SuiteOptions& opts);
[[nodiscard]] SuiteReport suite_orthogonality(const SuiteOptions& opts);
[[nodiscard]] SuiteReport suite_product_estimate(const SuiteOptions& opts);
[[nodiscard]] SuiteReport suite_scaling_bounds(const SuiteOptions& opts);
[[nodiscard]] SuiteReport suite_fixed_point(const SuiteOptions& opts);
[[nodiscard]] SuiteReport suite_large_data(const SuiteOptions& opts);

using SuiteRunner = std::function<SuiteReport(const SuiteOptions&)>;

// Registered suites in execution order.
[[nodiscard]] const std::vector<std::pair<std::string, SuiteRunner>>& suite_registry();
// Names for `--suite`; "all" expands to every registered suite. Throws std::invalid_argument.
[[nodiscard]] std::vector<std::string> expand_suite_selection(const std::string& selection);
[[nodiscard]] SuiteReport run_suite(const std::string& name, const SuiteOptions& opts);

[[nodiscard]] nlohmann::ordered_json to_json(const SuiteReport& rep);
[[nodiscard]] SuiteReport report_from_json(const nlohmann::ordered_json& j);
// Fixed-width table, one row per suite.
[[nodiscard]] std::string summary_table(const std::vector<SuiteReport>& reports);
// Fixed-width table, one row per case.
[[nodiscard]] std::string case_table(const SuiteReport& rep);

}  // namespace roughwave
