#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "roughwave/verify.hpp"

namespace roughwave {

namespace {

const char* kind_name(CaseKind k) { return k == CaseKind::check ? "check" : "negative_control"; }

CaseKind parse_kind(const std::string& s) {
    if (s == "check") return CaseKind::check;
    if (s == "negative_control") return CaseKind::negative_control;
    throw std::invalid_argument("unknown case kind '" + s + "'");
}

// Non-finite values are stored as strings so that the JSON stays valid.
nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double read_number(const nlohmann::ordered_json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    throw std::invalid_argument("bad number '" + s + "'");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

bool SuiteReport::verdict() const {
    return !cases.empty() && std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.pass; });
}

const CaseResult* SuiteReport::find(const std::string& case_name) const {
    for (const auto& c : cases) {
        if (c.name == case_name) return &c;
    }
    return nullptr;
}

CaseResult& add_case(SuiteReport& rep, std::string name, nlohmann::ordered_json inputs, double measured, double bound,
                     bool pass, CaseKind kind, std::string note) {
    CaseResult c;
    c.name = std::move(name);
    c.kind = kind;
    c.inputs = std::move(inputs);
    c.measured = measured;
    c.bound = bound;
    c.ratio = bound != 0.0 ? measured / bound : (measured == 0.0 ? 0.0 : HUGE_VAL);
    c.pass = pass;
    c.note = std::move(note);
    rep.cases.push_back(std::move(c));
    return rep.cases.back();
}

CaseResult& add_upper(SuiteReport& rep, std::string name, nlohmann::ordered_json inputs, double measured,
                      double bound) {
    const bool ok = std::isfinite(measured) && measured <= bound;
    return add_case(rep, std::move(name), std::move(inputs), measured, bound, ok);
}

nlohmann::ordered_json to_json(const SuiteReport& rep) {
    nlohmann::ordered_json j;
    j["suite"] = rep.suite;
    j["estimate"] = rep.estimate;
    j["seed"] = rep.seed;
    j["verdict"] = rep.verdict() ? "pass" : "fail";
    nlohmann::ordered_json consts = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rep.fitted_constants) consts[k] = number(v);
    j["fitted_constants"] = consts;
    nlohmann::ordered_json cases = nlohmann::ordered_json::array();
    for (const auto& c : rep.cases) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["kind"] = kind_name(c.kind);
        e["inputs"] = c.inputs;
        e["measured"] = number(c.measured);
        e["bound"] = number(c.bound);
        e["ratio"] = number(c.ratio);
        e["pass"] = c.pass;
        if (!c.note.empty()) e["note"] = c.note;
        cases.push_back(std::move(e));
    }
    j["cases"] = std::move(cases);
    return j;
}

SuiteReport report_from_json(const nlohmann::ordered_json& j) {
    SuiteReport rep;
    rep.suite = j.at("suite").get<std::string>();
    rep.estimate = j.value("estimate", std::string{});
    rep.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("fitted_constants").items()) rep.fitted_constants[k] = read_number(v);
    for (const auto& e : j.at("cases")) {
        CaseResult c;
        c.name = e.at("name").get<std::string>();
        c.kind = parse_kind(e.at("kind").get<std::string>());
        c.inputs = e.at("inputs");
        c.measured = read_number(e.at("measured"));
        c.bound = read_number(e.at("bound"));
        c.ratio = read_number(e.at("ratio"));
        c.pass = e.at("pass").get<bool>();
        c.note = e.value("note", std::string{});
        rep.cases.push_back(std::move(c));
    }
    return rep;
}

std::string summary_table(const std::vector<SuiteReport>& reports) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-18s %6s %6s %9s %8s\n", "suite", "cases", "passed", "controls", "verdict");
    os << line;
    for (const auto& r : reports) {
        const auto passed = std::count_if(r.cases.begin(), r.cases.end(), [](const CaseResult& c) { return c.pass; });
        const auto controls = std::count_if(r.cases.begin(), r.cases.end(),
                                            [](const CaseResult& c) { return c.kind == CaseKind::negative_control; });
        std::snprintf(line, sizeof line, "%-18s %6zu %6ld %9ld %8s\n", r.suite.c_str(), r.cases.size(),
                      static_cast<long>(passed), static_cast<long>(controls), r.verdict() ? "pass" : "FAIL");
        os << line;
    }
    return os.str();
}

std::string case_table(const SuiteReport& rep) {
    std::ostringstream os;
    os << rep.suite << ": " << rep.estimate << " (seed " << rep.seed << ")\n";
    std::size_t width = 4;
    for (const auto& c : rep.cases) width = std::max(width, c.name.size());
    for (const auto& c : rep.cases) {
        os << "  " << c.name << std::string(width - c.name.size() + 2, ' ') << (c.pass ? "pass" : "FAIL") << "  "
           << (c.kind == CaseKind::negative_control ? "control " : "        ") << "measured=" << fmt(c.measured)
           << " bound=" << fmt(c.bound) << '\n';
    }
    return os.str();
}

}  // namespace roughwave
