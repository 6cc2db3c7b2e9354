#include <catch_amalgamated.hpp>

#include <atomic>
#include <chrono>
#include <thread>

#include "roughwave/cli.hpp"
#include "roughwave/verify.hpp"

using namespace roughwave;

TEST_CASE("case bookkeeping", "[verify]") {
    SuiteReport rep;
    rep.suite = "demo";
    add_upper(rep, "below", {{"x", 1}}, 0.5, 1.0);
    add_upper(rep, "above", {}, 2.0, 1.0);
    add_case(rep, "control", {}, 3.0, 1.0, true, CaseKind::negative_control, "detected");
    CHECK(rep.cases[0].pass);
    CHECK(rep.cases[0].ratio == 0.5);
    CHECK_FALSE(rep.cases[1].pass);
    CHECK_FALSE(rep.verdict());
    rep.cases.erase(rep.cases.begin() + 1);
    CHECK(rep.verdict());
    REQUIRE(rep.find("control") != nullptr);
    CHECK(rep.find("missing") == nullptr);
}

TEST_CASE("report JSON round trip", "[verify]") {
    SuiteReport rep;
    rep.suite = "demo";
    rep.estimate = "something bounded";
    rep.seed = 99;
    add_upper(rep, "a", {{"grid", {1, 2}}}, 0.1, 0.3);
    add_case(rep, "b", {}, 5.0, 1.0, true, CaseKind::negative_control, "note");
    rep.fitted_constants["linear"] = 1.25;
    const SuiteReport back = report_from_json(to_json(rep));
    CHECK(to_json(back).dump() == to_json(rep).dump());
    CHECK(back.cases[1].kind == CaseKind::negative_control);
    CHECK(back.fitted_constants.at("linear") == 1.25);
}

TEST_CASE("suite selection", "[verify]") {
    const auto all = expand_suite_selection("all");
    CHECK(all.size() == suite_registry().size());
    CHECK(all.front() == "kernel_bounds");
    CHECK(expand_suite_selection("orthogonality") == std::vector<std::string>{"orthogonality"});
    CHECK_THROWS_AS(expand_suite_selection("prop99"), std::invalid_argument);
}

TEST_CASE("suites are deterministic for a seed", "[verify]") {
    const SuiteReport a = run_suite("orthogonality", {7});
    const SuiteReport b = run_suite("orthogonality", {7});
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(a.verdict());
}

TEST_CASE("bounded worker pool keeps input order", "[verify]") {
    std::atomic<int> running{0};
    std::atomic<int> peak{0};
    std::vector<std::function<int()>> jobs;
    for (int i = 0; i < 12; ++i) {
        jobs.push_back([i, &running, &peak] {
            const int now = ++running;
            int seen = peak.load();
            while (now > seen && !peak.compare_exchange_weak(seen, now)) {
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(2 * (12 - i)));
            --running;
            return i * i;
        });
    }
    const std::vector<int> out = run_bounded(jobs, 3);
    for (int i = 0; i < 12; ++i) CHECK(out[i] == i * i);
    CHECK(peak.load() <= 3);

    std::vector<std::function<int()>> bad{[] { return 1; }, []() -> int { throw std::runtime_error("boom"); }};
    CHECK_THROWS_WITH(run_bounded(bad, 2), "boom");
}
