#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "roughwave/cli.hpp"
#include "roughwave/kernel_sweep.hpp"

using namespace roughwave;
namespace fs = std::filesystem;

namespace {

EnvLookup fake_env(std::map<std::string, std::string> vars) {
    return [vars](const std::string& name) -> std::optional<std::string> {
        const auto it = vars.find(name);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

const EnvLookup kNoEnv = fake_env({});

std::string config_error(const std::string& text, const EnvLookup& env = kNoEnv) {
    try {
        (void)parse_config(text, "cfg.yaml", env);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "roughwave");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("roughwave_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p.string();
}

// Small grid and fixed constants keep the solver runs short.
const char* kQuickConfig =
    "grid:\n  cells_per_cube: 4\n  cubes_per_axis: 16\n"
    "scaling:\n  constants:\n    linear: 1.0\n    product: 1.0\n    lipschitz: 1.0\n    dilation: 1.0\n";

}  // namespace

TEST_CASE("defaults and YAML values", "[cli][config]") {
    const RunConfig d = parse_config("", "empty", kNoEnv);
    CHECK(d.model.power == 2);
    CHECK(d.radius == -1.0);
    CHECK(d.seed == 7);

    const RunConfig c = parse_config(
        "model:\n  diffusion_order: 2\n  damping_order: 1\n  power: 3\n  dim: 2\n"
        "grid:\n  cells_per_cube: 2\n  cubes_per_axis: 8\n"
        "kernels:\n  orders: [[1, 0], [2, 0.5]]\n  regime: effective\n"
        "scaling:\n  constants:\n    product: 0.5\n"
        "seed: 123\n",
        "cfg.yaml", kNoEnv);
    CHECK(c.model.diffusion_order == 2.0);
    CHECK(c.grid.dim == 2);
    CHECK(c.sweep.orders.size() == 2);
    CHECK(c.sweep.orders[1].second == 0.5);
    CHECK(c.constants.product == 0.5);
    CHECK_FALSE(c.constants.linear.has_value());
    CHECK(c.seed == 123u);
}

TEST_CASE("configuration errors carry the line", "[cli][config]") {
    CHECK(config_error("model:\n  power: 2\n  powr: 3\n") == "cfg.yaml:3: unknown key 'model.powr'");
    CHECK(config_error("model:\n  power: two\n") == "cfg.yaml:2: model.power: expected an integer, got 'two'");
    CHECK(config_error("model:\n  diffusion_order: 1\n  damping_order: 3\n").rfind("cfg.yaml:3: ", 0) == 0);
    CHECK(config_error("grid: 4\n") == "cfg.yaml:1: section 'grid' must be a map");
    CHECK(config_error("norm:\n  radius: 1\n").rfind("cfg.yaml:2: ", 0) == 0);
    CHECK(config_error("seed: 1\nseed: 2\n").find("duplicate") != std::string::npos);
    CHECK(config_error("model: [1, 2\n").rfind("cfg.yaml:", 0) == 0);
    CHECK(config_error("data:\n  generator: noise\n").rfind("cfg.yaml:2: ", 0) == 0);
}

TEST_CASE("environment overrides", "[cli][config]") {
    const RunConfig c = parse_config("model:\n  power: 2\n", "cfg.yaml",
                                     fake_env({{"ROUGHWAVE_MODEL_POWER", "3"},
                                               {"ROUGHWAVE_SCALING_CONSTANTS_LINEAR", "2.5"},
                                               {"ROUGHWAVE_SEED", "11"}}));
    CHECK(c.model.power == 3);
    CHECK(c.constants.linear == 2.5);
    CHECK(c.seed == 11u);
    CHECK(config_error("", fake_env({{"ROUGHWAVE_MODEL_POWER", "abc"}})) ==
          "ROUGHWAVE_MODEL_POWER: model.power: expected an integer, got 'abc'");
    CHECK(config_error("", fake_env({{"ROUGHWAVE_MODEL_DAMPING_ORDER", "4"}})).rfind("ROUGHWAVE_MODEL_DAMPING_ORDER: ", 0) ==
          0);
}

TEST_CASE("FNV-1a reference values", "[cli][config]") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("config hash tracks results, not locations", "[cli][config]") {
    RunConfig a = parse_config("", "x", kNoEnv);
    RunConfig b = a;
    b.out = "elsewhere";
    b.jobs = 4;
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 8;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
    const auto m = make_manifest(a, "verify");
    CHECK(m["config_hash"] == config_hash(a));
    CHECK(m["seed"] == 7);
    CHECK(m["command"] == "verify");
}

TEST_CASE("kernel CSV round trip", "[cli][kernels]") {
    KernelSweepSpec spec;
    spec.scales = {1.0, 2.0};
    spec.times = {0.0, 1.0};
    const auto rows = kernel_sweep(spec);
    CHECK(rows.size() == 3 * 2 * 4 * 2 * 4);
    std::stringstream ss;
    write_kernel_csv(ss, rows);
    const auto back = read_kernel_csv(ss);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].value == rows[i].value);
        CHECK(back[i].ratio == rows[i].ratio);
        CHECK(back[i].part == rows[i].part);
        CHECK(back[i].regime == rows[i].regime);
    }
    std::stringstream bad("sigma,delta,lambda,r,t,which,value_re,value_im,ratio\n1,0,1,1,0,spin,1,0,1\n");
    try {
        (void)read_kernel_csv(bad);
        FAIL("bad row accepted");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("kernels subcommand", "[cli]") {
    const fs::path dir = scratch("kernels");
    const Run all = cli({"kernels", "--out", (dir / "all").string()});
    CHECK(all.code == kExitOk);
    CHECK(fs::exists(dir / "all" / "kernels.csv"));
    CHECK(fs::exists(dir / "all" / "manifest.json"));

    const Run inv = cli({"kernels", "--out", (dir / "inv").string(), "--regime", "scale_invariant"});
    CHECK(inv.code == kExitOk);
    std::ifstream is(dir / "inv" / "kernels.csv");
    const auto rows = read_kernel_csv(is);
    CHECK_FALSE(rows.empty());
    for (const auto& r : rows) CHECK(r.regime == Regime::scale_invariant);

    const std::string bad = write_file(dir / "bad.yaml", "model:\n  diffusion_order: 1\n  damping_order: 2\n");
    const Run b = cli({"kernels", "--config", bad});
    CHECK(b.code == kExitUsage);
    CHECK(b.err.find("bad.yaml:3:") != std::string::npos);
    CHECK(cli({"kernels", "--regime", "sideways"}).code == kExitUsage);
}

TEST_CASE("usage errors exit with 2", "[cli]") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"verify", "--suite", "prop31"}).code == kExitUsage);
    CHECK(cli({"verify", "--seed", "minus"}).code == kExitUsage);
    CHECK(cli({"kernels", "--config", "/nonexistent/config.yaml"}).code == kExitUsage);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("verify subcommand writes reports", "[cli]") {
    const fs::path dir = scratch("verify");
    const Run r = cli({"verify", "--suite", "orthogonality", "--seed", "7", "--out", dir.string()});
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(dir / "orthogonality.json"));
    CHECK(fs::exists(dir / "summary.txt"));
    CHECK(r.out.find("orthogonality") != std::string::npos);
}

TEST_CASE("solve subcommand", "[cli]") {
    const fs::path dir = scratch("solve");
    const std::string quick = write_file(dir / "quick.yaml", kQuickConfig);

    const std::string zero = write_file(dir / "zero.yaml", std::string(kQuickConfig) + "data:\n  generator: zero\n");
    const Run z = cli({"solve", "--config", zero, "--out", (dir / "zero").string()});
    CHECK(z.code == kExitOk);
    std::ifstream zr(dir / "zero" / "record.json");
    const auto rec = nlohmann::json::parse(zr);
    CHECK(rec["converged"] == true);
    CHECK(rec["x_norm"] == 0.0);

    const Run ok = cli({"solve", "--config", quick, "--out", (dir / "small").string()});
    CHECK(ok.code == kExitOk);
    std::ifstream sr(dir / "small" / "record.json");
    const auto small = nlohmann::json::parse(sr);
    CHECK(small["iterations"].get<int>() >= 2);
    CHECK_FALSE(small["norm_vs_time"]["points"].empty());
    CHECK_FALSE(small["snapshots"].empty());
    CHECK(fs::exists(dir / "small" / small["snapshots"][0]["file"].get<std::string>()));

    const std::string big = write_file(dir / "big.yaml", std::string(kQuickConfig) + "data:\n  budget_fraction: 3\n");
    const Run b = cli({"solve", "--config", big, "--out", (dir / "big").string()});
    CHECK(b.code == kExitSmallness);
    CHECK(b.err.find("nu = ") != std::string::npos);
}

TEST_CASE("scale subcommand", "[cli]") {
    const fs::path dir = scratch("scale");
    const std::string cfg = write_file(dir / "scale.yaml", std::string(kQuickConfig) + "data:\n  cube: [1]\n  oversize: 2\n");
    const Run r = cli({"scale", "--config", cfg, "--out", (dir / "auto").string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("lambda") != std::string::npos);
    CHECK(r.out.find("margin") != std::string::npos);
    std::ifstream ps(dir / "auto" / "plan.json");
    const auto plan = nlohmann::json::parse(ps);
    const int lam = plan["lambda"];
    CHECK(plan["radius_after"] == -lam);
    CHECK(plan["descaled"]["original_defect"].get<double>() < 1e-5);

    const Run over = cli({"scale", "--config", cfg, "--out", (dir / "over").string(), "--lambda", std::to_string(lam + 1)});
    CHECK(over.code == kExitOk);
    std::ifstream po(dir / "over" / "plan.json");
    CHECK(nlohmann::json::parse(po)["lambda"] == lam + 1);

    const Run low = cli({"scale", "--config", cfg, "--out", (dir / "low").string(), "--lambda", "1"});
    CHECK(low.code == kExitSmallness);

    const std::string flat = write_file(dir / "flat.yaml", std::string(kQuickConfig) + "norm:\n  radius: 0\n");
    CHECK(cli({"scale", "--config", flat}).code == kExitUsage);
}

TEST_CASE("report subcommand", "[cli]") {
    const fs::path dir = scratch("report");
    CHECK(cli({"report", (dir / "missing").string()}).code == kExitUsage);
    fs::create_directories(dir / "empty");
    CHECK(cli({"report", (dir / "empty").string()}).code == kExitUsage);

    const std::string zero = write_file(dir / "zero.yaml", std::string(kQuickConfig) + "data:\n  generator: zero\n");
    REQUIRE(cli({"solve", "--config", zero, "--out", (dir / "one").string()}).code == kExitOk);
    const Run one = cli({"report", (dir / "one").string()});
    CHECK(one.code == kExitOk);
    std::size_t rows = 0;
    std::istringstream lines(one.out);
    for (std::string line; std::getline(lines, line);) rows += line.rfind("record", 0) == 0 ? 1 : 0;
    CHECK(rows == 1);
    CHECK(fs::exists(dir / "one" / "report" / "norm_vs_time.dat"));

    REQUIRE(cli({"kernels", "--out", (dir / "k").string()}).code == kExitOk);
    REQUIRE(cli({"report", (dir / "k").string()}).code == kExitOk);
    // Envelope column is nonincreasing within each block.
    std::ifstream curve(dir / "k" / "report" / "decay_pos_s1_d0_l2.dat");
    REQUIRE(curve);
    double prev = HUGE_VAL;
    bool monotone = true;
    std::size_t points = 0;
    for (std::string line; std::getline(curve, line);) {
        if (line.empty() || line[0] == '#') {
            prev = HUGE_VAL;
            continue;
        }
        double t = 0, v = 0, env = 0;
        std::istringstream(line) >> t >> v >> env;
        monotone = monotone && env <= prev && env >= v;
        prev = env;
        ++points;
    }
    CHECK(points > 0);
    CHECK(monotone);
    CHECK(fs::exists(dir / "k" / "report" / "ratio_vs_lambda_pos_s1_d0.dat"));
}

TEST_CASE("installed tool reports usage errors", "[cli]") {
    const std::string cmd = std::string(ROUGHWAVE_TOOL) + " report /nonexistent/dir >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == kExitUsage);
}
