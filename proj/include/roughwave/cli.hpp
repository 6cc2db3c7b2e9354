#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "roughwave/grid.hpp"
#include "roughwave/kernel_sweep.hpp"
#include "roughwave/model.hpp"
#include "roughwave/propagator.hpp"

namespace roughwave {

// Process exit codes shared by all subcommands.
enum ExitCode : int {
    kExitOk = 0,
    kExitVerifyFailed = 1,
    kExitUsage = 2,       // bad config, bad flags, unknown suite, missing input
    kExitSmallness = 3,   // data above the smallness budget
    kExitSolverFailed = 4,
};

// Configuration problem; `what()` carries "<source>:<line>: <message>" when a line is known.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConstantOverrides {
    std::optional<double> linear;
    std::optional<double> product;
    std::optional<double> lipschitz;
    std::optional<double> dilation;
};

struct DataConfig {
    std::string generator = "single_cube";  // single_cube | random_octant | file | zero
    std::vector<int> cube;                   // single_cube; empty = first cube above the support floor
    int cube_lo = 1;                         // random_octant cube range (per axis)
    int cube_hi = 2;
    std::string position_file;  // file generator
    std::string velocity_file;
    bool with_velocity = false;  // generators also fill the velocity with the same shape
    double amplitude = 0.0;      // > 0: fixed multiplier of the unit shape
    double budget_fraction = 0.5;  // solve: linear ball norm as a fraction of nu
    double oversize = 10.0;        // scale: data size over the largest size admissible at the minimal scale
};

struct RunConfig {
    ModelParams model;
    GridSpec grid{1, 8, 32};
    double radius = -1.0;
    double smoothness = 0.0;
    PicardConfig solver;
    double invariant_floor = kDefaultInvariantFloor;
    int reference_scale = 2;
    int calibration_samples = 6;
    int max_scale = 64;
    ConstantOverrides constants;
    DataConfig data;
    KernelSweepSpec sweep;
    std::string regime;  // kernels: keep only this regime; empty keeps all
    std::string suite = "all";
    int jobs = 1;
    std::optional<int> lambda;  // solve / scale override
    std::string out = "out";
    std::string field_format = "binary";  // binary | csv
    int snapshots = 9;
    std::uint64_t seed = 7;

    void validate() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads the process environment.
[[nodiscard]] std::optional<std::string> process_env(const std::string& name);

// YAML text -> config. Every leaf key `section.key` (or `scaling.constants.key`) can be
// overridden by the variable ROUGHWAVE_SECTION_KEY, e.g. ROUGHWAVE_MODEL_POWER=3.
[[nodiscard]] RunConfig parse_config(const std::string& text, const std::string& source,
                                     const EnvLookup& env = process_env);
// Empty path: defaults plus environment overrides.
[[nodiscard]] RunConfig load_config(const std::string& path, const EnvLookup& env = process_env);

[[nodiscard]] nlohmann::ordered_json config_to_json(const RunConfig& cfg);
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes);
[[nodiscard]] std::string config_hash(const RunConfig& cfg);
[[nodiscard]] nlohmann::ordered_json make_manifest(const RunConfig& cfg, const std::string& command);
void write_manifest(const std::string& dir, const RunConfig& cfg, const std::string& command);

// Subcommands. Data and summaries go to `out`, diagnostics to `err`.
[[nodiscard]] int cmd_kernels(const RunConfig& cfg, std::ostream& out, std::ostream& err);
[[nodiscard]] int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
[[nodiscard]] int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
[[nodiscard]] int cmd_scale(const RunConfig& cfg, std::ostream& out, std::ostream& err);
[[nodiscard]] int cmd_report(const std::string& dir, std::ostream& out, std::ostream& err);

// Runs `jobs[i]()` on at most `workers` threads; results keep the input order.
template <typename Result>
[[nodiscard]] std::vector<Result> run_bounded(const std::vector<std::function<Result()>>& jobs, int workers);

// Full command line: `roughwave <subcommand> [flags]`.
[[nodiscard]] int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace roughwave

#include "roughwave/detail/worker_pool.hpp"
