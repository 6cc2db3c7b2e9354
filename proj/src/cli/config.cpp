#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "roughwave/cli.hpp"
#include "roughwave/norms.hpp"

#ifndef ROUGHWAVE_VERSION
#define ROUGHWAVE_VERSION "0.0.0"
#endif

namespace roughwave {

namespace {

using json = nlohmann::ordered_json;

// Raised by readers; turned into a ConfigError once the location is known.
struct TypeProblem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string scalar_text(const YAML::Node& n) {
    if (!n.IsScalar()) return n.IsSequence() ? "<list>" : n.IsMap() ? "<map>" : "<null>";
    return n.Scalar();
}

template <typename T>
T read_scalar(const YAML::Node& n, const char* what) {
    if (!n.IsScalar()) throw TypeProblem(std::string("expected ") + what + ", got " + scalar_text(n));
    try {
        return n.as<T>();
    } catch (const YAML::BadConversion&) {
        throw TypeProblem(std::string("expected ") + what + ", got '" + n.Scalar() + "'");
    }
}

double read_double(const YAML::Node& n) { return read_scalar<double>(n, "a number"); }
int read_int(const YAML::Node& n) { return read_scalar<int>(n, "an integer"); }
bool read_bool(const YAML::Node& n) { return read_scalar<bool>(n, "true or false"); }
std::string read_string(const YAML::Node& n) { return read_scalar<std::string>(n, "a string"); }

std::uint64_t read_seed(const YAML::Node& n) {
    const std::string s = read_string(n);
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw TypeProblem("expected a nonnegative integer, got '" + s + "'");
    }
    try {
        return std::stoull(s);
    } catch (const std::out_of_range&) {
        throw TypeProblem("seed out of range: " + s);
    }
}

template <typename T, typename Reader>
std::vector<T> read_list(const YAML::Node& n, Reader reader) {
    if (!n.IsSequence()) throw TypeProblem("expected a list, got " + scalar_text(n));
    std::vector<T> out;
    for (const auto& item : n) out.push_back(reader(item));
    return out;
}

std::vector<std::pair<double, double>> read_orders(const YAML::Node& n) {
    return read_list<std::pair<double, double>>(n, [](const YAML::Node& item) {
        const auto v = read_list<double>(item, read_double);
        if (v.size() != 2) throw TypeProblem("each order entry is [diffusion_order, damping_order]");
        return std::pair{v[0], v[1]};
    });
}

using Setter = std::function<void(RunConfig&, const YAML::Node&)>;

const std::map<std::string, Setter>& key_table() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["model.diffusion_order"] = [](RunConfig& c, const YAML::Node& n) { c.model.diffusion_order = read_double(n); };
        t["model.damping_order"] = [](RunConfig& c, const YAML::Node& n) { c.model.damping_order = read_double(n); };
        t["model.power"] = [](RunConfig& c, const YAML::Node& n) { c.model.power = read_int(n); };
        t["model.dim"] = [](RunConfig& c, const YAML::Node& n) {
            c.model.dim = read_int(n);
            c.grid.dim = c.model.dim;
        };
        t["grid.cells_per_cube"] = [](RunConfig& c, const YAML::Node& n) { c.grid.cells_per_cube = read_int(n); };
        t["grid.cubes_per_axis"] = [](RunConfig& c, const YAML::Node& n) { c.grid.cubes_per_axis = read_int(n); };
        t["norm.radius"] = [](RunConfig& c, const YAML::Node& n) { c.radius = read_double(n); };
        t["norm.smoothness"] = [](RunConfig& c, const YAML::Node& n) { c.smoothness = read_double(n); };
        t["solver.t_final"] = [](RunConfig& c, const YAML::Node& n) { c.solver.t_final = read_double(n); };
        t["solver.time_step"] = [](RunConfig& c, const YAML::Node& n) { c.solver.time_step = read_double(n); };
        t["solver.max_iter"] = [](RunConfig& c, const YAML::Node& n) { c.solver.max_iter = read_int(n); };
        t["solver.contraction_tol"] = [](RunConfig& c, const YAML::Node& n) { c.solver.contraction_tol = read_double(n); };
        t["solver.residual_tol"] = [](RunConfig& c, const YAML::Node& n) { c.solver.residual_tol = read_double(n); };
        t["solver.nu_fraction"] = [](RunConfig& c, const YAML::Node& n) { c.solver.nu_fraction = read_double(n); };
        t["solver.overflow_tol"] = [](RunConfig& c, const YAML::Node& n) { c.solver.overflow_tol = read_double(n); };
        t["solver.nonlinear"] = [](RunConfig& c, const YAML::Node& n) { c.solver.nonlinear = read_bool(n); };
        t["solver.start_from_zero"] = [](RunConfig& c, const YAML::Node& n) { c.solver.start_from_zero = read_bool(n); };
        t["solver.enforce_smallness"] = [](RunConfig& c, const YAML::Node& n) {
            c.solver.enforce_smallness = read_bool(n);
        };
        t["scaling.invariant_floor"] = [](RunConfig& c, const YAML::Node& n) { c.invariant_floor = read_double(n); };
        t["scaling.reference_scale"] = [](RunConfig& c, const YAML::Node& n) { c.reference_scale = read_int(n); };
        t["scaling.calibration_samples"] = [](RunConfig& c, const YAML::Node& n) {
            c.calibration_samples = read_int(n);
        };
        t["scaling.max_scale"] = [](RunConfig& c, const YAML::Node& n) { c.max_scale = read_int(n); };
        t["scaling.lambda"] = [](RunConfig& c, const YAML::Node& n) { c.lambda = read_int(n); };
        t["scaling.constants.linear"] = [](RunConfig& c, const YAML::Node& n) { c.constants.linear = read_double(n); };
        t["scaling.constants.product"] = [](RunConfig& c, const YAML::Node& n) { c.constants.product = read_double(n); };
        t["scaling.constants.lipschitz"] = [](RunConfig& c, const YAML::Node& n) {
            c.constants.lipschitz = read_double(n);
        };
        t["scaling.constants.dilation"] = [](RunConfig& c, const YAML::Node& n) {
            c.constants.dilation = read_double(n);
        };
        t["data.generator"] = [](RunConfig& c, const YAML::Node& n) { c.data.generator = read_string(n); };
        t["data.cube"] = [](RunConfig& c, const YAML::Node& n) { c.data.cube = read_list<int>(n, read_int); };
        t["data.cube_lo"] = [](RunConfig& c, const YAML::Node& n) { c.data.cube_lo = read_int(n); };
        t["data.cube_hi"] = [](RunConfig& c, const YAML::Node& n) { c.data.cube_hi = read_int(n); };
        t["data.position_file"] = [](RunConfig& c, const YAML::Node& n) { c.data.position_file = read_string(n); };
        t["data.velocity_file"] = [](RunConfig& c, const YAML::Node& n) { c.data.velocity_file = read_string(n); };
        t["data.with_velocity"] = [](RunConfig& c, const YAML::Node& n) { c.data.with_velocity = read_bool(n); };
        t["data.amplitude"] = [](RunConfig& c, const YAML::Node& n) { c.data.amplitude = read_double(n); };
        t["data.budget_fraction"] = [](RunConfig& c, const YAML::Node& n) { c.data.budget_fraction = read_double(n); };
        t["data.oversize"] = [](RunConfig& c, const YAML::Node& n) { c.data.oversize = read_double(n); };
        t["kernels.orders"] = [](RunConfig& c, const YAML::Node& n) { c.sweep.orders = read_orders(n); };
        t["kernels.scales"] = [](RunConfig& c, const YAML::Node& n) { c.sweep.scales = read_list<double>(n, read_double); };
        t["kernels.radius_multiples"] = [](RunConfig& c, const YAML::Node& n) {
            c.sweep.radius_multiples = read_list<double>(n, read_double);
        };
        t["kernels.times"] = [](RunConfig& c, const YAML::Node& n) { c.sweep.times = read_list<double>(n, read_double); };
        t["kernels.decay_constant"] = [](RunConfig& c, const YAML::Node& n) { c.sweep.decay_constant = read_double(n); };
        t["kernels.regime"] = [](RunConfig& c, const YAML::Node& n) { c.regime = read_string(n); };
        t["verify.suite"] = [](RunConfig& c, const YAML::Node& n) { c.suite = read_string(n); };
        t["verify.jobs"] = [](RunConfig& c, const YAML::Node& n) { c.jobs = read_int(n); };
        t["io.out"] = [](RunConfig& c, const YAML::Node& n) { c.out = read_string(n); };
        t["io.field_format"] = [](RunConfig& c, const YAML::Node& n) { c.field_format = read_string(n); };
        t["io.snapshots"] = [](RunConfig& c, const YAML::Node& n) { c.snapshots = read_int(n); };
        t["seed"] = [](RunConfig& c, const YAML::Node& n) { c.seed = read_seed(n); };
        return t;
    }();
    return table;
}

bool is_section(const std::string& path) {
    const std::string prefix = path + ".";
    const auto& t = key_table();
    const auto it = t.lower_bound(prefix);
    return it != t.end() && it->first.compare(0, prefix.size(), prefix) == 0;
}

std::string env_name(const std::string& path) {
    std::string out = "ROUGHWAVE_";
    for (char ch : path) out += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return out;
}

std::string position(const std::string& source, int line) {
    return line < 0 ? source : source + ":" + std::to_string(line + 1);
}

std::string located(const std::string& source, int line, const std::string& msg) {
    return position(source, line) + ": " + msg;
}

struct Parser {
    RunConfig cfg;
    std::string source;
    std::map<std::string, int> lines;  // 0-based line of each key seen, sections included

    void apply(const std::string& path, const YAML::Node& value, int line, const std::string& where) {
        try {
            key_table().at(path)(cfg, value);
        } catch (const TypeProblem& e) {
            throw ConfigError(located(where, line, path + ": " + e.what()));
        }
    }

    void walk(const YAML::Node& map, const std::string& prefix) {
        for (const auto& kv : map) {
            const std::string key = kv.first.IsScalar() ? kv.first.Scalar() : "<non-scalar key>";
            const std::string path = prefix.empty() ? key : prefix + "." + key;
            const int line = kv.first.Mark().line;
            if (lines.count(path)) throw ConfigError(located(source, line, "duplicate key '" + path + "'"));
            lines[path] = line;
            if (key_table().count(path)) {
                apply(path, kv.second, line, source);
            } else if (is_section(path)) {
                if (kv.second.IsNull()) continue;
                if (!kv.second.IsMap()) throw ConfigError(located(source, line, "section '" + path + "' must be a map"));
                walk(kv.second, path);
            } else {
                throw ConfigError(located(source, line, "unknown key '" + path + "'"));
            }
        }
    }

    void environment(const EnvLookup& env) {
        for (const auto& [path, setter] : key_table()) {
            const std::string name = env_name(path);
            const auto value = env(name);
            if (!value) continue;
            YAML::Node node;
            try {
                node = YAML::Load(*value);
            } catch (const YAML::Exception& e) {
                throw ConfigError(located(name, -1, path + ": " + e.msg));
            }
            apply(path, node, -1, name);
            lines.erase(path);  // errors on this key now point at the variable
            env_keys[path] = name;
        }
    }

    // Location for a validation failure in `path` (a key or a section).
    std::string where(const std::string& path) const {
        if (const auto e = env_keys.find(path); e != env_keys.end()) return e->second;
        for (std::string p = path;;) {
            if (const auto it = lines.find(p); it != lines.end()) return position(source, it->second);
            const auto dot = p.rfind('.');
            if (dot == std::string::npos) return source;
            p.resize(dot);
        }
    }

    template <typename F>
    void check(const std::vector<std::string>& paths, F&& f) const {
        try {
            f();
        } catch (const std::logic_error& e) {
            // Messages naming a key point at that key; otherwise at the first involved key written explicitly.
            const std::string msg = e.what();
            for (const auto& [path, setter] : key_table()) {
                if (msg.rfind(path + " ", 0) == 0 && (env_keys.count(path) || lines.count(path))) {
                    throw ConfigError(where(path) + ": " + msg);
                }
            }
            std::string loc = source;
            for (const auto& p : paths) {
                if (env_keys.count(p) || lines.count(p)) {
                    loc = where(p);
                    break;
                }
            }
            if (loc == source && !paths.empty()) loc = where(paths.front());
            throw ConfigError(loc + ": " + e.what());
        }
    }

    std::map<std::string, std::string> env_keys;
};

void validate_located(const Parser& p) {
    const RunConfig& c = p.cfg;
    p.check({"model.damping_order", "model.diffusion_order", "model.power", "model.dim"}, [&] { c.model.validate(); });
    p.check({"grid.cells_per_cube", "grid.cubes_per_axis", "model.dim"}, [&] { c.grid.validate(); });
    p.check({"norm.radius", "norm.smoothness"}, [&] { NormSpec{c.radius, c.smoothness}.validate(); });
    p.check({"solver"}, [&] {
        PicardConfig s = c.solver;
        s.radius = c.radius;
        s.validate();
    });
    p.check({"kernels.orders", "kernels.scales", "kernels.radius_multiples", "kernels.times", "kernels.decay_constant"},
            [&] { c.sweep.validate(); });
    p.check({"kernels.regime"}, [&] {
        if (!c.regime.empty()) (void)parse_regime(c.regime);
    });
    p.check({"data.cube_lo", "data.cube_hi", "scaling.lambda", "scaling.constants"}, [&] { c.validate(); });
}

void json_opt(json& j, const char* key, const std::optional<double>& v) {
    j[key] = v ? json(*v) : json(nullptr);
}

}  // namespace

void RunConfig::validate() const {
    model.validate();
    grid.validate();
    if (grid.dim != model.dim) throw std::invalid_argument("grid dimension differs from model.dim");
    NormSpec{radius, smoothness}.validate();
    PicardConfig s = solver;
    s.radius = radius;
    s.validate();
    sweep.validate();
    if (!regime.empty()) (void)parse_regime(regime);
    static const char* generators[] = {"single_cube", "random_octant", "file", "zero"};
    if (std::find(std::begin(generators), std::end(generators), data.generator) == std::end(generators)) {
        throw std::invalid_argument("data.generator must be single_cube, random_octant, file or zero, got '" +
                                    data.generator + "'");
    }
    if (!data.cube.empty() && static_cast<int>(data.cube.size()) != model.dim) {
        throw std::invalid_argument("data.cube needs one index per dimension");
    }
    if (data.cube_lo < 0 || data.cube_hi < data.cube_lo) throw std::invalid_argument("data needs 0 <= cube_lo <= cube_hi");
    if (data.generator == "file" && data.position_file.empty()) {
        throw std::invalid_argument("data.position_file is required for the file generator");
    }
    if (!(data.amplitude >= 0.0)) throw std::domain_error("data.amplitude must be nonnegative");
    if (!(data.budget_fraction > 0.0)) throw std::domain_error("data.budget_fraction must be positive");
    if (!(data.oversize > 0.0)) throw std::domain_error("data.oversize must be positive");
    if (!(invariant_floor > 0.0)) throw std::domain_error("scaling.invariant_floor must be positive");
    if (reference_scale < 1) throw std::domain_error("scaling.reference_scale must be >= 1");
    if (calibration_samples < 1) throw std::domain_error("scaling.calibration_samples must be >= 1");
    if (max_scale < 2) throw std::domain_error("scaling.max_scale must be >= 2");
    if (lambda && *lambda < 1) throw std::domain_error("lambda must be >= 1");
    for (const auto& v : {constants.linear, constants.product, constants.lipschitz, constants.dilation}) {
        if (v && !(*v > 0.0)) throw std::domain_error("scaling constants must be positive");
    }
    if (jobs < 1) throw std::domain_error("verify.jobs must be >= 1");
    if (field_format != "binary" && field_format != "csv") {
        throw std::invalid_argument("io.field_format must be binary or csv");
    }
    if (snapshots < 0) throw std::domain_error("io.snapshots must be nonnegative");
    if (out.empty()) throw std::invalid_argument("io.out must not be empty");
}

std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
}

RunConfig parse_config(const std::string& text, const std::string& source, const EnvLookup& env) {
    Parser p;
    p.source = source;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(located(source, e.mark.line, e.msg));
    }
    if (!root.IsNull()) {
        if (!root.IsMap()) throw ConfigError(located(source, root.Mark().line, "top level must be a map"));
        p.walk(root, "");
    }
    p.environment(env);
    validate_located(p);
    return p.cfg;
}

RunConfig load_config(const std::string& path, const EnvLookup& env) {
    if (path.empty()) return parse_config("", "<defaults>", env);
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path, env);
}

json config_to_json(const RunConfig& c) {
    json j;
    j["model"] = {{"diffusion_order", c.model.diffusion_order},
                  {"damping_order", c.model.damping_order},
                  {"power", c.model.power},
                  {"dim", c.model.dim}};
    j["grid"] = {{"cells_per_cube", c.grid.cells_per_cube}, {"cubes_per_axis", c.grid.cubes_per_axis}};
    j["norm"] = {{"radius", c.radius}, {"smoothness", c.smoothness}};
    j["solver"] = {{"t_final", c.solver.t_final},
                   {"time_step", c.solver.time_step},
                   {"max_iter", c.solver.max_iter},
                   {"contraction_tol", c.solver.contraction_tol},
                   {"residual_tol", c.solver.residual_tol},
                   {"nu_fraction", c.solver.nu_fraction},
                   {"overflow_tol", c.solver.overflow_tol},
                   {"nonlinear", c.solver.nonlinear},
                   {"start_from_zero", c.solver.start_from_zero},
                   {"enforce_smallness", c.solver.enforce_smallness}};
    json constants = json::object();
    json_opt(constants, "linear", c.constants.linear);
    json_opt(constants, "product", c.constants.product);
    json_opt(constants, "lipschitz", c.constants.lipschitz);
    json_opt(constants, "dilation", c.constants.dilation);
    j["scaling"] = {{"invariant_floor", c.invariant_floor},
                    {"reference_scale", c.reference_scale},
                    {"calibration_samples", c.calibration_samples},
                    {"max_scale", c.max_scale},
                    {"lambda", c.lambda ? json(*c.lambda) : json(nullptr)},
                    {"constants", constants}};
    j["data"] = {{"generator", c.data.generator},
                 {"cube", c.data.cube},
                 {"cube_lo", c.data.cube_lo},
                 {"cube_hi", c.data.cube_hi},
                 {"position_file", c.data.position_file},
                 {"velocity_file", c.data.velocity_file},
                 {"with_velocity", c.data.with_velocity},
                 {"amplitude", c.data.amplitude},
                 {"budget_fraction", c.data.budget_fraction},
                 {"oversize", c.data.oversize}};
    json orders = json::array();
    for (const auto& [s, d] : c.sweep.orders) orders.push_back({s, d});
    j["kernels"] = {{"orders", orders},
                    {"scales", c.sweep.scales},
                    {"radius_multiples", c.sweep.radius_multiples},
                    {"times", c.sweep.times},
                    {"decay_constant", c.sweep.decay_constant},
                    {"regime", c.regime}};
    j["verify"] = {{"suite", c.suite}, {"jobs", c.jobs}};
    j["io"] = {{"out", c.out}, {"field_format", c.field_format}, {"snapshots", c.snapshots}};
    j["seed"] = c.seed;
    return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const RunConfig& cfg) {
    // Output location and worker count do not change results.
    json j = config_to_json(cfg);
    j["io"].erase("out");
    j["verify"].erase("jobs");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

json make_manifest(const RunConfig& cfg, const std::string& command) {
    json m;
    m["tool"] = "roughwave";
    m["version"] = ROUGHWAVE_VERSION;
    m["command"] = command;
    m["seed"] = cfg.seed;
    m["config_hash"] = config_hash(cfg);
    m["versions"] = {{"roughwave", ROUGHWAVE_VERSION},
                     {"compiler", __VERSION__},
                     {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    m["config"] = config_to_json(cfg);
    return m;
}

void write_manifest(const std::string& dir, const RunConfig& cfg, const std::string& command) {
    std::filesystem::create_directories(dir);
    std::ofstream os(std::filesystem::path(dir) / "manifest.json");
    if (!os) throw std::runtime_error("cannot write manifest in " + dir);
    os << make_manifest(cfg, command).dump(2) << '\n';
}

}  // namespace roughwave
