#include "wlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "wlab/dimension.hpp"

namespace wlab {

namespace {

std::string where(const YAML::Node& node) {
    const auto m = node.Mark();
    if (m.is_null()) return "";
    return fmt::format(" at line {}, column {}", m.line + 1, m.column + 1);
}

void check_keys(const YAML::Node& node, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!node.IsMap()) throw ConfigError(fmt::format("section '{}' must be a mapping{}", section, where(node)));
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError(fmt::format("unknown key '{}' in section '{}'{}", key, section, where(kv.first)));
    }
}

template <class T>
T read(const YAML::Node& node, const std::string& key) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(fmt::format("bad value for '{}'{}", key, where(node)));
    }
}

template <class T>
void maybe(const YAML::Node& parent, const char* key, T& out) {
    if (auto n = parent[key]) out = read<T>(n, key);
}

std::vector<double> read_list(const YAML::Node& node, const std::string& key) {
    if (node.IsScalar()) return {read<double>(node, key)};
    return read<std::vector<double>>(node, key);
}

void parse_system(const YAML::Node& node, SystemSpec& spec) {
    check_keys(node, "system", {"cells", "breakpoints", "lambda", "theta", "g", "g_slopes", "g_intercepts", "scale_t"});
    if (node["cells"] && node["breakpoints"])
        throw ConfigError(fmt::format("'cells' and 'breakpoints' are exclusive{}", where(node["breakpoints"])));
    if (auto n = node["breakpoints"]) {
        spec = SystemSpec::with_breakpoints(read<std::vector<double>>(n, "breakpoints"));
    } else {
        int cells = 3;
        maybe(node, "cells", cells);
        if (cells < 2) throw ConfigError(fmt::format("'cells' must be at least 2{}", where(node["cells"])));
        spec = SystemSpec::equal(cells);
    }
    const auto l = static_cast<std::size_t>(spec.breakpoints.size() - 1);

    if (node["lambda"] && node["theta"])
        throw ConfigError(fmt::format("'lambda' and 'theta' are exclusive{}", where(node["theta"])));
    if (auto n = node["theta"]) {
        spec.tau_power(read<double>(n, "theta"));
    } else if (auto n = node["lambda"]) {
        auto values = read_list(n, "lambda");
        if (values.size() == 1) values.assign(l, values[0]);
        spec.lambda_per_interval(std::move(values));
    } else {
        spec.tau_power(0.2);
    }

    std::string g = "cosine";
    maybe(node, "g", g);
    if (g == "cosine") {
        spec.cosine();
    } else if (g == "sawtooth") {
        spec.sawtooth();
    } else if (g == "piecewise-linear") {
        std::vector<double> slopes, intercepts;
        if (auto n = node["g_slopes"]) slopes = read_list(n, "g_slopes");
        if (auto n = node["g_intercepts"]) intercepts = read_list(n, "g_intercepts");
        if (slopes.size() == 1) slopes.assign(l, slopes[0]);
        if (intercepts.size() == 1) intercepts.assign(l, intercepts[0]);
        spec.piecewise_linear(std::move(slopes), std::move(intercepts));
    } else {
        throw ConfigError(fmt::format("unknown g '{}'{}", g, where(node["g"])));
    }
    if (g != "piecewise-linear" && (node["g_slopes"] || node["g_intercepts"]))
        throw ConfigError(fmt::format("g_slopes/g_intercepts need g: piecewise-linear{}", where(node)));
    maybe(node, "scale_t", spec.scale_t);
}

void parse_measure(const YAML::Node& node, MeasureSection& m) {
    check_keys(node, "measure", {"kind", "p"});
    std::string kind = "equilibrium";
    maybe(node, "kind", kind);
    if (kind == "equilibrium") m.kind = MeasureKind::equilibrium;
    else if (kind == "critical") m.kind = MeasureKind::critical;
    else if (kind == "uniform") m.kind = MeasureKind::uniform;
    else if (kind == "bernoulli") m.kind = MeasureKind::bernoulli;
    else throw ConfigError(fmt::format("unknown measure kind '{}'{}", kind, where(node["kind"])));
    if (auto n = node["p"]) {
        if (m.kind != MeasureKind::bernoulli)
            throw ConfigError(fmt::format("'p' needs kind: bernoulli{}", where(n)));
        m.p = read<std::vector<double>>(n, "p");
    } else if (m.kind == MeasureKind::bernoulli) {
        throw ConfigError(fmt::format("kind: bernoulli needs 'p'{}", where(node)));
    }
}

void parse_sweep(const YAML::Node& node, SweepSection& s) {
    check_keys(node, "compute.sweep", {"first_length", "gamma0", "gamma1", "slope0", "slope1", "intercept0",
                                       "intercept1", "sawtooth", "t", "t_count"});
    auto& f = s.family;
    maybe(node, "first_length", f.first_length);
    maybe(node, "gamma0", f.gamma0);
    maybe(node, "gamma1", f.gamma1);
    maybe(node, "slope0", f.slope0);
    maybe(node, "slope1", f.slope1);
    maybe(node, "intercept0", f.intercept0);
    maybe(node, "intercept1", f.intercept1);
    maybe(node, "sawtooth", f.sawtooth);
    if (auto n = node["t"]) s.t = read_list(n, "t");
    maybe(node, "t_count", s.t_count);
}

void parse_compute(const YAML::Node& node, ComputeSection& c) {
    check_keys(node, "compute", {"seed", "tol", "theta_tol", "samples", "graph_points", "scales", "anchors", "scan_xi",
                                 "scan_x", "tsujii_levels", "ks_samples", "theta_x", "threads", "sweep"});
    maybe(node, "seed", c.seed);
    maybe(node, "tol", c.tol);
    maybe(node, "theta_tol", c.theta_tol);
    maybe(node, "samples", c.samples);
    maybe(node, "graph_points", c.graph_points);
    if (auto n = node["scales"]) {
        auto k = read<std::vector<int>>(n, "scales");
        if (k.size() != 2) throw ConfigError(fmt::format("'scales' needs [k0, k1]{}", where(n)));
        c.scale_min = k[0];
        c.scale_max = k[1];
    }
    maybe(node, "anchors", c.anchors);
    maybe(node, "scan_xi", c.scan_xi);
    maybe(node, "scan_x", c.scan_x);
    maybe(node, "tsujii_levels", c.tsujii_levels);
    maybe(node, "ks_samples", c.ks_samples);
    maybe(node, "theta_x", c.theta_x);
    maybe(node, "threads", c.threads);
    if (auto n = node["sweep"]) parse_sweep(n, c.sweep);
}

void parse_output(const YAML::Node& node, OutputSection& o) {
    check_keys(node, "output", {"dir", "csv"});
    maybe(node, "dir", o.dir);
    maybe(node, "csv", o.csv);
}

void check_compute(const ComputeSection& c) {
    if (!(c.tol > 0.0)) throw ConfigError("compute.tol must be positive");
    if (!(c.theta_tol > 0.0)) throw ConfigError("compute.theta_tol must be positive");
    if (c.samples < 2) throw ConfigError("compute.samples must be at least 2");
    if (c.graph_points < 2) throw ConfigError("compute.graph_points must be at least 2");
    if (c.scale_min < 1 || c.scale_max <= c.scale_min + 2)
        throw ConfigError("compute.scales needs 1 <= k0 and k1 > k0 + 2");
    if (c.scan_xi < 1 || c.scan_x < 2) throw ConfigError("compute.scan_xi/scan_x too small");
    if (!(c.theta_x >= 0.0 && c.theta_x <= 1.0)) throw ConfigError("compute.theta_x must lie in [0, 1]");
}

void check_measure(const MeasureSection& m, const SystemSpec& spec) {
    if (m.kind != MeasureKind::bernoulli) return;
    if (m.p.size() + 1 != spec.breakpoints.size())
        throw ConfigError(fmt::format("measure.p has {} entries for {} intervals", m.p.size(), spec.breakpoints.size() - 1));
    for (double v : m.p)
        if (!(v >= 0.0)) throw ConfigError("measure.p entries must be non-negative");
    const double sum = std::accumulate(m.p.begin(), m.p.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError(fmt::format("measure.p sums to {}, not 1", sum));
}

std::string list(const std::vector<double>& v) {
    return fmt::format("[{}]", fmt::join(v, ", "));
}

const char* measure_name(MeasureKind k) {
    switch (k) {
        case MeasureKind::equilibrium: return "equilibrium";
        case MeasureKind::critical: return "critical";
        case MeasureKind::uniform: return "uniform";
        case MeasureKind::bernoulli: return "bernoulli";
    }
    return "equilibrium";
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("malformed YAML at line {}, column {}: {}", e.mark.line + 1, e.mark.column + 1,
                                      e.msg));
    }
    RunConfig c;
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    check_keys(root, "top level", {"system", "measure", "compute", "output"});
    parse_system(root["system"] ? root["system"] : YAML::Node(YAML::NodeType::Map), c.system);
    if (auto n = root["measure"]) parse_measure(n, c.measure);
    if (auto n = root["compute"]) parse_compute(n, c.compute);
    if (auto n = root["output"]) parse_output(n, c.output);

    if (auto v = validate_system(c.system); !v.empty()) throw InvalidSystem(std::move(v));
    check_measure(c.measure, c.system);
    check_compute(c.compute);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string echo_config(const RunConfig& c) {
    const auto& s = c.system;
    std::string out = "system:\n";
    if (s.equal_cells > 0) out += fmt::format("  cells: {}\n", s.equal_cells);
    else out += fmt::format("  breakpoints: {}\n", list(s.breakpoints));
    if (s.lambda_kind == LambdaKind::tau_power) out += fmt::format("  theta: {}\n", s.theta);
    else out += fmt::format("  lambda: {}\n", list(s.lambda_values));
    switch (s.g_kind) {
        case DisplacementKind::cosine: out += "  g: cosine\n"; break;
        case DisplacementKind::sawtooth: out += "  g: sawtooth\n"; break;
        case DisplacementKind::piecewise_linear:
            out += fmt::format("  g: piecewise-linear\n  g_slopes: {}\n  g_intercepts: {}\n", list(s.g_slopes),
                               list(s.g_intercepts));
            break;
    }
    out += fmt::format("  scale_t: {}\n", s.scale_t);

    out += fmt::format("measure:\n  kind: {}\n", measure_name(c.measure.kind));
    if (c.measure.kind == MeasureKind::bernoulli) out += fmt::format("  p: {}\n", list(c.measure.p));

    const auto& k = c.compute;
    out += "compute:\n";
    out += fmt::format("  seed: {}\n  tol: {}\n  theta_tol: {}\n  samples: {}\n  graph_points: {}\n", k.seed, k.tol,
                       k.theta_tol, k.samples, k.graph_points);
    out += fmt::format("  scales: [{}, {}]\n  anchors: {}\n  scan_xi: {}\n  scan_x: {}\n", k.scale_min, k.scale_max,
                       k.anchors, k.scan_xi, k.scan_x);
    out += fmt::format("  tsujii_levels: {}\n  ks_samples: {}\n  theta_x: {}\n  threads: {}\n", k.tsujii_levels,
                       k.ks_samples, k.theta_x, k.threads);
    const auto& f = k.sweep.family;
    out += "  sweep:\n";
    out += fmt::format("    first_length: {}\n    gamma0: {}\n    gamma1: {}\n", f.first_length, f.gamma0, f.gamma1);
    out += fmt::format("    slope0: {}\n    slope1: {}\n    intercept0: {}\n    intercept1: {}\n", f.slope0, f.slope1,
                       f.intercept0, f.intercept1);
    out += fmt::format("    sawtooth: {}\n", f.sawtooth);
    if (!k.sweep.t.empty()) out += fmt::format("    t: {}\n", list(k.sweep.t));
    out += fmt::format("    t_count: {}\n", k.sweep.t_count);

    out += fmt::format("output:\n  dir: \"{}\"\n  csv: {}\n", c.output.dir, c.output.csv);
    return out;
}

BernoulliMeasure resolve_measure(const RunConfig& config, const System& sys) {
    switch (config.measure.kind) {
        case MeasureKind::equilibrium: return BernoulliMeasure(bowen_solve(sys).p_star);
        case MeasureKind::critical: return BernoulliMeasure::critical(sys);
        case MeasureKind::uniform: return BernoulliMeasure::uniform(sys.cells());
        case MeasureKind::bernoulli: return BernoulliMeasure(config.measure.p);
    }
    return BernoulliMeasure::critical(sys);
}

std::vector<double> sweep_values(const SweepSection& sweep) {
    if (!sweep.t.empty()) return sweep.t;
    const double lo = sweep_t_min(sweep.family);
    const double hi = sweep_t_max(sweep.family);
    std::vector<double> t;
    for (std::size_t k = 1; k <= sweep.t_count; ++k)
        t.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(sweep.t_count));
    return t;
}

}  // namespace wlab
