// wlab: command-line front end. Exit codes: 0 success, 1 invalid input,
// 2 numerical target missed.

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wlab/commands.hpp"
#include "wlab/parallel.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string scales;
    std::size_t samples = 0;
};

void apply(wlab::RunConfig& c, const Overrides& o, const CLI::App& app) {
    if (app.count("--seed")) c.compute.seed = o.seed;
    if (app.count("--threads")) c.compute.threads = o.threads;
    if (app.count("--samples")) c.compute.samples = o.samples;
    if (app.count("--out")) c.output.dir = o.out;
    if (app.count("--scales")) {
        const auto dots = o.scales.find("..");
        if (dots == std::string::npos) throw wlab::ConfigError(fmt::format("--scales expects K0..K1, got '{}'", o.scales));
        try {
            c.compute.scale_min = std::stoi(o.scales.substr(0, dots));
            c.compute.scale_max = std::stoi(o.scales.substr(dots + 2));
        } catch (const std::exception&) {
            throw wlab::ConfigError(fmt::format("--scales expects K0..K1, got '{}'", o.scales));
        }
    }
}

void print_matrix(const wlab::Json& summary) {
    for (const auto& c : summary["checks"])
        fmt::print("{:4}  {:<17} {}  [{:.6g} vs {:.6g}] {}\n", c["pass"].get<bool>() ? "PASS" : "FAIL", c["module"].get<std::string>(),
                   c["name"].get<std::string>(), c["value"].get<double>(), c["threshold"].get<double>(),
                   c["detail"].get<std::string>());
    fmt::print("{} passed, {} failed\n", summary["passed"].get<std::size_t>(), summary["failed"].get<std::size_t>());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dimension laboratory for Weierstrass-type graphs over piecewise expanding maps"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", wlab::wlab_version);

    Overrides o;
    app.add_option("--config", o.config, "YAML run configuration")->envname("WLAB_CONFIG");
    app.add_option("--out", o.out, "output directory")->envname("WLAB_OUT");
    app.add_option("--seed", o.seed, "root seed")->envname("WLAB_SEED");
    app.add_option("--threads", o.threads, "worker threads, 0 for all cores")->envname("WLAB_THREADS");
    app.add_option("--scales", o.scales, "box scales 2^-K0 .. 2^-K1 as K0..K1")->envname("WLAB_SCALES");
    app.add_option("--samples", o.samples, "sample size")->envname("WLAB_SAMPLES");

    wlab::CommandInputs inputs;
    for (const auto& name : wlab::command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        if (name == "eval") sub->add_option("--x", inputs.eval_x, "points in [0, 1]");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? wlab::exit_ok : wlab::exit_invalid;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    wlab::RunConfig config;
    try {
        config = o.config.empty() ? wlab::parse_config("") : wlab::load_config(o.config);
        apply(config, o, app);
        config = wlab::parse_config(wlab::echo_config(config));  // re-validates the overrides
    } catch (const wlab::InvalidSystem& e) {
        std::cout << wlab::invalid_system_document(e.violations()).dump(2) << "\n";
        return wlab::exit_invalid;
    } catch (const wlab::ConfigError& e) {
        std::cout << wlab::error_document("config.invalid", e.what()).dump(2) << "\n";
        std::cerr << "config error: " << e.what() << "\n";
        return wlab::exit_invalid;
    }

    wlab::set_thread_count(config.compute.threads);
    try {
        const auto result = wlab::run_command(command, config, config.output.dir, inputs);
        if (command == "verify" && result.summary.contains("checks")) print_matrix(result.summary);
        else std::cout << result.summary.dump(2) << "\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cout << wlab::error_document(command + ".io", e.what()).dump(2) << "\n";
        return wlab::exit_numerical;
    }
}
