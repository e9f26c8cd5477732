#pragma once

// Run configuration: a YAML document with sections system, measure, compute
// and output. Every default is materialised so the echo is complete.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlab/system.hpp"
#include "wlab/transversality.hpp"

namespace wlab {

enum class MeasureKind { equilibrium, critical, uniform, bernoulli };

struct MeasureSection {
    MeasureKind kind = MeasureKind::equilibrium;
    std::vector<double> p;  ///< bernoulli only

    bool operator==(const MeasureSection&) const = default;
};

struct SweepSection {
    SweepFamily family;
    std::vector<double> t;  ///< explicit values; empty means t_count evenly spaced
    std::size_t t_count = 5;

    bool operator==(const SweepSection&) const = default;
};

struct ComputeSection {
    std::uint64_t seed = 42;
    double tol = 1e-9;
    double theta_tol = 1e-10;
    std::size_t samples = 100000;
    std::size_t graph_points = 4000000;
    int scale_min = 4;  ///< box scales 2^-scale_min ... 2^-scale_max
    int scale_max = 14;
    std::size_t anchors = 1000;
    std::size_t scan_xi = 64;
    std::size_t scan_x = 256;
    std::size_t tsujii_levels = 6;
    std::size_t ks_samples = 100000;
    double theta_x = 0.3183098861837907;  ///< base point for Theta distributions
    unsigned threads = 0;
    SweepSection sweep;

    bool operator==(const ComputeSection&) const = default;
};

struct OutputSection {
    std::string dir = "out";
    bool csv = true;

    bool operator==(const OutputSection&) const = default;
};

struct RunConfig {
    SystemSpec system;
    MeasureSection measure;
    ComputeSection compute;
    OutputSection output;

    bool operator==(const RunConfig&) const = default;
};

/// Malformed document or unknown key; message carries line and column.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Parses YAML text. Throws ConfigError for malformed input and InvalidSystem
/// when the system section violates the hypotheses.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Fully resolved YAML; parse_config(echo_config(c)) == c.
std::string echo_config(const RunConfig& config);

/// Bernoulli vector selected by the measure section.
BernoulliMeasure resolve_measure(const RunConfig& config, const System& sys);

/// t values of the sweep: explicit list, or t_count points spaced evenly in
/// (t_min, t_max] ending at t_max.
std::vector<double> sweep_values(const SweepSection& sweep);

}  // namespace wlab
