#pragma once

// Subcommands as library calls: each writes its artifacts into an output
// directory and returns a JSON summary and an exit status.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wlab/config.hpp"

namespace wlab {

using Json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "1.0";
inline constexpr const char* wlab_version = "1.0.0";

enum ExitCode { exit_ok = 0, exit_invalid = 1, exit_numerical = 2 };

struct CommandResult {
    int exit_code = exit_ok;
    Json summary;
    std::vector<std::string> files;  ///< written artifacts, relative to the output directory
};

const std::vector<std::string>& command_names();

/// x values for `eval`; empty means x = k / 10, k = 0..10.
struct CommandInputs {
    std::vector<double> eval_x;
};

/// Runs one subcommand. Writes `<command>.json`, its CSVs, `config.yaml` and
/// `schema.json` into `out`. Errors from the numerical modules become exit
/// code 2 with a module-qualified code in the summary; invalid input becomes 1.
CommandResult run_command(const std::string& name, const RunConfig& config, const std::filesystem::path& out,
                          const CommandInputs& inputs = {});

/// Summary document for a configuration that failed validation.
Json invalid_system_document(const std::vector<Violation>& violations);
/// Summary document for an error; `code` is module-qualified, e.g. `config.unknown_key`.
Json error_document(const std::string& code, const std::string& message);

/// JSON Schema (draft 7) every summary document validates against.
Json output_schema();

/// Header shared by every summary: schema_version, kind and provenance.
Json document_header(const std::string& kind, const RunConfig* config);

/// Certification rule of `report`: certified only when one of the analytic
/// checks returned true.
struct Verdict {
    bool certified = false;
    std::string by;  ///< "example2-conditions", "cosine-transversality" or empty
    double claimed_dim = 0.0;
};
Verdict certification_verdict(const System& sys);

}  // namespace wlab
