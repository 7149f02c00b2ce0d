#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qkdsec/config.h"
#include "qkdsec/report.h"

namespace qkdsec {

inline constexpr std::string_view kSchemaVersion = "v1";

/// Process exit codes of the CLI.
enum class ExitCode : int {
    Ok = 0,
    Internal = 1,
    Validation = 2,
    Numerical = 3,
    Resource = 4,
    Io = 5,
};

struct OutputSpec {
    std::optional<std::string> path;
    ReportFormat format = ReportFormat::Json;
};

/// One unit of work: a module kind, its parameters, the seed for any randomized
/// step, and where the report goes.
struct Scenario {
    std::string kind;
    nlohmann::json params = nlohmann::json::object();
    uint64_t seed = 0;
    OutputSpec output;
};

const std::vector<std::string> &scenario_kinds();

/// Parses a single scenario object. `require_version` demands "version": "v1"
/// on the object itself (batch entries inherit it from the enclosing document).
Scenario parse_scenario(const nlohmann::json &doc, bool require_version = true);

/// {"version": "v1", "scenarios": [...]} or a single scenario object.
std::vector<Scenario> parse_scenario_document(const nlohmann::json &doc);

/// Dispatches to the module named by `kind`. Throws the library error types;
/// `exit_code_for` maps them to process exit codes.
MetricReport run_scenario(const Scenario &s, const Config &cfg = Config::defaults());

/// Maps the exception currently being handled to an exit code and writes its
/// message to `message`.
ExitCode exit_code_for_current_exception(std::string &message);

/// Runs every scenario, writing each report to its output path (or appending
/// to `stdout_text` when none is given). Stops at the first failure.
ExitCode run_batch(const std::vector<Scenario> &scenarios, const Config &cfg, std::string &stdout_text,
                   std::string &error_text);

}  // namespace qkdsec
