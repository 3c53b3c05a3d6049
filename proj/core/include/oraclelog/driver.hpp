#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "oraclelog/grounder.hpp"
#include "oraclelog/registry.hpp"

namespace oraclelog {

enum class RunMode { Model, Ground, Check };

struct CliConfig {
    std::vector<std::string> input_files;
    SearchPath search_path{std::filesystem::path("./lib")};
    RunMode mode = RunMode::Model;
    GroundingLimits limits;
    bool keep_external = false;
    bool allow_unsafe_recursion = false;
    bool list_builtins = false;
};

// Exit statuses of the driver pipeline.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;      // parse, import, or safety error
inline constexpr int kExitConstraint = 2;      // constraint violation
inline constexpr int kExitResourceError = 3;   // limit exceeded or oracle failure

// Full pipeline: parse -> resolve imports -> analyze -> evaluate. Model mode
// prints the sorted model, Ground mode the simplified ground program, Check
// mode the safety report. Diagnostics go to `err` as
// `<file>:<line>: <severity>: <message>` lines; malformed input never
// escapes as an exception.
int run(const CliConfig& config, const Registry& registry, std::ostream& out,
        std::ostream& err);
int run(const CliConfig& config, std::ostream& out, std::ostream& err);

// One line per active external predicate, e.g.
// `#fatt/2 std.math [ii*, iO, Oi]` with the base oracle starred.
std::string list_builtins(const ActiveBindings& bindings);

} // namespace oraclelog
