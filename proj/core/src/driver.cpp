#include "oraclelog/driver.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "oraclelog/parser.hpp"

namespace oraclelog {

namespace {

void diagnostic(std::ostream& err, const std::string& file, int line,
                const std::string& severity, const std::string& message) {
    if (!file.empty()) {
        err << file;
        if (line > 0)
            err << ":" << line;
        err << ": ";
    }
    err << severity << ": " << message << "\n";
}

struct LoadedProgram {
    Program program;
    std::vector<std::string> rule_files; // parallel to program.rules
    std::string first_file;
};

LoadedProgram load_program(const std::vector<std::string>& files, std::ostream& err) {
    LoadedProgram loaded;
    for (const std::string& file : files) {
        if (loaded.first_file.empty())
            loaded.first_file = file;
        std::ifstream in(file);
        if (!in)
            throw std::runtime_error("cannot read input file '" + file + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        Warnings warnings;
        Program parsed;
        try {
            parsed = parse_program(buffer.str(), &warnings);
        } catch (const ParseError& error) {
            diagnostic(err, file, error.line(), "error", error.what());
            throw;
        }
        for (const Warning& warning : warnings)
            diagnostic(err, file, warning.line, "warning", warning.message);
        for (const ImportDirective& directive : parsed.imports)
            loaded.program.imports.push_back(directive);
        for (Rule& rule : parsed.rules) {
            loaded.rule_files.push_back(file);
            loaded.program.rules.push_back(std::move(rule));
        }
    }
    return loaded;
}

std::string file_of_rule(const LoadedProgram& loaded, std::size_t rule_index) {
    return rule_index < loaded.rule_files.size() ? loaded.rule_files[rule_index]
                                                 : loaded.first_file;
}

void print_safety_failures(const LoadedProgram& loaded, const SafetyReport& report,
                           std::ostream& err) {
    for (const SafetyReport::Entry& entry : report.entries) {
        if (entry.verdict != SafetyVerdict::Unsafe)
            continue;
        diagnostic(err, file_of_rule(loaded, entry.rule_index), entry.line, "error",
                   entry.reason);
    }
}

} // namespace

std::string list_builtins(const ActiveBindings& bindings) {
    std::string out;
    for (const auto& [name, binding] : bindings.active()) {
        const ExternalPredicate& predicate = *binding.predicate;
        out += "#" + name + "/" + std::to_string(predicate.arity()) + " " + binding.package +
               " [";
        for (std::size_t i = 0; i < predicate.oracles().size(); ++i) {
            const Oracle& oracle = predicate.oracles()[i];
            if (i > 0)
                out += ", ";
            out += oracle.signature.pattern.to_string();
            if (oracle.is_base())
                out += "*";
        }
        out += "]\n";
    }
    return out;
}

int run(const CliConfig& config, const Registry& registry, std::ostream& out,
        std::ostream& err) {
    LoadedProgram loaded;
    try {
        loaded = load_program(config.input_files, err);
    } catch (const ParseError&) {
        return kExitInputError; // already reported with location
    } catch (const std::exception& error) {
        diagnostic(err, "", 0, "error", error.what());
        return kExitInputError;
    }

    ActiveBindings bindings;
    Warnings import_warnings;
    try {
        bindings = registry.resolve_imports(loaded.program.imports, config.search_path,
                                            &import_warnings);
    } catch (const ImportError& error) {
        diagnostic(err, loaded.first_file, 0, "error", error.what());
        return kExitInputError;
    }
    for (const Warning& warning : import_warnings)
        diagnostic(err, loaded.first_file, warning.line, "warning", warning.message);

    if (config.list_builtins) {
        out << list_builtins(bindings);
        return kExitOk;
    }

    // Analysis runs up front so its warnings reach the diagnostic stream
    // even when evaluation fails later.
    AnalyzeOptions analyze_options;
    analyze_options.allow_unsafe_recursion = config.allow_unsafe_recursion;
    AnalysisResult analysis;
    try {
        analysis = analyze_program(loaded.program, bindings, analyze_options);
    } catch (const SafetyError& error) {
        if (config.mode == RunMode::Check)
            out << error.report().to_string();
        print_safety_failures(loaded, error.report(), err);
        return kExitInputError;
    }
    for (const Warning& warning : analysis.warnings)
        diagnostic(err, file_of_rule(loaded, 0), warning.line, "warning", warning.message);

    if (config.mode == RunMode::Check) {
        out << analysis.report.to_string();
        return kExitOk;
    }

    EvalOptions options;
    options.limits = config.limits;
    options.keep_external = config.keep_external;
    options.allow_unsafe_recursion = config.allow_unsafe_recursion;
    options.collect_ground_rules = config.mode == RunMode::Ground;

    try {
        EvalResult result = evaluate(loaded.program, bindings, options);
        for (const Warning& warning : result.warnings)
            if (warning.kind != Warning::Kind::UnsafeRecursionAllowed) // reported above
                diagnostic(err, loaded.first_file, warning.line, "warning", warning.message);
        if (config.mode == RunMode::Model) {
            for (const std::string& line : result.sorted_model_lines())
                out << line << "\n";
        } else {
            for (const GroundRule& rule : result.ground_rules)
                out << render(rule) << "\n";
        }
        return kExitOk;
    } catch (const SafetyError& error) {
        print_safety_failures(loaded, error.report(), err);
        return kExitInputError;
    } catch (const NotStratifiableError& error) {
        diagnostic(err, loaded.first_file, 0, "error", error.what());
        return kExitInputError;
    } catch (const ConstraintViolationError& error) {
        diagnostic(err, loaded.first_file, 0, "error", error.what());
        return kExitConstraint;
    } catch (const LimitExceededError& error) {
        diagnostic(err, loaded.first_file, 0, "error", error.what());
        return kExitResourceError;
    } catch (const OracleFailureError& error) {
        diagnostic(err, loaded.first_file, 0, "error", error.what());
        return kExitResourceError;
    }
}

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
    Registry registry = Registry::with_stdlib();
    return run(config, registry, out, err);
}

} // namespace oraclelog
