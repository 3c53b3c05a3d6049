#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oraclelog/driver.hpp"

namespace {

// Accept the traditional single-dash spelling `-path=...` by rewriting it to
// the canonical double-dash form before option parsing.
std::vector<std::string> normalize_args(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.rfind("-path=", 0) == 0 || arg == "-path")
            arg = "-" + arg;
        args.push_back(std::move(arg));
    }
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Datalog engine with externally defined predicates"};

    std::vector<std::string> files;
    std::string mode = "model";
    std::string path;
    oraclelog::CliConfig config;
    bool list_builtins = false;

    app.add_option("files", files, "program files");
    app.add_option("--mode", mode, "output mode: model, ground, or check")
        ->check(CLI::IsMember({"model", "ground", "check"}));
    app.add_option("--path", path, "package search path, directories separated by ';'");
    app.add_option("--max-steps", config.limits.max_iterations, "fixpoint round limit")
        ->check(CLI::PositiveNumber);
    app.add_option("--max-constants", config.limits.max_new_constants,
                   "invented constant limit")
        ->check(CLI::PositiveNumber);
    app.add_flag("--keep-external", config.keep_external,
                 "keep discharged external atoms in ground rules");
    app.add_flag("--allow-unsafe-recursion", config.allow_unsafe_recursion,
                 "downgrade strong-safety violations to warnings");
    app.add_flag("--list-builtins", list_builtins, "list active external predicates and exit");

    std::vector<std::string> args = normalize_args(argc, argv);
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    config.input_files = files;
    config.list_builtins = list_builtins;
    if (config.input_files.empty() && !config.list_builtins) {
        std::cerr << "error: no input files (see --help)\n";
        return oraclelog::kExitInputError;
    }

    config.mode = mode == "ground" ? oraclelog::RunMode::Ground
                  : mode == "check" ? oraclelog::RunMode::Check
                                    : oraclelog::RunMode::Model;

    config.search_path.clear();
    if (const char* env = std::getenv("ORACLELOG_PATH"))
        for (auto& dir : oraclelog::split_search_path(env))
            config.search_path.push_back(dir);
    if (!path.empty())
        for (auto& dir : oraclelog::split_search_path(path))
            config.search_path.push_back(dir);
    else
        config.search_path.emplace_back("./lib");

    return oraclelog::run(config, std::cout, std::cerr);
}
