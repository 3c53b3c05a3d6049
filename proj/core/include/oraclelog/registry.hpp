#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "oraclelog/ast.hpp"
#include "oraclelog/call_cache.hpp"
#include "oraclelog/diagnostics.hpp"
#include "oraclelog/pattern.hpp"

namespace oraclelog {

// One external predicate together with its oracles (one per distinct
// pattern, the all-input base oracle always present) and the shared call
// cache. All atoms over the predicate, whatever pattern they use, funnel
// their calls through this object.
class ExternalPredicate {
public:
    ExternalPredicate(std::string name, std::size_t arity, std::vector<Oracle> oracles);

    const std::string& name() const { return name_; }
    std::size_t arity() const { return arity_; }
    const std::vector<Oracle>& oracles() const { return oracles_; }
    const Oracle& base_oracle() const { return oracles_[base_index_]; }
    const Oracle* find_oracle(const Pattern& pattern) const;

    ExternalPredicateCache& cache() { return cache_; }
    const ExternalPredicateCache& cache() const { return cache_; }

    // Answers `inputs` under `oracle`, going through the cache: a call
    // subsumed by a performed one is served from the known extension,
    // anything else invokes the oracle, merges the full result tuples into
    // the extension and records the call. The returned reference stays valid
    // for the lifetime of this predicate; repeated calls are pure lookups.
    const AnswerSet& answer_call(const Oracle& oracle, const ConstantTuple& inputs);

    // Direct handle on the memo for one oracle's pattern; a lookup hit there
    // is equivalent to (and cheaper than) a full answer_call.
    const ExternalPredicateCache::AnswerMap& memo_map(const Oracle& oracle) {
        return cache_.memo_map(pattern_key(oracle));
    }

private:
    const std::string& pattern_key(const Oracle& oracle) const;

    std::string name_;
    std::size_t arity_;
    std::vector<Oracle> oracles_;
    std::vector<std::string> pattern_keys_;
    std::size_t base_index_;
    ExternalPredicateCache cache_;
};

using ExternalPredicateRef = std::shared_ptr<ExternalPredicate>;

// Declarative form used to assemble packages before registration.
struct PackageEntry {
    std::string predicate;
    std::size_t arity = 0;
    std::vector<Oracle> oracles;
};

struct Package {
    std::string path; // dotted, e.g. "std.math"
    std::vector<PackageEntry> entries;
};

class RegistryError : public std::runtime_error {
public:
    enum class Kind {
        ReservedName,
        MissingBaseOracle,
        DuplicatePattern,
        DuplicatePackagePath,
        Malformed,
    };

    RegistryError(Kind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class ImportError : public std::runtime_error {
public:
    enum class Kind {
        PackageNotFound,
        ManifestInvalid,
        ManifestMismatch,
        EntryNotFound,
        InvalidImportPath,
    };

    ImportError(Kind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

using SearchPath = std::vector<std::filesystem::path>;

// Splits a `dir1;dir2;...` path option; empty components are dropped.
SearchPath split_search_path(std::string_view spec);

// Name resolution for the external atoms of one program: the active map as
// computed by import resolution, plus direct package-qualified lookup that
// bypasses it.
class ActiveBindings {
public:
    struct Binding {
        ExternalPredicateRef predicate;
        std::string package; // providing package path
    };

    const Binding* find(const std::string& name) const;
    const Binding* find_qualified(const std::string& package, const std::string& name) const;
    // Resolution for an external atom: qualified atoms bypass the active map.
    const Binding* resolve(const Atom& atom) const;

    const std::map<std::string, Binding>& active() const { return active_;	}

    // Distinct predicate objects reachable through these bindings.
    std::vector<ExternalPredicateRef> distinct_predicates() const;
    // Total raw oracle invocations across those predicates.
    std::uint64_t total_invocations() const;

private:
    friend class Registry;
    std::map<std::string, Binding> active_;
    std::map<std::pair<std::string, std::string>, Binding> qualified_;
};

// Houses registered packages and produces bindings for programs. Packages
// are registered in-process; an import directive additionally requires a
// `<path>.pkg` manifest on the search path declaring what the binary must
// provide. The standard library is registered and implicitly active unless
// the registry is created empty.
class Registry {
public:
    // Registry preloaded with the standard packages.
    static Registry with_stdlib();
    // No packages, nothing implicitly active.
    static Registry empty();

    // Validates and stores a package (not yet active). Throws RegistryError.
    void register_package(Package package);

    // Seeds the implicit bindings, applies the import directives in order
    // (later directives shadow earlier bindings with a warning) and returns
    // the resulting name resolution. Throws ImportError.
    ActiveBindings resolve_imports(const std::vector<ImportDirective>& imports,
                                   const SearchPath& search_path,
                                   Warnings* warnings = nullptr) const;

    bool has_package(const std::string& path) const { return packages_.count(path) > 0; }
    const std::set<std::string>& reserved_names() const { return reserved_; }

    static const std::set<std::string>& default_reserved_names();

private:
    struct StoredPackage {
        std::string path;
        std::map<std::string, ExternalPredicateRef> entries;
        std::vector<std::string> entry_order;
    };

    const StoredPackage& require_manifest(const std::string& dotted,
                                          const SearchPath& search_path) const;

    std::map<std::string, StoredPackage> packages_;
    std::vector<std::string> implicit_; // packages active without an import
    std::set<std::string> reserved_ = default_reserved_names();
};

} // namespace oraclelog
