#include "oraclelog/registry.hpp"

#include <fstream>
#include <sstream>

#include "oraclelog/stdlib.hpp"

namespace oraclelog {

ExternalPredicate::ExternalPredicate(std::string name, std::size_t arity,
                                     std::vector<Oracle> oracles)
    : name_(std::move(name)), arity_(arity), oracles_(std::move(oracles)), base_index_(0) {
    for (std::size_t i = 0; i < oracles_.size(); ++i) {
        const Oracle& oracle = oracles_[i];
        if (oracle.signature.pattern.size() != arity_)
            throw RegistryError(RegistryError::Kind::Malformed,
                                "oracle pattern '" + oracle.signature.pattern.to_string() +
                                    "' does not match arity of '#" + name_ + "/" +
                                    std::to_string(arity_) + "'");
        for (std::size_t j = 0; j < i; ++j)
            if (oracles_[j].signature.pattern == oracle.signature.pattern)
                throw RegistryError(RegistryError::Kind::DuplicatePattern,
                                    "duplicate oracle pattern '" +
                                        oracle.signature.pattern.to_string() + "' for '#" +
                                        name_ + "'");
        if (oracle.is_base())
            base_index_ = i;
    }
    if (oracles_.empty() || !oracles_[base_index_].is_base())
        throw RegistryError(RegistryError::Kind::MissingBaseOracle,
                            "'#" + name_ + "/" + std::to_string(arity_) +
                                "' does not define the base (all-input) oracle");
    pattern_keys_.reserve(oracles_.size());
    for (const Oracle& oracle : oracles_)
        pattern_keys_.push_back(oracle.signature.pattern.to_string());
}

const Oracle* ExternalPredicate::find_oracle(const Pattern& pattern) const {
    for (const Oracle& oracle : oracles_)
        if (oracle.signature.pattern == pattern)
            return &oracle;
    return nullptr;
}

const std::string& ExternalPredicate::pattern_key(const Oracle& oracle) const {
    for (std::size_t i = 0; i < oracles_.size(); ++i)
        if (oracles_[i].signature.pattern == oracle.signature.pattern)
            return pattern_keys_[i];
    // Caller-supplied oracle object; fall back to a stable interned key.
    static thread_local std::string scratch;
    scratch = oracle.signature.pattern.to_string();
    return scratch;
}

const AnswerSet& ExternalPredicate::answer_call(const Oracle& oracle,
                                                const ConstantTuple& inputs) {
    const Pattern& pattern = oracle.signature.pattern;
    if (inputs.size() != pattern.input_count())
        throw ArityMismatchError("'#" + name_ + "' called with " +
                                 std::to_string(inputs.size()) + " inputs for pattern '" +
                                 pattern.to_string() + "'");
    const std::string& key = pattern_key(oracle);
    cache_.count_request();
    if (const AnswerSet* memo = cache_.lookup_memo(key, inputs)) {
        if (cache_.tracing())
            cache_.trace_request(Call::make(pattern, inputs));
        return *memo;
    }
    Call call = Call::make(pattern, inputs);
    if (cache_.tracing())
        cache_.trace_request(call);
    if (cache_.covered(call))
        return cache_.memoize(key, inputs, cache_.answer_from_extension(pattern, inputs));
    AnswerSet outputs = oracle.evaluate(inputs);
    for (const ConstantTuple& tuple : outputs)
        if (tuple.size() != pattern.output_count())
            throw OracleError("oracle '#" + name_ + "' pattern '" + pattern.to_string() +
                              "' returned a tuple of arity " + std::to_string(tuple.size()));
    cache_.record_invocation(call, pattern, inputs, outputs);
    return cache_.memoize(key, inputs, std::move(outputs));
}

SearchPath split_search_path(std::string_view spec) {
    SearchPath out;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t sep = spec.find(';', start);
        std::string_view piece =
            sep == std::string_view::npos ? spec.substr(start) : spec.substr(start, sep - start);
        if (!piece.empty())
            out.emplace_back(std::string(piece));
        if (sep == std::string_view::npos)
            break;
        start = sep + 1;
    }
    return out;
}

const ActiveBindings::Binding* ActiveBindings::find(const std::string& name) const {
    auto it = active_.find(name);
    return it == active_.end() ? nullptr : &it->second;
}

const ActiveBindings::Binding* ActiveBindings::find_qualified(const std::string& package,
                                                              const std::string& name) const {
    auto it = qualified_.find({package, name});
    return it == qualified_.end() ? nullptr : &it->second;
}

const ActiveBindings::Binding* ActiveBindings::resolve(const Atom& atom) const {
    return atom.package.empty() ? find(atom.predicate)
                                : find_qualified(atom.package, atom.predicate);
}

std::vector<ExternalPredicateRef> ActiveBindings::distinct_predicates() const {
    std::vector<ExternalPredicateRef> out;
    auto add = [&](const ExternalPredicateRef& ref) {
        for (const ExternalPredicateRef& seen : out)
            if (seen == ref)
                return;
        out.push_back(ref);
    };
    for (const auto& [name, binding] : active_)
        add(binding.predicate);
    for (const auto& [key, binding] : qualified_)
        add(binding.predicate);
    return out;
}

std::uint64_t ActiveBindings::total_invocations() const {
    std::uint64_t total = 0;
    for (const ExternalPredicateRef& pred : distinct_predicates())
        total += pred->cache().invocation_count();
    return total;
}

const std::set<std::string>& Registry::default_reserved_names() {
    static const std::set<std::string> names = {"sum",  "count", "times",   "min",
                                                "max",  "avg",   "template"};
    return names;
}

Registry Registry::with_stdlib() {
    Registry registry;
    for (Package& package : standard_packages()) {
        std::string path = package.path;
        registry.register_package(std::move(package));
        registry.implicit_.push_back(path);
    }
    return registry;
}

Registry Registry::empty() {
    return Registry();
}

void Registry::register_package(Package package) {
    if (package.path.empty())
        throw RegistryError(RegistryError::Kind::Malformed, "package path must be non-empty");
    if (packages_.count(package.path))
        throw RegistryError(RegistryError::Kind::DuplicatePackagePath,
                            "package '" + package.path + "' is already registered");
    StoredPackage stored;
    stored.path = package.path;
    for (PackageEntry& entry : package.entries) {
        if (reserved_.count(entry.predicate))
            throw RegistryError(RegistryError::Kind::ReservedName,
                                "'#" + entry.predicate + "' is reserved and cannot be defined " +
                                    "by package '" + package.path + "'");
        if (stored.entries.count(entry.predicate))
            throw RegistryError(RegistryError::Kind::Malformed,
                                "package '" + package.path + "' defines '#" + entry.predicate +
                                    "' twice");
        stored.entries.emplace(entry.predicate,
                               std::make_shared<ExternalPredicate>(entry.predicate, entry.arity,
                                                                   std::move(entry.oracles)));
        stored.entry_order.push_back(entry.predicate);
    }
    packages_.emplace(stored.path, std::move(stored));
}

namespace {

struct ManifestOracle {
    std::string predicate;
    std::size_t arity = 0;
    std::string pattern;
};

struct Manifest {
    std::string package;
    std::vector<ManifestOracle> oracles;
};

Manifest parse_manifest(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ImportError(ImportError::Kind::ManifestInvalid,
                          "cannot read manifest " + file.string());
    Manifest manifest;
    std::string line;
    int line_no = 0;
    bool saw_package = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string keyword;
        if (!(fields >> keyword) || keyword[0] == '#')
            continue;
        if (keyword == "package") {
            if (saw_package || !(fields >> manifest.package))
                throw ImportError(ImportError::Kind::ManifestInvalid,
                                  file.string() + ":" + std::to_string(line_no) +
                                      ": malformed package line");
            saw_package = true;
        } else if (keyword == "oracle") {
            std::string spec, pattern;
            if (!(fields >> spec >> pattern))
                throw ImportError(ImportError::Kind::ManifestInvalid,
                                  file.string() + ":" + std::to_string(line_no) +
                                      ": malformed oracle line");
            std::size_t slash = spec.find('/');
            if (slash == std::string::npos)
                throw ImportError(ImportError::Kind::ManifestInvalid,
                                  file.string() + ":" + std::to_string(line_no) +
                                      ": oracle spec must be <pred>/<arity>");
            ManifestOracle oracle;
            oracle.predicate = spec.substr(0, slash);
            try {
                oracle.arity = std::stoul(spec.substr(slash + 1));
            } catch (const std::exception&) {
                throw ImportError(ImportError::Kind::ManifestInvalid,
                                  file.string() + ":" + std::to_string(line_no) +
                                      ": bad arity in '" + spec + "'");
            }
            oracle.pattern = pattern;
            manifest.oracles.push_back(std::move(oracle));
        } else {
            throw ImportError(ImportError::Kind::ManifestInvalid,
                              file.string() + ":" + std::to_string(line_no) +
                                  ": unknown keyword '" + keyword + "'");
        }
    }
    if (!saw_package)
        throw ImportError(ImportError::Kind::ManifestInvalid,
                          file.string() + ": missing 'package' line");
    return manifest;
}

} // namespace

const Registry::StoredPackage& Registry::require_manifest(const std::string& dotted,
                                                          const SearchPath& search_path) const {
    std::filesystem::path found;
    for (const std::filesystem::path& dir : search_path) {
        std::filesystem::path candidate = dir / (dotted + ".pkg");
        std::error_code ec;
        if (std::filesystem::exists(candidate, ec)) {
            found = candidate;
            break;
        }
    }
    if (found.empty()) {
        std::string dirs;
        for (const std::filesystem::path& dir : search_path)
            dirs += (dirs.empty() ? "" : ";") + dir.string();
        throw ImportError(ImportError::Kind::PackageNotFound,
                          "package '" + dotted + "' not found (searched: " +
                              (dirs.empty() ? "<empty path>" : dirs) + ")");
    }
    Manifest manifest = parse_manifest(found);
    if (manifest.package != dotted)
        throw ImportError(ImportError::Kind::ManifestInvalid,
                          found.string() + ": declares package '" + manifest.package +
                              "' but was imported as '" + dotted + "'");
    auto it = packages_.find(dotted);
    if (it == packages_.end())
        throw ImportError(ImportError::Kind::ManifestMismatch,
                          found.string() + ": package '" + dotted +
                              "' is not registered in this binary");
    const StoredPackage& stored = it->second;
    for (const ManifestOracle& declared : manifest.oracles) {
        auto entry = stored.entries.find(declared.predicate);
        if (entry == stored.entries.end())
            throw ImportError(ImportError::Kind::ManifestMismatch,
                              found.string() + ": '" + declared.predicate +
                                  "' is declared but not provided by package '" + dotted + "'");
        const ExternalPredicate& predicate = *entry->second;
        if (predicate.arity() != declared.arity)
            throw ImportError(ImportError::Kind::ManifestMismatch,
                              found.string() + ": '" + declared.predicate + "' has arity " +
                                  std::to_string(predicate.arity()) + ", manifest declares " +
                                  std::to_string(declared.arity));
        Pattern pattern;
        try {
            pattern = Pattern::parse(declared.pattern);
        } catch (const std::invalid_argument& e) {
            throw ImportError(ImportError::Kind::ManifestInvalid,
                              found.string() + ": " + e.what());
        }
        if (!predicate.find_oracle(pattern))
            throw ImportError(ImportError::Kind::ManifestMismatch,
                              found.string() + ": no oracle with pattern '" + declared.pattern +
                                  "' for '#" + declared.predicate + "' in package '" + dotted +
                                  "'");
    }
    return stored;
}

ActiveBindings Registry::resolve_imports(const std::vector<ImportDirective>& imports,
                                         const SearchPath& search_path,
                                         Warnings* warnings) const {
    ActiveBindings bindings;
    for (const auto& [path, stored] : packages_)
        for (const auto& [name, predicate] : stored.entries)
            bindings.qualified_.emplace(std::make_pair(path, name),
                                        ActiveBindings::Binding{predicate, path});

    auto activate = [&](const std::string& name, const ExternalPredicateRef& predicate,
                        const std::string& package, int line) {
        auto it = bindings.active_.find(name);
        if (it != bindings.active_.end()) {
            if (it->second.package == package)
                return; // re-import of the same package
            if (warnings)
                warnings->push_back(
                    {Warning::Kind::PredicateShadowed,
                     "'#" + name + "' from package '" + package + "' shadows the definition " +
                         "from package '" + it->second.package + "'",
                     "", line});
            it->second = ActiveBindings::Binding{predicate, package};
        } else {
            bindings.active_.emplace(name, ActiveBindings::Binding{predicate, package});
        }
    };

    for (const std::string& path : implicit_) {
        const StoredPackage& stored = packages_.at(path);
        for (const std::string& name : stored.entry_order)
            activate(name, stored.entries.at(name), path, 0);
    }

    for (const ImportDirective& directive : imports) {
        if (directive.wildcard) {
            const StoredPackage& stored = require_manifest(directive.dotted(), search_path);
            for (const std::string& name : stored.entry_order)
                activate(name, stored.entries.at(name), stored.path, directive.line);
        } else {
            if (directive.path.size() < 2)
                throw ImportError(ImportError::Kind::InvalidImportPath,
                                  "import '" + directive.dotted() +
                                      "' must name <package>.<predicate> or <package>.*");
            std::string name = directive.path.back();
            std::string package;
            for (std::size_t i = 0; i + 1 < directive.path.size(); ++i)
                package += (i > 0 ? "." : "") + directive.path[i];
            const StoredPackage& stored = require_manifest(package, search_path);
            auto entry = stored.entries.find(name);
            if (entry == stored.entries.end())
                throw ImportError(ImportError::Kind::EntryNotFound,
                                  "package '" + package + "' does not define '#" + name + "'");
            activate(name, entry->second, stored.path, directive.line);
        }
    }
    return bindings;
}

} // namespace oraclelog
