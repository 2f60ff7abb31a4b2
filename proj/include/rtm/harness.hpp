#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtm/corpus.hpp"
#include "rtm/engine.hpp"
#include "rtm/object_graph.hpp"

namespace rtm {

enum class MigrationErrorKind { InvalidInput, RuleFailure, MissingTrace, AmbiguousTrace, Unbindable, InvalidEdit };

class MigrationError : public std::runtime_error {
public:
    MigrationError(MigrationErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    MigrationErrorKind kind() const { return kind_; }

private:
    MigrationErrorKind kind_;
};

/// Sets `field` to `value` on every object of class `class_name`.
struct EditOp {
    std::string class_name;
    std::string field;
    Value value;
};

/// "Class.field=LITERAL"; throws SyntaxError.
EditOp parse_edit(std::string_view text);

/// Applies edits to objects of metamodel `mm`. Strict mode rejects unknown
/// classes/fields and kind mismatches; lenient mode skips them (used to
/// project the expected round-trip result onto the source version).
void apply_edits(ObjectGraph& g, std::span<const EditOp> edits, const MetamodelSet& mms, const std::string& mm,
                 bool strict);

/// The scenario-independent glue: one instance per round trip, holding
/// the trace and the engine's id counter. Only the ScenarioDef differs
/// between scenarios.
class ScenarioTask {
public:
    explicit ScenarioTask(const LoadedScenario& scenario, Date today = {2020, 1, 1});

    /// Returns a graph holding only target-version objects. Stores a copy
    /// of `g` as trace when the scenario asks for one.
    ObjectGraph migrate(const ObjectGraph& g);
    /// Returns a graph holding only source-version objects. Trace in-params
    /// are resolved per subject by class from the stored trace.
    ObjectGraph migrate_back(const ObjectGraph& g);

    const std::optional<ObjectGraph>& trace() const { return trace_; }
    const LoadedScenario& scenario() const { return *scenario_; }
    Date today() const { return engine_.today(); }

private:
    struct Signature {
        LoadedModule::Invocable inv;
        std::string subject_param;
        std::string result_param;
        std::vector<const Param*> trace_params;
    };

    Signature signature(const std::string& invocable, const std::string& subject_mm,
                        const std::string& result_mm) const;
    void check_conforms(const ObjectGraph& g, const std::string& mm, const char* what) const;
    std::vector<std::string> subjects(const ObjectGraph& g, const std::string& mm) const;

    const LoadedScenario* scenario_;
    Engine engine_;
    std::optional<ObjectGraph> trace_;
    std::map<std::string, std::string> origin_;  // migrated root id -> source subject id
};

struct RoundTripResult {
    ObjectGraph migrated;
    ObjectGraph result;
    bool identical = false;           // vs. the input with the edits projected onto it
    bool identical_to_input = false;  // vs. the unedited input
};

RoundTripResult roundtrip(ScenarioTask& task, const ObjectGraph& g, std::span<const EditOp> edits = {});

}  // namespace rtm
