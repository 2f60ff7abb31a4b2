#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtm/expr.hpp"
#include "rtm/matcher.hpp"
#include "rtm/metamodel.hpp"
#include "rtm/object_graph.hpp"
#include "rtm/rule_module.hpp"

namespace rtm {

using Bindings = std::map<std::string, Value>;

enum class FailureKind { NoMatch, StepFailed, EvalError, BindingError, UnknownInvocable };

struct Failure {
    FailureKind kind;
    std::string detail;
    std::optional<std::size_t> step;  // zero-based, for unit step failures
};

struct ApplicationResult {
    bool success = false;
    Bindings env;  // out parameters of the invocable
    std::vector<std::string> created_ids;
    std::optional<Failure> failure;

    std::string describe() const;
};

/// Applies rules and sequential units to a graph. Owns the fresh-id
/// counter; created objects are named "<rule>#<counter>".
class Engine {
public:
    Engine(const MetamodelSet& mms, Date today) : mms_(&mms), today_(today) {}

    Date today() const { return today_; }
    std::size_t counter() const { return counter_; }
    void set_counter(std::size_t c) { counter_ = c; }

    /// First match wins. All-or-nothing: on failure the graph is untouched
    /// and the counter is restored.
    ApplicationResult apply_rule(const Rule& rule, ObjectGraph& g, const Bindings& args);

    /// Runs steps in order inside `scope` (used to resolve callee names).
    /// Stops at the first failing step; earlier steps' changes persist.
    ApplicationResult execute_unit(const SequentialUnit& unit, const LoadedModule& scope, ObjectGraph& g,
                                   const Bindings& args);

    ApplicationResult invoke(const LoadedModule::Invocable& inv, ObjectGraph& g, const Bindings& args);
    ApplicationResult invoke(const LoadedModule& module, std::string_view name, ObjectGraph& g, const Bindings& args);

private:
    std::string fresh_id(const std::string& rule, const ObjectGraph& g);
    std::optional<std::string> check_args(const std::vector<Param>& params, const ObjectGraph& g,
                                          const Bindings& args) const;

    const MetamodelSet* mms_;
    Date today_;
    std::size_t counter_ = 0;
};

}  // namespace rtm
