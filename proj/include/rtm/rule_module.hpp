#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtm/diagnostics.hpp"
#include "rtm/expr.hpp"
#include "rtm/metamodel.hpp"

namespace rtm {

enum class ParamDirection { In, Out, Var };
std::string_view direction_name(ParamDirection d);

/// Either an object type (`Metamodel.Class`) or a value kind.
struct TypeRef {
    bool is_object = false;
    ValueKind value_kind = ValueKind::String;  // String, Int, Bool or Date
    ClassRef cls;

    static TypeRef object(ClassRef c) { return {true, ValueKind::Ref, std::move(c)}; }
    static TypeRef value(ValueKind k) { return {false, k, {}}; }
    std::string str() const;
    friend bool operator==(const TypeRef&, const TypeRef&) = default;
};

struct Param {
    std::string name;
    ParamDirection direction = ParamDirection::In;
    TypeRef type;
    SourceLoc loc;
    friend bool operator==(const Param&, const Param&) = default;
};

enum class Action { Preserve, Create };

/// `field == expr` (constraint) or `field := expr` (assignment).
struct AttrClause {
    std::string field;
    bool assign = false;
    ExprPtr expr;
    SourceLoc loc;
    friend bool operator==(const AttrClause& a, const AttrClause& b) {
        return a.field == b.field && a.assign == b.assign && expr_equal(a.expr, b.expr);
    }
};

/// `field -> node`; carries the action of its owning node.
struct RefClause {
    std::string field;
    std::string target;
    SourceLoc loc;
    friend bool operator==(const RefClause&, const RefClause&) = default;
};

struct PatternNode {
    std::string name;
    ClassRef cls;
    Action action = Action::Preserve;
    std::optional<std::string> bound_param;   // `= param`
    std::optional<std::string> export_param;  // `=> param`
    std::vector<AttrClause> attrs;
    std::vector<RefClause> refs;
    SourceLoc loc;
    friend bool operator==(const PatternNode&, const PatternNode&) = default;
};

struct Rule {
    std::string name;
    std::vector<Param> params;
    std::vector<PatternNode> nodes;
    SourceLoc loc;

    const Param* param(std::string_view n) const;
    const PatternNode* node(std::string_view n) const;
    friend bool operator==(const Rule&, const Rule&) = default;
};

/// One step argument. `callee = source` passes a value in;
/// `callee -> target` receives an out value.
struct StepArg {
    enum class Mode { In, Out };
    enum class Source { Param, Variable, Literal };

    std::string callee_param;
    Mode mode = Mode::In;
    Source source = Source::Param;
    std::string name;  // caller param or unit variable (without '?')
    Value literal;
    SourceLoc loc;
    friend bool operator==(const StepArg&, const StepArg&) = default;
};

struct Step {
    std::string callee;  // possibly qualified: Module.name
    std::vector<StepArg> args;
    SourceLoc loc;
    friend bool operator==(const Step&, const Step&) = default;
};

struct SequentialUnit {
    std::string name;
    std::vector<Param> params;
    std::vector<Step> steps;
    SourceLoc loc;

    const Param* param(std::string_view n) const;
    friend bool operator==(const SequentialUnit&, const SequentialUnit&) = default;
};

struct Include {
    std::string path;
    SourceLoc loc;
    friend bool operator==(const Include&, const Include&) = default;
};

struct RuleModule {
    std::string name;
    std::vector<Include> includes;
    std::vector<Rule> rules;
    std::vector<SequentialUnit> units;
    friend bool operator==(const RuleModule&, const RuleModule&) = default;
};

/// Throws SyntaxError on malformed text, unknown direction keywords and
/// duplicate rule/unit/param/node names.
RuleModule parse_module(std::string_view text);
std::string print_module(const RuleModule& m);

/// A parsed module with its includes resolved. Included invocables are
/// reachable as `<IncludedModule>.<name>` and run in their own scope.
class LoadedModule {
public:
    struct Invocable {
        const Rule* rule = nullptr;
        const SequentialUnit* unit = nullptr;
        const LoadedModule* scope = nullptr;

        const std::string& name() const { return rule ? rule->name : unit->name; }
        const std::vector<Param>& params() const { return rule ? rule->params : unit->params; }
        const Param* param(std::string_view n) const { return rule ? rule->param(n) : unit->param(n); }
    };

    LoadedModule(RuleModule ast, std::filesystem::path source,
                 std::vector<std::shared_ptr<const LoadedModule>> includes);

    const RuleModule& ast() const { return ast_; }
    const std::string& name() const { return ast_.name; }
    const std::filesystem::path& source() const { return source_; }
    const std::vector<std::shared_ptr<const LoadedModule>>& includes() const { return includes_; }

    std::optional<Invocable> lookup(std::string_view qualified) const;

private:
    RuleModule ast_;
    std::filesystem::path source_;
    std::vector<std::shared_ptr<const LoadedModule>> includes_;
};

/// Reads and parses `path`, resolving includes relative to the including
/// file. Include cycles and clashing included module names are errors.
std::shared_ptr<const LoadedModule> load_module(const std::filesystem::path& path);
/// Module text whose includes resolve against `base_dir`.
std::shared_ptr<const LoadedModule> load_module_text(std::string_view text,
                                                     const std::filesystem::path& base_dir = ".");

/// Static checks against the metamodels: classes, fields, parameter
/// directions and bindings, expression kinds, unit dataflow. Included
/// modules are checked too.
ValidationReport validate_module(const LoadedModule& m, const MetamodelSet& mms);

}  // namespace rtm
