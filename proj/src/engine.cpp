#include "rtm/engine.hpp"

#include <sstream>

namespace rtm {

std::string ApplicationResult::describe() const {
    if (success) return "success";
    if (!failure) return "failure";
    switch (failure->kind) {
        case FailureKind::NoMatch: return "no match: " + failure->detail;
        case FailureKind::StepFailed: return failure->detail;
        case FailureKind::EvalError: return "evaluation error: " + failure->detail;
        case FailureKind::BindingError: return "binding error: " + failure->detail;
        case FailureKind::UnknownInvocable: return "unknown invocable: " + failure->detail;
    }
    return "failure";
}

namespace {

ApplicationResult fail(FailureKind kind, std::string detail, std::optional<std::size_t> step = {}) {
    ApplicationResult r;
    r.failure = Failure{kind, std::move(detail), step};
    return r;
}

}  // namespace

std::string Engine::fresh_id(const std::string& rule, const ObjectGraph& g) {
    for (;;) {
        std::string id = rule + "#" + std::to_string(++counter_);
        if (!g.contains(id)) return id;
    }
}

std::optional<std::string> Engine::check_args(const std::vector<Param>& params, const ObjectGraph& g,
                                              const Bindings& args) const {
    for (const auto& p : params) {
        if (p.direction != ParamDirection::In) continue;
        auto it = args.find(p.name);
        if (it == args.end()) return "in param '" + p.name + "' is unbound";
        const Value& v = it->second;
        if (p.type.is_object) {
            if (v.kind() != ValueKind::Ref) return "in param '" + p.name + "' expects an object of " + p.type.cls.str();
            const ObjectNode* obj = g.find(v.as_ref());
            if (!obj) return "in param '" + p.name + "': object '" + v.as_ref() + "' not in graph";
            if (obj->cls != p.type.cls)
                return "in param '" + p.name + "': object '" + obj->id + "' is " + obj->cls.str() + ", expected " +
                       p.type.cls.str();
        } else if (!v.is_null() && v.kind() != p.type.value_kind) {
            return "in param '" + p.name + "' expects " + p.type.str() + ", got " + std::string(kind_name(v.kind()));
        }
    }
    return std::nullopt;
}

ApplicationResult Engine::apply_rule(const Rule& rule, ObjectGraph& g, const Bindings& args) {
    if (auto err = check_args(rule.params, g, args)) return fail(FailureKind::BindingError, *err);

    std::vector<PatternNode> lhs;
    for (const auto& n : rule.nodes)
        if (n.action == Action::Preserve) lhs.push_back(n);

    Env pre;
    pre.today = today_;
    for (const auto& p : rule.params)
        if (p.direction == ParamDirection::In) pre.bindings[p.name] = args.at(p.name);

    std::optional<Match> match;
    try {
        match = find_first_match(lhs, g, pre);
    } catch (const rtm::EvalError& e) {
        return fail(FailureKind::EvalError, "rule " + rule.name + ": " + e.what());
    } catch (const BindingError& e) {
        return fail(FailureKind::BindingError, "rule " + rule.name + ": " + e.what());
    }
    if (!match) return fail(FailureKind::NoMatch, "rule " + rule.name);

    // Stage every creation; commit only after all assignments evaluated.
    const std::size_t counter_before = counter_;
    std::map<std::string, std::string> created;  // local -> fresh id
    for (const auto& n : rule.nodes)
        if (n.action == Action::Create) created[n.name] = fresh_id(rule.name, g);

    std::vector<ObjectNode> staged;
    Env& env = match->env;
    env.graph = &g;
    try {
        for (const auto& n : rule.nodes) {
            if (n.action != Action::Create) continue;
            const ClassDef* cls = mms_->find_class(n.cls);
            if (!cls) throw rtm::EvalError(EvalErrorKind::KindMismatch, "unknown class " + n.cls.str());
            ObjectNode obj{created[n.name], n.cls, {}};
            for (const auto& a : n.attrs) {
                Value v = eval(*a.expr, env);
                const FieldDef* f = cls->field(a.field);
                if (!f) throw rtm::EvalError(EvalErrorKind::KindMismatch, "unknown field " + n.cls.str() + "." + a.field);
                if (v.is_null() && !f->optional)
                    throw rtm::EvalError(EvalErrorKind::NullOperand, "null assigned to mandatory " + n.cls.str() + "." + a.field);
                if (!v.is_null() && v.kind() != value_kind_of(f->kind))
                    throw rtm::EvalError(EvalErrorKind::KindMismatch,
                                         n.cls.str() + "." + a.field + " expects " + std::string(field_kind_name(f->kind)) +
                                             ", got " + std::string(kind_name(v.kind())));
                obj.set(a.field, std::move(v));
            }
            for (const auto& c : n.refs) {
                if (auto it = created.find(c.target); it != created.end()) obj.set(c.field, Value::ref(it->second));
                else if (auto jt = match->nodes.find(c.target); jt != match->nodes.end())
                    obj.set(c.field, Value::ref(jt->second));
                else throw rtm::EvalError(EvalErrorKind::UnboundName, "node " + c.target);
            }
            staged.push_back(std::move(obj));
        }
    } catch (const rtm::EvalError& e) {
        counter_ = counter_before;
        return fail(FailureKind::EvalError, "rule " + rule.name + ": " + e.what());
    }

    ApplicationResult result;
    for (const auto& p : rule.params) {
        if (p.direction != ParamDirection::Out) continue;
        if (p.type.is_object) {
            for (const auto& n : rule.nodes) {
                if (n.export_param != p.name) continue;
                const std::string& id = n.action == Action::Create ? created[n.name] : match->nodes.at(n.name);
                result.env[p.name] = Value::ref(id);
            }
        } else if (auto v = env.lookup(p.name)) {
            result.env[p.name] = *v;
        }
        if (!result.env.count(p.name)) {
            counter_ = counter_before;
            return fail(FailureKind::BindingError, "rule " + rule.name + ": out param '" + p.name + "' not bound");
        }
    }
    for (auto& obj : staged) {
        result.created_ids.push_back(obj.id);
        g.add(std::move(obj));
    }
    result.success = true;
    return result;
}

ApplicationResult Engine::execute_unit(const SequentialUnit& unit, const LoadedModule& scope, ObjectGraph& g,
                                       const Bindings& args) {
    if (auto err = check_args(unit.params, g, args)) return fail(FailureKind::BindingError, *err);
    Bindings params, vars;
    for (const auto& p : unit.params)
        if (p.direction == ParamDirection::In) params[p.name] = args.at(p.name);

    ApplicationResult result;
    for (std::size_t k = 0; k < unit.steps.size(); ++k) {
        const Step& s = unit.steps[k];
        std::string label = "unit " + unit.name + " step " + std::to_string(k + 1) + " (" + s.callee + ")";
        auto inv = scope.lookup(s.callee);
        if (!inv) return fail(FailureKind::UnknownInvocable, label + ": " + s.callee, k);
        Bindings call_args;
        for (const auto& a : s.args) {
            if (a.mode != StepArg::Mode::In) continue;
            if (a.source == StepArg::Source::Literal) {
                call_args[a.callee_param] = a.literal;
                continue;
            }
            const Bindings& pool = a.source == StepArg::Source::Param ? params : vars;
            auto it = pool.find(a.name);
            if (it == pool.end())
                return fail(FailureKind::BindingError,
                            label + ": unbound argument " + (a.source == StepArg::Source::Variable ? "?" : "") + a.name, k);
            call_args[a.callee_param] = it->second;
        }
        ApplicationResult sub = invoke(*inv, g, call_args);
        result.created_ids.insert(result.created_ids.end(), sub.created_ids.begin(), sub.created_ids.end());
        if (!sub.success) {
            ApplicationResult r = fail(FailureKind::StepFailed, label + " failed: " + sub.describe(), k);
            r.created_ids = std::move(result.created_ids);
            return r;
        }
        for (const auto& a : s.args) {
            if (a.mode != StepArg::Mode::Out) continue;
            auto it = sub.env.find(a.callee_param);
            if (it == sub.env.end())
                return fail(FailureKind::BindingError, label + ": callee did not bind '" + a.callee_param + "'", k);
            (a.source == StepArg::Source::Variable ? vars : params)[a.name] = it->second;
        }
    }
    for (const auto& p : unit.params) {
        if (p.direction != ParamDirection::Out) continue;
        auto it = params.find(p.name);
        if (it == params.end()) return fail(FailureKind::BindingError, "unit " + unit.name + ": out param '" + p.name + "' not bound");
        result.env[p.name] = it->second;
    }
    result.success = true;
    return result;
}

ApplicationResult Engine::invoke(const LoadedModule::Invocable& inv, ObjectGraph& g, const Bindings& args) {
    if (inv.rule) return apply_rule(*inv.rule, g, args);
    return execute_unit(*inv.unit, *inv.scope, g, args);
}

ApplicationResult Engine::invoke(const LoadedModule& module, std::string_view name, ObjectGraph& g,
                                 const Bindings& args) {
    auto inv = module.lookup(name);
    if (!inv) return fail(FailureKind::UnknownInvocable, std::string(name));
    return invoke(*inv, g, args);
}

}  // namespace rtm
