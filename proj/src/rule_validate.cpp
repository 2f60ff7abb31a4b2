#include <functional>
#include <map>
#include <set>

#include "rtm/rule_module.hpp"

namespace rtm {

namespace {

// Static type of an expression: unknown (after an error), the null
// literal, a value kind, or an object of a class.
struct SType {
    enum Tag { Any, Null, Val, Obj } tag = Any;
    ValueKind kind = ValueKind::Null;
    ClassRef cls;

    static SType any() { return {}; }
    static SType null() { return {Null, ValueKind::Null, {}}; }
    static SType val(ValueKind k) { return {Val, k, {}}; }
    static SType obj(ClassRef c) { return {Obj, ValueKind::Ref, std::move(c)}; }
    static SType of(const TypeRef& t) { return t.is_object ? obj(t.cls) : val(t.value_kind); }

    std::string str() const {
        switch (tag) {
            case Any: return "?";
            case Null: return "null";
            case Val: return std::string(kind_name(kind));
            case Obj: return cls.str();
        }
        return "?";
    }
};

bool compatible(const SType& a, const SType& b) {
    if (a.tag == SType::Any || b.tag == SType::Any || a.tag == SType::Null || b.tag == SType::Null) return true;
    if (a.tag != b.tag) return false;
    return a.tag == SType::Val ? a.kind == b.kind : a.cls == b.cls;
}

SType field_type(const FieldDef& f) { return f.kind == FieldKind::Ref ? SType::obj(f.target) : SType::val(value_kind_of(f.kind)); }

class Checker {
public:
    Checker(const MetamodelSet& mms, ValidationReport& report) : mms_(mms), report_(report) {}

    void module(const LoadedModule& m) {
        if (!visited_.insert(&m).second) return;
        for (const auto& inc : m.includes()) module(*inc);
        for (const auto& r : m.ast().rules) rule(m, r);
        for (const auto& u : m.ast().units) unit(m, u);
    }

private:
    using Scope = std::map<std::string, SType>;

    void add(std::string code, const std::string& where, const std::string& what) {
        report_.add(std::move(code), where + ": " + what);
    }

    bool class_exists(const ClassRef& c, const std::string& where) {
        if (mms_.find_class(c)) return true;
        add("unknown class", where, c.str());
        return false;
    }

    void check_params(const std::vector<Param>& params, const std::string& where) {
        for (const auto& p : params)
            if (p.type.is_object) class_exists(p.type.cls, where + " param " + p.name);
    }

    SType infer(const Expr& e, const Scope& scope, const std::string& where) {
        return std::visit(
            [&](const auto& x) -> SType {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ast::Literal>) {
                    return x.value.is_null() ? SType::null() : SType::val(x.value.kind());
                } else if constexpr (std::is_same_v<T, ast::Var>) {
                    if (auto it = scope.find(x.name); it != scope.end()) return it->second;
                    if (x.name == "TODAY") return SType::val(ValueKind::Date);
                    add("unbound name", where, x.name);
                    return SType::any();
                } else if constexpr (std::is_same_v<T, ast::FieldAccess>) {
                    auto it = scope.find(x.var);
                    if (it == scope.end()) {
                        add("unbound name", where, x.var);
                        return SType::any();
                    }
                    if (it->second.tag != SType::Obj) {
                        if (it->second.tag != SType::Any) add("field access on non-object", where, x.var + "." + x.field);
                        return SType::any();
                    }
                    const ClassDef* cls = mms_.find_class(it->second.cls);
                    if (!cls) return SType::any();
                    const FieldDef* f = cls->field(x.field);
                    if (!f) {
                        add("unknown field", where, it->second.cls.str() + "." + x.field);
                        return SType::any();
                    }
                    return field_type(*f);
                } else if constexpr (std::is_same_v<T, ast::Unary>) {
                    SType t = infer(*x.operand, scope, where);
                    if (!compatible(t, SType::val(ValueKind::Int)) || t.tag == SType::Null)
                        add("kind mismatch", where, "unary '-' on " + t.str());
                    return SType::val(ValueKind::Int);
                } else if constexpr (std::is_same_v<T, ast::Binary>) {
                    return binary(x, scope, where);
                } else if constexpr (std::is_same_v<T, ast::Ternary>) {
                    SType c = infer(*x.cond, scope, where);
                    if (!compatible(c, SType::val(ValueKind::Bool)) || c.tag == SType::Null)
                        add("kind mismatch", where, "ternary condition is " + c.str());
                    SType a = infer(*x.then_branch, scope, where);
                    SType b = infer(*x.else_branch, scope, where);
                    if (!compatible(a, b)) {
                        add("kind mismatch", where, "ternary branches " + a.str() + " and " + b.str());
                        return SType::any();
                    }
                    if (a.tag == SType::Null || a.tag == SType::Any) return b;
                    return a;
                } else {
                    const BuiltinSignature* sig = find_builtin(x.name);
                    if (!sig) {
                        add("unknown function", where, x.name);
                        return SType::any();
                    }
                    for (std::size_t i = 0; i < x.args.size() && i < sig->params.size(); ++i) {
                        SType t = infer(*x.args[i], scope, where);
                        if (!compatible(t, SType::val(sig->params[i])))
                            add("kind mismatch", where, x.name + " argument " + std::to_string(i + 1) + " is " + t.str());
                    }
                    return SType::val(sig->result);
                }
            },
            e.node);
    }

    SType binary(const ast::Binary& x, const Scope& scope, const std::string& where) {
        SType a = infer(*x.lhs, scope, where);
        SType b = infer(*x.rhs, scope, where);
        std::string op(op_spelling(x.op));
        auto fail = [&] {
            add("kind mismatch", where, a.str() + " " + op + " " + b.str());
            return SType::any();
        };
        auto known = [](const SType& t) { return t.tag == SType::Val || t.tag == SType::Obj; };
        switch (x.op) {
            case BinaryOp::Eq:
            case BinaryOp::Ne:
                if (!compatible(a, b)) fail();
                return SType::val(ValueKind::Bool);
            case BinaryOp::And:
            case BinaryOp::Or:
                if (!compatible(a, SType::val(ValueKind::Bool)) || !compatible(b, SType::val(ValueKind::Bool)) ||
                    a.tag == SType::Null || b.tag == SType::Null)
                    fail();
                return SType::val(ValueKind::Bool);
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge: {
                if (!compatible(a, b) || a.tag == SType::Null || b.tag == SType::Null) return fail(), SType::val(ValueKind::Bool);
                const SType& k = known(a) ? a : b;
                if (known(k) && (k.tag == SType::Obj || k.kind == ValueKind::Bool)) fail();
                return SType::val(ValueKind::Bool);
            }
            case BinaryOp::Add: {
                if (!compatible(a, b) || a.tag == SType::Null || b.tag == SType::Null) return fail();
                const SType& k = known(a) ? a : b;
                if (!known(k)) return SType::any();
                if (k.tag == SType::Val && (k.kind == ValueKind::Int || k.kind == ValueKind::String)) return k;
                return fail();
            }
            default:
                if (!compatible(a, SType::val(ValueKind::Int)) || !compatible(b, SType::val(ValueKind::Int)) ||
                    a.tag == SType::Null || b.tag == SType::Null)
                    return fail();
                return SType::val(ValueKind::Int);
        }
    }

    void rule(const LoadedModule& m, const Rule& r) {
        const std::string where = "rule " + m.name() + "." + r.name;
        check_params(r.params, where);
        for (const auto& n : r.nodes)
            if (r.param(n.name)) add("name clash", where, "node '" + n.name + "' shadows a parameter");

        std::map<std::string, int> bind_count, export_count;
        std::map<std::string, bool> node_class_ok;
        for (const auto& n : r.nodes) {
            std::string nwhere = where + " node " + n.name;
            node_class_ok[n.name] = class_exists(n.cls, nwhere);
            if (n.bound_param) {
                const Param* p = r.param(*n.bound_param);
                if (!p) add("unknown parameter", nwhere, *n.bound_param);
                else if (p->direction != ParamDirection::In) add("binding to non-in param", nwhere, *n.bound_param);
                else if (!p->type.is_object || p->type.cls != n.cls) add("binding type mismatch", nwhere, p->type.str());
                else if (n.action == Action::Create) add("create node bound", nwhere, *n.bound_param);
                if (p) ++bind_count[p->name];
            }
            if (n.export_param) {
                const Param* p = r.param(*n.export_param);
                if (!p) add("unknown parameter", nwhere, *n.export_param);
                else if (p->direction != ParamDirection::Out) add("export to non-out param", nwhere, *n.export_param);
                else if (!p->type.is_object || p->type.cls != n.cls) add("export type mismatch", nwhere, p->type.str());
                if (p) ++export_count[p->name];
            }
        }
        for (const auto& p : r.params) {
            if (!p.type.is_object) continue;
            if (p.direction == ParamDirection::In && bind_count[p.name] > 1)
                add("multiple bindings", where, "in param '" + p.name + "' pre-binds several nodes");
            if (p.direction == ParamDirection::Out) {
                // a node pre-binding it was already reported as a binding to a non-in param
                if (export_count[p.name] == 0 && bind_count[p.name] == 0) add("out param not exported", where, p.name);
                else if (export_count[p.name] > 1) add("out param exported twice", where, p.name);
            }
        }

        Scope scope;
        std::set<std::string> bindable;
        for (const auto& p : r.params) {
            if (p.direction == ParamDirection::In) scope[p.name] = SType::of(p.type);
            else if (!p.type.is_object) bindable.insert(p.name);
        }

        std::vector<const PatternNode*> order;
        for (const auto& n : r.nodes)
            if (n.action == Action::Preserve && n.bound_param) order.push_back(&n);
        for (const auto& n : r.nodes)
            if (n.action == Action::Preserve && !n.bound_param) order.push_back(&n);
        for (const auto* n : order) {
            scope[n->name] = SType::obj(n->cls);
            preserve_clauses(r, *n, scope, bindable, node_class_ok[n->name], where + " node " + n->name);
        }
        for (const auto& p : r.params)
            if (p.direction == ParamDirection::Out && !p.type.is_object && !scope.count(p.name))
                add("out param not bound", where, p.name);

        for (const auto& n : r.nodes)
            if (n.action == Action::Create)
                create_clauses(r, n, scope, node_class_ok[n.name], where + " node " + n.name);
    }

    const FieldDef* attr_field(const ClassDef* cls, const PatternNode& n, const std::string& field,
                               const std::string& where) {
        if (!cls) return nullptr;
        const FieldDef* f = cls->field(field);
        if (!f) add("unknown field", where, n.cls.str() + "." + field);
        return f;
    }

    void ref_clauses(const Rule& r, const PatternNode& n, const ClassDef* cls, const std::string& where) {
        for (const auto& c : n.refs) {
            const FieldDef* f = cls ? cls->field(c.field) : nullptr;
            if (cls && !f) add("unknown field", where, n.cls.str() + "." + c.field);
            else if (f && f->kind != FieldKind::Ref) add("not a reference field", where, c.field);
            const PatternNode* target = r.node(c.target);
            if (!target) {
                add("unknown node", where, c.target);
                continue;
            }
            if (f && f->kind == FieldKind::Ref && f->target != target->cls)
                add("ref target class mismatch", where, c.field + " -> " + target->cls.str());
            if (n.action == Action::Preserve && target->action == Action::Create)
                add("preserve ref to create node", where, c.field + " -> " + c.target);
        }
    }

    void preserve_clauses(const Rule& r, const PatternNode& n, Scope& scope, std::set<std::string>& bindable,
                          bool class_ok, const std::string& where) {
        const ClassDef* cls = class_ok ? mms_.find_class(n.cls) : nullptr;
        for (const auto& a : n.attrs) {
            const FieldDef* f = attr_field(cls, n, a.field, where);
            if (a.assign) add("clause operator", where, a.field + " := on a preserve node");
            if (f && f->kind == FieldKind::Ref) add("reference field in attribute clause", where, a.field);
            const auto* v = a.expr->as<ast::Var>();
            if (v && bindable.count(v->name) && !scope.count(v->name)) {
                SType t = SType::of(r.param(v->name)->type);
                if (f && f->kind != FieldKind::Ref && !compatible(t, field_type(*f)))
                    add("kind mismatch", where, a.field + " == " + v->name + ": " + t.str());
                scope[v->name] = t;
                continue;
            }
            SType t = infer(*a.expr, scope, where);
            if (f && f->kind != FieldKind::Ref && !compatible(t, field_type(*f)))
                add("kind mismatch", where, a.field + " == " + t.str());
        }
        ref_clauses(r, n, cls, where);
    }

    void create_clauses(const Rule& r, const PatternNode& n, const Scope& scope, bool class_ok,
                        const std::string& where) {
        const ClassDef* cls = class_ok ? mms_.find_class(n.cls) : nullptr;
        std::set<std::string> assigned;
        for (const auto& a : n.attrs) {
            if (!a.assign) add("clause operator", where, a.field + " == on a create node");
            if (!assigned.insert(a.field).second) add("duplicate assignment", where, a.field);
            const FieldDef* f = attr_field(cls, n, a.field, where);
            if (f && f->kind == FieldKind::Ref) add("reference field in attribute clause", where, a.field);
            SType t = infer(*a.expr, scope, where);
            if (f && f->kind != FieldKind::Ref) {
                if (!compatible(t, field_type(*f))) add("kind mismatch", where, a.field + " := " + t.str());
                else if (t.tag == SType::Null && !f->optional) add("mandatory field null", where, a.field);
            }
        }
        for (const auto& c : n.refs)
            if (!assigned.insert(c.field).second) add("duplicate assignment", where, c.field);
        ref_clauses(r, n, cls, where);
        if (!cls) return;
        for (const auto& f : cls->fields)
            if (!f.optional && !assigned.count(f.name)) add("mandatory field unassigned", where, f.name);
    }

    void unit(const LoadedModule& m, const SequentialUnit& u) {
        const std::string where = "unit " + m.name() + "." + u.name;
        check_params(u.params, where);

        std::map<std::string, SType> bound;     // unit params holding a value
        std::map<std::string, SType> received;  // ?variables
        std::map<std::string, SType> declared_vars;
        for (const auto& p : u.params) {
            if (p.direction == ParamDirection::In) bound[p.name] = SType::of(p.type);
            if (p.direction == ParamDirection::Var) declared_vars[p.name] = SType::of(p.type);
        }

        for (std::size_t k = 0; k < u.steps.size(); ++k) {
            const Step& s = u.steps[k];
            std::string swhere = where + " step " + std::to_string(k + 1) + " (" + s.callee + ")";
            auto inv = m.lookup(s.callee);
            if (!inv) add("unknown invocable", swhere, s.callee);
            std::set<std::string> supplied;
            for (const auto& a : s.args) {
                if (!supplied.insert(a.callee_param).second) add("duplicate argument", swhere, a.callee_param);
                const Param* cp = inv ? inv->param(a.callee_param) : nullptr;
                if (inv && !cp) add("unknown parameter", swhere, a.callee_param);
                if (a.mode == StepArg::Mode::In) {
                    if (cp && cp->direction != ParamDirection::In) add("direction mismatch", swhere, a.callee_param + " is not an in param");
                    SType src = SType::any();
                    if (a.source == StepArg::Source::Literal) {
                        src = a.literal.is_null() ? SType::null() : SType::val(a.literal.kind());
                    } else {
                        auto& pool = a.source == StepArg::Source::Param ? bound : received;
                        auto it = pool.find(a.name);
                        if (it == pool.end()) {
                            add("unbound argument", swhere,
                                (a.source == StepArg::Source::Variable ? "?" : "") + a.name);
                            continue;
                        }
                        src = it->second;
                    }
                    if (cp && !compatible(src, SType::of(cp->type)))
                        add("type mismatch", swhere, a.callee_param + ": " + src.str() + " vs " + cp->type.str());
                } else {
                    if (cp && cp->direction != ParamDirection::Out) add("direction mismatch", swhere, a.callee_param + " is not an out param");
                    SType t = cp ? SType::of(cp->type) : SType::any();
                    if (a.source == StepArg::Source::Variable) {
                        if (auto it = declared_vars.find(a.name); it != declared_vars.end() && !compatible(it->second, t))
                            add("type mismatch", swhere, "?" + a.name + ": " + it->second.str() + " vs " + t.str());
                        received[a.name] = t;
                    } else {
                        const Param* up = u.param(a.name);
                        if (!up || up->direction != ParamDirection::Out) {
                            add("invalid target", swhere, a.name + " is not an out param of the unit");
                            continue;
                        }
                        if (!compatible(SType::of(up->type), t))
                            add("type mismatch", swhere, a.name + ": " + up->type.str() + " vs " + t.str());
                        bound[a.name] = SType::of(up->type);
                    }
                }
            }
            if (inv)
                for (const auto& p : inv->params())
                    if (p.direction == ParamDirection::In && !supplied.count(p.name))
                        add("missing argument", swhere, p.name);
        }
        for (const auto& p : u.params)
            if (p.direction == ParamDirection::Out && !bound.count(p.name)) add("out param not bound", where, p.name);

        if (reaches(m, u, m, u, 0)) add("recursive unit", where, "calls itself");
    }

    bool reaches(const LoadedModule& scope, const SequentialUnit& from, const LoadedModule& target_scope,
                 const SequentialUnit& target, int depth) {
        if (depth > 64) return true;
        for (const auto& s : from.steps) {
            auto inv = scope.lookup(s.callee);
            if (!inv || !inv->unit) continue;
            if (inv->unit == &target && inv->scope == &target_scope) return true;
            if (reaches(*inv->scope, *inv->unit, target_scope, target, depth + 1)) return true;
        }
        return false;
    }

    const MetamodelSet& mms_;
    ValidationReport& report_;
    std::set<const LoadedModule*> visited_;
};

}  // namespace

ValidationReport validate_module(const LoadedModule& m, const MetamodelSet& mms) {
    ValidationReport report;
    Checker(mms, report).module(m);
    return report;
}

}  // namespace rtm
