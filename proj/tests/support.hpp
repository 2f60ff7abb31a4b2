#pragma once

// Shared generators and brute-force oracles for the unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rtm/corpus.hpp"
#include "rtm/engine.hpp"
#include "rtm/expr.hpp"
#include "rtm/matcher.hpp"
#include "rtm/rule_module.hpp"
#include "rtm/text_format.hpp"

namespace rtm::testing {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) { return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))]; }

inline constexpr Date kToday{2020, 1, 1};

inline LoadedScenario load(const std::string& id, Direction d, bool fixtures = true) {
    return load_scenario(default_corpus_dir(), find_scenario(id, d), fixtures);
}

// ---------------------------------------------------------------------------
// Small metamodel for matcher and engine trials:
//   T.A { x: int, r: ref A?, s: ref B? }   T.B { x: int, r: ref A? }

inline MetamodelSet trial_metamodels() {
    MetamodelSet mms;
    mms.add(parse_metamodel(R"(metamodel T {
        class A { x: int, r: ref A?, s: ref B? }
        class B { x: int, r: ref A? }
    })"));
    return mms;
}

inline ObjectGraph random_trial_graph(Rng& rng, int max_objects = 6) {
    ObjectGraph g("trial");
    int n = uniform(rng, 0, max_objects);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
        ids.push_back("o" + std::to_string(i));
        g.add(ids.back(), {"T", coin(rng) ? "A" : "B"}, {{"x", Value(std::int64_t{uniform(rng, 0, 2)})}});
    }
    for (auto& obj : g.objects()) {
        std::vector<std::string> fields = obj.cls.name == "A" ? std::vector<std::string>{"r", "s"} : std::vector<std::string>{"r"};
        for (const auto& f : fields) {
            std::string want = f == "s" ? "B" : "A";
            std::vector<std::string> targets;
            for (const auto& t : g.objects())
                if (t.cls.name == want) targets.push_back(t.id);
            if (!targets.empty() && coin(rng, 0.7)) obj.set(f, Value::ref(pick(rng, targets)));
            else obj.set(f, Value(Null{}));
        }
    }
    return g;
}

struct TrialPattern {
    std::vector<PatternNode> nodes;
    Env pre;
};

/// 1..3 preserve nodes, at most 2 reference clauses and 2 attribute
/// constraints (literal filter, shared variable or arithmetic), and an
/// optional pre-bound node.
inline TrialPattern random_trial_pattern(Rng& rng, const ObjectGraph& g, int max_nodes = 3) {
    TrialPattern p;
    int n = uniform(rng, 1, max_nodes);
    for (int i = 0; i < n; ++i) {
        PatternNode node;
        node.name = "n" + std::to_string(i);
        node.cls = {"T", coin(rng) ? "A" : "B"};
        p.nodes.push_back(node);
    }
    int refs = uniform(rng, 0, 2);
    for (int k = 0; k < refs; ++k) {
        auto& from = p.nodes[static_cast<std::size_t>(uniform(rng, 0, n - 1))];
        const auto& to = p.nodes[static_cast<std::size_t>(uniform(rng, 0, n - 1))];
        std::string field = from.cls.name == "A" && to.cls.name == "B" ? "s" : "r";
        from.refs.push_back({field, to.name, {}});
    }
    int attrs = uniform(rng, 0, 2);
    for (int k = 0; k < attrs; ++k) {
        auto& node = p.nodes[static_cast<std::size_t>(uniform(rng, 0, n - 1))];
        ExprPtr e;
        switch (uniform(rng, 0, 3)) {
            case 0: e = mk::lit(Value(std::int64_t{uniform(rng, 0, 2)})); break;
            case 1: e = mk::var("v"); break;
            case 2: e = mk::var(coin(rng) ? "v" : "w"); break;
            default: e = mk::bin(BinaryOp::Sub, mk::lit(Value(std::int64_t{2})), mk::lit(Value(std::int64_t{uniform(rng, 0, 2)})));
        }
        node.attrs.push_back({"x", false, e, {}});
    }
    if (coin(rng, 0.3)) p.pre.bindings["v"] = Value(std::int64_t{uniform(rng, 0, 2)});
    if (!g.empty() && coin(rng, 0.4)) {
        auto& node = p.nodes[static_cast<std::size_t>(uniform(rng, 0, n - 1))];
        std::vector<std::string> same;
        for (const auto& o : g.objects())
            if (o.cls == node.cls) same.push_back(o.id);
        if (!same.empty()) {
            node.bound_param = "in_" + node.name;
            p.pre.bindings[*node.bound_param] = Value::ref(pick(rng, same));
        }
    }
    return p;
}

/// Every injective node -> object map, filtered by class, pre-binding,
/// reference and attribute constraints. Variables in `x == v` clauses must
/// agree across clauses and with any pre-bound value. Result order is
/// lexicographic over the matcher's node order (pre-bound nodes first).
inline std::vector<std::map<std::string, std::string>> brute_force_matches(const std::vector<PatternNode>& nodes,
                                                                         const ObjectGraph& g, const Env& pre) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].bound_param) order.push_back(i);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (!nodes[i].bound_param) order.push_back(i);

    std::vector<std::map<std::string, std::string>> out;
    const std::size_t n = nodes.size(), m = g.size();
    std::vector<std::size_t> pick_idx(n, 0);
    auto objs = g.objects();
    if (n == 0) return {{}};
    if (m < n) return {};
    // odometer over m^n assignments in `order`
    for (;;) {
        std::map<std::string, std::string> asg;
        std::set<std::size_t> used;
        bool ok = true;
        for (std::size_t k = 0; k < n && ok; ++k) {
            const auto& node = nodes[order[k]];
            const auto& obj = objs[pick_idx[k]];
            ok = used.insert(pick_idx[k]).second && obj.cls == node.cls;
            if (ok && node.bound_param) ok = pre.bindings.at(*node.bound_param).as_ref() == obj.id;
            asg[node.name] = obj.id;
        }
        std::map<std::string, Value> vars = pre.bindings;
        for (std::size_t k = 0; k < n && ok; ++k) {
            const auto& node = nodes[order[k]];
            const ObjectNode& obj = *g.find(asg[node.name]);
            for (const auto& rc : node.refs) {
                const Value& v = obj.get(rc.field);
                ok = ok && v.kind() == ValueKind::Ref && v.as_ref() == asg[rc.target];
            }
            for (const auto& ac : node.attrs) {
                if (!ok) break;
                const Value& have = obj.get(ac.field);
                if (const auto* var = ac.expr->as<ast::Var>()) {
                    auto it = vars.find(var->name);
                    if (it == vars.end()) vars[var->name] = have;
                    else ok = it->second == have;
                } else if (const auto* lit = ac.expr->as<ast::Literal>()) {
                    ok = lit->value == have;
                } else {
                    const auto& b = std::get<ast::Binary>(ac.expr->node);
                    std::int64_t want = b.lhs->as<ast::Literal>()->value.as_int() - b.rhs->as<ast::Literal>()->value.as_int();
                    ok = have == Value(want);
                }
            }
        }
        if (ok) out.push_back(asg);
        std::size_t k = n;
        while (k > 0 && ++pick_idx[k - 1] == m) pick_idx[--k] = 0;
        if (k == 0) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random rule modules for the print/parse round trip.

inline std::string random_name(Rng& rng, const char* prefix) { return prefix + std::to_string(uniform(rng, 0, 9)); }

inline Value random_literal(Rng& rng) {
    static const std::vector<std::string> strings = {"", "x", "Hugo", "a \"quoted\" word", "tab\tand\\slash", "Ünïcodé", "line\nbreak"};
    switch (uniform(rng, 0, 5)) {
        case 0: return Value(Null{});
        case 1: return Value(coin(rng));
        case 2: return Value(std::int64_t{uniform(rng, 0, 100000)});
        case 3: return Value(pick(rng, strings));
        case 4: return Value(Date{uniform(rng, 1, 9999), uniform(rng, 1, 12), uniform(rng, 1, 28)});
        default: return Value(std::int64_t{0});
    }
}

inline ExprPtr random_expr(Rng& rng, int depth) {
    if (depth <= 0 || coin(rng, 0.3)) {
        switch (uniform(rng, 0, 3)) {
            case 0: return mk::lit(random_literal(rng));
            case 1: return mk::var(random_name(rng, "v"));
            case 2: return mk::field(random_name(rng, "n"), random_name(rng, "f"));
            default: return mk::var("TODAY");
        }
    }
    static const std::vector<BinaryOp> ops = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div,
                                              BinaryOp::Eq,  BinaryOp::Ne,  BinaryOp::Lt,  BinaryOp::Le,
                                              BinaryOp::Gt,  BinaryOp::Ge,  BinaryOp::And, BinaryOp::Or};
    switch (uniform(rng, 0, 4)) {
        case 0: return mk::neg(random_expr(rng, depth - 1));
        case 1: return mk::ternary(random_expr(rng, depth - 1), random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 2: return mk::call(coin(rng) ? "yearsBetween" : "minusYears", {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
        default: return mk::bin(pick(rng, ops), random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    }
}

inline TypeRef random_type(Rng& rng) {
    if (coin(rng)) return TypeRef::object({random_name(rng, "M"), random_name(rng, "C")});
    static const std::vector<ValueKind> kinds = {ValueKind::String, ValueKind::Int, ValueKind::Bool, ValueKind::Date};
    return TypeRef::value(pick(rng, kinds));
}

inline std::vector<Param> random_params(Rng& rng, const char* prefix) {
    std::vector<Param> ps;
    int n = uniform(rng, 0, 4);
    for (int i = 0; i < n; ++i) {
        static const std::vector<ParamDirection> dirs = {ParamDirection::In, ParamDirection::Out, ParamDirection::Var};
        ps.push_back({prefix + std::to_string(i), pick(rng, dirs), random_type(rng), {}});
    }
    return ps;
}

/// Syntactically well-formed but not necessarily valid module AST in the
/// form the parser produces (no negative int literals, unique names).
inline RuleModule random_module(Rng& rng) {
    RuleModule m;
    m.name = random_name(rng, "mod");
    for (int i = uniform(rng, 0, 2); i > 0; --i) m.includes.push_back({"../lib/" + random_name(rng, "f") + ".rules", {}});
    int rules = uniform(rng, 0, 3);
    for (int r = 0; r < rules; ++r) {
        Rule rule;
        rule.name = "rule" + std::to_string(r);
        rule.params = random_params(rng, "p");
        int nodes = uniform(rng, 0, 3);
        for (int k = 0; k < nodes; ++k) {
            PatternNode n;
            n.name = "n" + std::to_string(k);
            n.cls = {random_name(rng, "M"), random_name(rng, "C")};
            n.action = coin(rng) ? Action::Preserve : Action::Create;
            if (coin(rng, 0.3)) n.bound_param = random_name(rng, "p");
            else if (coin(rng, 0.3)) n.export_param = random_name(rng, "p");
            for (int a = uniform(rng, 0, 3); a > 0; --a)
                n.attrs.push_back({random_name(rng, "f"), n.action == Action::Create, random_expr(rng, 3), {}});
            for (int a = uniform(rng, 0, 2); a > 0; --a) n.refs.push_back({random_name(rng, "f"), random_name(rng, "n"), {}});
            rule.nodes.push_back(std::move(n));
        }
        m.rules.push_back(std::move(rule));
    }
    int units = uniform(rng, 0, 2);
    for (int u = 0; u < units; ++u) {
        SequentialUnit unit;
        unit.name = "unit" + std::to_string(u);
        unit.params = random_params(rng, "q");
        for (int s = uniform(rng, 0, 3); s > 0; --s) {
            Step step;
            step.callee = coin(rng) ? random_name(rng, "rule") : random_name(rng, "lib") + "." + random_name(rng, "rule");
            std::set<std::string> used;
            for (int a = uniform(rng, 0, 3); a > 0; --a) {
                StepArg arg;
                arg.callee_param = random_name(rng, "p");
                if (!used.insert(arg.callee_param).second) continue;
                if (coin(rng, 0.3)) {
                    arg.mode = StepArg::Mode::Out;
                    arg.source = coin(rng) ? StepArg::Source::Variable : StepArg::Source::Param;
                    arg.name = random_name(rng, "q");
                } else {
                    switch (uniform(rng, 0, 2)) {
                        case 0: arg.source = StepArg::Source::Param; arg.name = random_name(rng, "q"); break;
                        case 1: arg.source = StepArg::Source::Variable; arg.name = random_name(rng, "v"); break;
                        default: {
                            arg.source = StepArg::Source::Literal;
                            arg.literal = coin(rng) ? Value(std::int64_t{-uniform(rng, 1, 50)}) : random_literal(rng);
                        }
                    }
                }
                step.args.push_back(std::move(arg));
            }
            unit.steps.push_back(std::move(step));
        }
        m.units.push_back(std::move(unit));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Random scenario instances.

inline std::string random_person_name(Rng& rng) {
    static const std::vector<std::string> parts = {"Ann", "Bo", "Cé", "Dmitri", "Eve", "Fü", "Gül", "Hugo", "Ïda", "Jo"};
    return pick(rng, parts) + pick(rng, parts);
}

inline Date random_birthday(Rng& rng, Date today = kToday) {
    for (;;) {
        Date d{uniform(rng, today.year - 120, today.year), uniform(rng, 1, 12), uniform(rng, 1, 31)};
        if (is_valid_date(d) && d <= today) return d;
    }
}

/// `n` random subjects in the scenario's source metamodel.
inline ObjectGraph random_source(Rng& rng, const ScenarioDef& def, int n, Date today = kToday) {
    const std::string mm = def.source_metamodel();
    const bool m1 = mm == "M1";
    ObjectGraph g("random");
    for (int i = 0; i < n; ++i) {
        const std::string k = std::to_string(i);
        std::map<std::string, Value> person{{"name", Value(random_person_name(rng))}};
        const auto age = std::int64_t{uniform(rng, 0, 120)};
        if (def.id == "s1") {
            if (!m1) person["age"] = Value(age);
        } else if (def.id == "s2" || def.id == "s4") {
            if (m1) person["birthday"] = Value(random_birthday(rng, today));
            else person["age"] = Value(age);
        } else if (coin(rng, 0.3)) {
            person["name"] = m1 ? Value(Null{}) : Value(std::string());
        }
        g.add("p" + k, {mm, "Person"}, std::move(person));
        if (def.id != "s4") continue;
        if (m1) g.add("d" + k, {mm, "Dog"}, {{"name", Value(random_person_name(rng))}, {"chipId", Value(std::int64_t{uniform(rng, 0, 1 << 20)})}});
        else g.add("d" + k, {mm, "Dog"}, {{"name", Value(random_person_name(rng))}, {"owner", Value::ref("p" + k)}});
        g.add("c" + k, {mm, "Container"}, {{"person", Value::ref("p" + k)}, {"dog", Value::ref("d" + k)}});
    }
    return g;
}

// ---------------------------------------------------------------------------
// Rules over the trial metamodel that cannot succeed on `g`.

/// Either a preserve pattern demanding x == 99 (no object has it) or a
/// create node whose last assignment fails to evaluate. Valid creations
/// precede the failing clause so staging is exercised.
inline std::string random_failing_rule(Rng& rng) {
    std::string body;
    int creates = uniform(rng, 0, 3);
    bool no_match = coin(rng);
    if (no_match) body += "    preserve a : T.A { x == 99 }\n";
    else if (coin(rng)) body += "    preserve a : T.A\n";
    for (int i = 0; i < creates; ++i)
        body += "    create c" + std::to_string(i) + " : T.B { x := " + std::to_string(uniform(rng, 0, 9)) + " }\n";
    if (!no_match) {
        static const std::vector<std::string> failing = {"1 / 0", "yearsBetween(TODAY, 1990-01-01)", "minusYears(TODAY, -1)",
                                                         "9223372036854775807 + 1", "unboundName"};
        body += "    create z : T.A { x := 1, x := " + pick(rng, failing) + " }\n";
    }
    return "module fail {\n  rule r() {\n" + body + "  }\n}\n";
}

}  // namespace rtm::testing
