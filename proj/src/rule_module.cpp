#include "rtm/rule_module.hpp"

#include <set>
#include <sstream>

#include "rtm/text_format.hpp"

namespace rtm {

std::string_view direction_name(ParamDirection d) {
    switch (d) {
        case ParamDirection::In: return "in";
        case ParamDirection::Out: return "out";
        case ParamDirection::Var: return "var";
    }
    return "?";
}

std::string TypeRef::str() const { return is_object ? cls.str() : std::string(kind_name(value_kind)); }

const Param* Rule::param(std::string_view n) const {
    for (const auto& p : params)
        if (p.name == n) return &p;
    return nullptr;
}

const PatternNode* Rule::node(std::string_view n) const {
    for (const auto& x : nodes)
        if (x.name == n) return &x;
    return nullptr;
}

const Param* SequentialUnit::param(std::string_view n) const {
    for (const auto& p : params)
        if (p.name == n) return &p;
    return nullptr;
}

// ---------------------------------------------------------------- parsing

namespace {

class ModuleParser {
public:
    explicit ModuleParser(std::string_view text) : ts_(tokenize(text)) {}

    RuleModule run() {
        RuleModule m;
        ts_.expect_ident("module");
        m.name = ts_.expect_name("module name").text;
        ts_.expect("{");
        std::set<std::string> names;
        while (!ts_.accept("}")) {
            const Token& t = ts_.peek();
            if (t.is_ident("include")) {
                ts_.next();
                if (ts_.peek().kind != TokenKind::String) ts_.fail("unexpected " + ts_.peek().describe(), {"path string"});
                m.includes.push_back({ts_.peek().text, ts_.peek().loc});
                ts_.next();
            } else if (t.is_ident("rule")) {
                Rule r = rule();
                unique(names, r.name, r.loc, "rule/unit");
                m.rules.push_back(std::move(r));
            } else if (t.is_ident("unit")) {
                SequentialUnit u = unit();
                unique(names, u.name, u.loc, "rule/unit");
                m.units.push_back(std::move(u));
            } else {
                ts_.fail("unexpected " + t.describe(), {"'include'", "'rule'", "'unit'", "'}'"});
            }
        }
        if (!ts_.at_end()) ts_.fail("unexpected " + ts_.peek().describe(), {"end of input"});
        return m;
    }

private:
    static void unique(std::set<std::string>& seen, const std::string& name, SourceLoc loc, std::string_view what) {
        if (!seen.insert(name).second)
            throw SyntaxError("duplicate " + std::string(what) + " name '" + name + "'", loc);
    }

    ClassRef class_ref() {
        ClassRef c;
        c.metamodel = ts_.expect_name("metamodel name").text;
        ts_.expect(".");
        c.name = ts_.expect_name("class name").text;
        return c;
    }

    TypeRef type() {
        const Token& t = ts_.peek();
        if (t.kind == TokenKind::Ident && !ts_.peek(1).is(".")) {
            ValueKind k;
            if (t.text == "string") k = ValueKind::String;
            else if (t.text == "int") k = ValueKind::Int;
            else if (t.text == "bool") k = ValueKind::Bool;
            else if (t.text == "date") k = ValueKind::Date;
            else ts_.fail("unknown type '" + t.text + "'", {"string", "int", "bool", "date", "Metamodel.Class"});
            ts_.next();
            return TypeRef::value(k);
        }
        return TypeRef::object(class_ref());
    }

    std::vector<Param> params() {
        std::vector<Param> out;
        std::set<std::string> names;
        ts_.expect("(");
        if (ts_.accept(")")) return out;
        for (;;) {
            Param p;
            const Token& dir = ts_.peek();
            p.loc = dir.loc;
            if (dir.is_ident("in")) p.direction = ParamDirection::In;
            else if (dir.is_ident("out")) p.direction = ParamDirection::Out;
            else if (dir.is_ident("var")) p.direction = ParamDirection::Var;
            else ts_.fail("unknown parameter direction " + dir.describe(), {"'in'", "'out'", "'var'"});
            ts_.next();
            p.name = ts_.expect_name("parameter name").text;
            unique(names, p.name, p.loc, "parameter");
            ts_.expect(":");
            p.type = type();
            out.push_back(std::move(p));
            if (ts_.accept(")")) return out;
            if (!ts_.accept(",")) ts_.fail("unexpected " + ts_.peek().describe(), {"','", "')'"});
        }
    }

    Rule rule() {
        Rule r;
        r.loc = ts_.expect_ident("rule").loc;
        r.name = ts_.expect_name("rule name").text;
        r.params = params();
        ts_.expect("{");
        std::set<std::string> names;
        while (!ts_.accept("}")) {
            PatternNode n = node();
            unique(names, n.name, n.loc, "node");
            r.nodes.push_back(std::move(n));
        }
        return r;
    }

    PatternNode node() {
        PatternNode n;
        const Token& act = ts_.peek();
        n.loc = act.loc;
        if (act.is_ident("preserve")) n.action = Action::Preserve;
        else if (act.is_ident("create")) n.action = Action::Create;
        else ts_.fail("unexpected " + act.describe(), {"'preserve'", "'create'", "'}'"});
        ts_.next();
        n.name = ts_.expect_name("node name").text;
        ts_.expect(":");
        n.cls = class_ref();
        if (ts_.accept("=")) n.bound_param = ts_.expect_name("parameter name").text;
        else if (ts_.accept("=>")) n.export_param = ts_.expect_name("parameter name").text;
        if (!ts_.accept("{")) return n;
        while (!ts_.accept("}")) {
            const Token& field = ts_.expect_name("field name");
            SourceLoc loc = field.loc;
            std::string fname = field.text;
            if (ts_.accept("->")) {
                n.refs.push_back({fname, ts_.expect_name("node name").text, loc});
            } else if (ts_.peek().is("==") || ts_.peek().is(":=")) {
                bool assign = ts_.next().is(":=");
                n.attrs.push_back({fname, assign, parse_expr(ts_), loc});
            } else {
                ts_.fail("unexpected " + ts_.peek().describe(), {"'=='", "':='", "'->'"});
            }
            ts_.accept(",");
        }
        return n;
    }

    SequentialUnit unit() {
        SequentialUnit u;
        u.loc = ts_.expect_ident("unit").loc;
        u.name = ts_.expect_name("unit name").text;
        u.params = params();
        ts_.expect("{");
        while (!ts_.accept("}")) {
            Step s;
            s.loc = ts_.expect_ident("step").loc;
            s.callee = ts_.expect_name("rule or unit name").text;
            while (ts_.accept(".")) s.callee += "." + ts_.expect_name("name").text;
            ts_.expect("(");
            if (!ts_.accept(")")) {
                for (;;) {
                    s.args.push_back(step_arg());
                    if (ts_.accept(")")) break;
                    if (!ts_.accept(",")) ts_.fail("unexpected " + ts_.peek().describe(), {"','", "')'"});
                }
            }
            u.steps.push_back(std::move(s));
        }
        return u;
    }

    StepArg step_arg() {
        StepArg a;
        const Token& callee = ts_.expect_name("parameter name");
        a.callee_param = callee.text;
        a.loc = callee.loc;
        if (ts_.accept("->")) {
            a.mode = StepArg::Mode::Out;
            if (ts_.accept("?")) a.source = StepArg::Source::Variable;
            a.name = ts_.expect_name("parameter or ?variable").text;
            return a;
        }
        if (!ts_.accept("=")) ts_.fail("unexpected " + ts_.peek().describe(), {"'='", "'->'"});
        a.mode = StepArg::Mode::In;
        if (ts_.accept("?")) {
            a.source = StepArg::Source::Variable;
            a.name = ts_.expect_name("variable name").text;
        } else if (const Token& t = ts_.peek();
                   t.kind == TokenKind::Ident && !t.is_ident("null") && !t.is_ident("true") && !t.is_ident("false")) {
            a.source = StepArg::Source::Param;
            a.name = ts_.next().text;
        } else {
            a.source = StepArg::Source::Literal;
            a.literal = parse_literal(ts_);
        }
        return a;
    }

    TokenStream ts_;
};

}  // namespace

RuleModule parse_module(std::string_view text) { return ModuleParser(text).run(); }

// --------------------------------------------------------------- printing

namespace {

void print_params(std::ostream& os, const std::vector<Param>& params) {
    os << '(';
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) os << ", ";
        os << direction_name(params[i].direction) << ' ' << params[i].name << ": " << params[i].type.str();
    }
    os << ')';
}

void print_rule(std::ostream& os, const Rule& r) {
    os << "  rule " << r.name;
    print_params(os, r.params);
    if (r.nodes.empty()) {
        os << " { }\n";
        return;
    }
    os << " {\n";
    for (const auto& n : r.nodes) {
        os << "    " << (n.action == Action::Preserve ? "preserve " : "create ") << n.name << " : " << n.cls.str();
        if (n.bound_param) os << " = " << *n.bound_param;
        if (n.export_param) os << " => " << *n.export_param;
        if (!n.attrs.empty() || !n.refs.empty()) {
            os << " {";
            bool first = true;
            for (const auto& a : n.attrs) {
                os << (first ? " " : ", ") << a.field << (a.assign ? " := " : " == ") << print_expr(*a.expr);
                first = false;
            }
            for (const auto& c : n.refs) {
                os << (first ? " " : ", ") << c.field << " -> " << c.target;
                first = false;
            }
            os << " }";
        }
        os << '\n';
    }
    os << "  }\n";
}

void print_unit(std::ostream& os, const SequentialUnit& u) {
    os << "  unit " << u.name;
    print_params(os, u.params);
    if (u.steps.empty()) {
        os << " { }\n";
        return;
    }
    os << " {\n";
    for (const auto& s : u.steps) {
        os << "    step " << s.callee << '(';
        for (std::size_t i = 0; i < s.args.size(); ++i) {
            const StepArg& a = s.args[i];
            if (i) os << ", ";
            os << a.callee_param << (a.mode == StepArg::Mode::In ? " = " : " -> ");
            switch (a.source) {
                case StepArg::Source::Param: os << a.name; break;
                case StepArg::Source::Variable: os << '?' << a.name; break;
                case StepArg::Source::Literal: os << to_literal(a.literal); break;
            }
        }
        os << ")\n";
    }
    os << "  }\n";
}

}  // namespace

std::string print_module(const RuleModule& m) {
    if (m.includes.empty() && m.rules.empty() && m.units.empty()) return "module " + m.name + " { }\n";
    std::ostringstream os;
    os << "module " << m.name << " {\n";
    bool gap = false;
    for (const auto& inc : m.includes) os << "  include " << quote_string(inc.path) << '\n';
    gap = !m.includes.empty();
    for (const auto& r : m.rules) {
        if (gap) os << '\n';
        print_rule(os, r);
        gap = true;
    }
    for (const auto& u : m.units) {
        if (gap) os << '\n';
        print_unit(os, u);
        gap = true;
    }
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------- loading

LoadedModule::LoadedModule(RuleModule ast, std::filesystem::path source,
                           std::vector<std::shared_ptr<const LoadedModule>> includes)
    : ast_(std::move(ast)), source_(std::move(source)), includes_(std::move(includes)) {}

std::optional<LoadedModule::Invocable> LoadedModule::lookup(std::string_view qualified) const {
    if (auto dot = qualified.find('.'); dot != std::string_view::npos) {
        auto head = qualified.substr(0, dot);
        for (const auto& inc : includes_)
            if (inc->name() == head) return inc->lookup(qualified.substr(dot + 1));
        return std::nullopt;
    }
    for (const auto& r : ast_.rules)
        if (r.name == qualified) return Invocable{&r, nullptr, this};
    for (const auto& u : ast_.units)
        if (u.name == qualified) return Invocable{nullptr, &u, this};
    return std::nullopt;
}

namespace {

std::shared_ptr<const LoadedModule> resolve(RuleModule ast, const std::filesystem::path& source,
                                            const std::filesystem::path& base_dir,
                                            std::vector<std::filesystem::path>& stack) {
    std::vector<std::shared_ptr<const LoadedModule>> includes;
    std::set<std::string> names;
    for (const auto& inc : ast.includes) {
        auto path = std::filesystem::weakly_canonical(base_dir / inc.path);
        for (const auto& open : stack)
            if (open == path) throw SyntaxError("include cycle through '" + inc.path + "'", inc.loc, {}, source.string());
        RuleModule sub;
        try {
            sub = parse_module(read_file(path));
        } catch (const SyntaxError& e) {
            throw e.in_file(path.string());
        }
        stack.push_back(path);
        auto loaded = resolve(std::move(sub), path, path.parent_path(), stack);
        stack.pop_back();
        if (!names.insert(loaded->name()).second || loaded->name() == ast.name)
            throw SyntaxError("included module name '" + loaded->name() + "' clashes", inc.loc, {}, source.string());
        includes.push_back(std::move(loaded));
    }
    return std::make_shared<const LoadedModule>(std::move(ast), source, std::move(includes));
}

}  // namespace

std::shared_ptr<const LoadedModule> load_module(const std::filesystem::path& path) {
    auto canonical = std::filesystem::weakly_canonical(path);
    RuleModule ast;
    try {
        ast = parse_module(read_file(canonical));
    } catch (const SyntaxError& e) {
        throw e.in_file(path.string());
    }
    std::vector<std::filesystem::path> stack{canonical};
    return resolve(std::move(ast), canonical, canonical.parent_path(), stack);
}

std::shared_ptr<const LoadedModule> load_module_text(std::string_view text, const std::filesystem::path& base_dir) {
    std::vector<std::filesystem::path> stack;
    return resolve(parse_module(text), {}, base_dir, stack);
}

}  // namespace rtm
