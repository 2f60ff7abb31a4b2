#include "rtm/text_format.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rtm {

Value parse_literal(TokenStream& ts) {
    const Token& t = ts.peek();
    if (t.is_ident("null")) return ts.next(), Value{};
    if (t.is_ident("true")) return ts.next(), Value{true};
    if (t.is_ident("false")) return ts.next(), Value{false};
    if (t.kind == TokenKind::String) return Value{ts.next().text};
    if (t.kind == TokenKind::Date) return Value{ts.next().date_value};
    if (t.kind == TokenKind::Int) return Value{ts.next().int_value};
    if (t.is("-") && ts.peek(1).kind == TokenKind::Int) {
        ts.next();
        return Value{-ts.next().int_value};
    }
    ts.fail("unexpected " + t.describe(), {"literal"});
}

Metamodel parse_metamodel(std::string_view text) {
    TokenStream ts(tokenize(text));
    Metamodel mm;
    ts.expect_ident("metamodel");
    mm.name = ts.expect_name("metamodel name").text;
    ts.expect("{");
    while (!ts.accept("}")) {
        if (!ts.peek().is_ident("class")) ts.fail("unexpected " + ts.peek().describe(), {"'class'", "'}'"});
        ts.next();
        ClassDef cls;
        cls.name = ts.expect_name("class name").text;
        ts.expect("{");
        while (!ts.accept("}")) {
            FieldDef f;
            f.name = ts.expect_name("field name").text;
            ts.expect(":");
            const Token& kind = ts.expect_name("field kind");
            if (kind.text == "string") f.kind = FieldKind::String;
            else if (kind.text == "int") f.kind = FieldKind::Int;
            else if (kind.text == "bool") f.kind = FieldKind::Bool;
            else if (kind.text == "date") f.kind = FieldKind::Date;
            else if (kind.text == "ref") {
                f.kind = FieldKind::Ref;
                std::string first = ts.expect_name("class name").text;
                if (ts.accept(".")) {
                    f.target = {first, ts.expect_name("class name").text};
                } else {
                    f.target = {mm.name, first};
                }
            } else {
                throw SyntaxError("unknown field kind '" + kind.text + "'", kind.loc,
                                  {"string", "int", "bool", "date", "ref"});
            }
            f.optional = ts.accept("?");
            cls.fields.push_back(std::move(f));
            if (!ts.accept(",")) ts.accept(";");
        }
        mm.classes.push_back(std::move(cls));
    }
    if (!ts.at_end()) ts.fail("unexpected " + ts.peek().describe(), {"end of input"});
    return mm;
}

std::string print_metamodel(const Metamodel& mm) {
    std::ostringstream os;
    os << "metamodel " << mm.name << " {\n";
    for (const auto& cls : mm.classes) {
        os << "  class " << cls.name << " {";
        if (cls.fields.empty()) {
            os << " }\n";
            continue;
        }
        os << '\n';
        for (const auto& f : cls.fields) {
            os << "    " << f.name << ": ";
            if (f.kind == FieldKind::Ref) {
                os << "ref " << (f.target.metamodel == mm.name ? f.target.name : f.target.str());
            } else {
                os << field_kind_name(f.kind);
            }
            if (f.optional) os << '?';
            os << '\n';
        }
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

ObjectGraph parse_instance(std::string_view text) {
    TokenStream ts(tokenize(text));
    ts.expect_ident("instance");
    ObjectGraph g(ts.expect_name("graph id").text);
    ts.expect("{");
    while (!ts.accept("}")) {
        if (!ts.peek().is_ident("obj")) ts.fail("unexpected " + ts.peek().describe(), {"'obj'", "'}'"});
        ts.next();
        const Token& id = ts.expect_name("object id");
        ObjectNode node;
        node.id = id.text;
        ts.expect(":");
        node.cls.metamodel = ts.expect_name("metamodel name").text;
        ts.expect(".");
        node.cls.name = ts.expect_name("class name").text;
        if (ts.accept("{")) {
            while (!ts.accept("}")) {
                const Token& field = ts.expect_name("field name");
                if (node.slots.count(field.text))
                    throw SyntaxError("duplicate slot '" + field.text + "'", field.loc);
                if (ts.accept("->")) {
                    node.slots[field.text] = Value::ref(ts.expect_name("object id").text);
                } else if (ts.accept("=")) {
                    node.slots[field.text] = parse_literal(ts);
                } else {
                    ts.fail("unexpected " + ts.peek().describe(), {"'='", "'->'"});
                }
                if (!ts.accept(",")) ts.accept(";");
            }
        }
        if (g.contains(node.id)) throw SyntaxError("duplicate object id '" + node.id + "'", id.loc);
        g.add(std::move(node));
    }
    if (!ts.at_end()) ts.fail("unexpected " + ts.peek().describe(), {"end of input"});
    return g;
}

std::string print_instance(const ObjectGraph& g, const MetamodelSet* mms) {
    std::ostringstream os;
    os << "instance " << g.id() << " {\n";
    for (const auto& obj : g.objects()) {
        os << "  obj " << obj.id << " : " << obj.cls.str() << " {";
        std::vector<std::string> order;
        if (const ClassDef* cls = mms ? mms->find_class(obj.cls) : nullptr) {
            for (const auto& f : cls->fields)
                if (obj.slots.count(f.name)) order.push_back(f.name);
        }
        std::set<std::string> listed(order.begin(), order.end());
        for (const auto& [name, v] : obj.slots)
            if (!listed.count(name)) order.push_back(name);
        for (std::size_t i = 0; i < order.size(); ++i) {
            const Value& v = obj.slots.at(order[i]);
            os << (i ? ", " : " ") << order[i];
            if (v.kind() == ValueKind::Ref) os << " -> " << v.as_ref();
            else os << " = " << to_literal(v);
        }
        os << (order.empty() ? "}\n" : " }\n");
    }
    os << "}\n";
    return os.str();
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, std::string_view content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << content;
}

namespace {

template <class F>
auto with_path(const std::filesystem::path& p, F&& f) {
    try {
        return f(read_file(p));
    } catch (const SyntaxError& e) {
        throw e.in_file(p.string());
    }
}

}  // namespace

Metamodel load_metamodel(const std::filesystem::path& p) {
    return with_path(p, [](const std::string& s) { return parse_metamodel(s); });
}

ObjectGraph load_instance(const std::filesystem::path& p) {
    return with_path(p, [](const std::string& s) { return parse_instance(s); });
}

}  // namespace rtm
