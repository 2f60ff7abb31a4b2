#include "rtm/expr.hpp"

#include <array>

namespace rtm {

std::string_view op_spelling(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::And: return "and";
        case BinaryOp::Or: return "or";
    }
    return "?";
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, ast::Literal>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, ast::Var>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, ast::FieldAccess>) {
                return x.var == y.var && x.field == y.field;
            } else if constexpr (std::is_same_v<T, ast::Unary>) {
                return expr_equal(x.operand, y.operand);
            } else if constexpr (std::is_same_v<T, ast::Binary>) {
                return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
            } else if constexpr (std::is_same_v<T, ast::Ternary>) {
                return expr_equal(x.cond, y.cond) && expr_equal(x.then_branch, y.then_branch) &&
                       expr_equal(x.else_branch, y.else_branch);
            } else {
                if (x.name != y.name || x.args.size() != y.args.size()) return false;
                for (std::size_t i = 0; i < x.args.size(); ++i)
                    if (!expr_equal(x.args[i], y.args[i])) return false;
                return true;
            }
        },
        a.node);
}

namespace mk {
namespace {
ExprPtr make(Expr::Node n, SourceLoc loc = {}) {
    return std::make_shared<const Expr>(Expr{std::move(n), loc});
}
}  // namespace
ExprPtr lit(Value v) { return make(ast::Literal{std::move(v)}); }
ExprPtr var(std::string name) { return make(ast::Var{std::move(name)}); }
ExprPtr field(std::string v, std::string f) { return make(ast::FieldAccess{std::move(v), std::move(f)}); }
ExprPtr neg(ExprPtr e) { return make(ast::Unary{std::move(e)}); }
ExprPtr bin(BinaryOp op, ExprPtr l, ExprPtr r) { return make(ast::Binary{op, std::move(l), std::move(r)}); }
ExprPtr ternary(ExprPtr c, ExprPtr t, ExprPtr e) {
    return make(ast::Ternary{std::move(c), std::move(t), std::move(e)});
}
ExprPtr call(std::string name, std::vector<ExprPtr> args) {
    return make(ast::Call{std::move(name), std::move(args)});
}
}  // namespace mk

const BuiltinSignature* find_builtin(std::string_view name) {
    static const std::array<BuiltinSignature, 2> kBuiltins{{
        {"yearsBetween", {ValueKind::Date, ValueKind::Date}, ValueKind::Int},
        {"minusYears", {ValueKind::Date, ValueKind::Int}, ValueKind::Date},
    }};
    for (const auto& b : kBuiltins)
        if (b.name == name) return &b;
    return nullptr;
}

// ---------------------------------------------------------------- parsing

namespace {

bool reserved(std::string_view w) {
    return w == "and" || w == "or" || w == "null" || w == "true" || w == "false";
}

ExprPtr at(Expr::Node n, SourceLoc loc) { return std::make_shared<const Expr>(Expr{std::move(n), loc}); }

class ExprParser {
public:
    explicit ExprParser(TokenStream& ts) : ts_(ts) {}

    ExprPtr expr() { return ternary(); }

private:
    ExprPtr ternary() {
        ExprPtr cond = logic_or();
        if (!ts_.peek().is("?")) return cond;
        SourceLoc loc = ts_.next().loc;
        ExprPtr then_branch = expr();
        ts_.expect(":");
        ExprPtr else_branch = ternary();
        return at(ast::Ternary{cond, then_branch, else_branch}, loc);
    }

    ExprPtr logic_or() {
        ExprPtr lhs = logic_and();
        while (ts_.peek().is_ident("or")) {
            SourceLoc loc = ts_.next().loc;
            lhs = at(ast::Binary{BinaryOp::Or, lhs, logic_and()}, loc);
        }
        return lhs;
    }

    ExprPtr logic_and() {
        ExprPtr lhs = comparison();
        while (ts_.peek().is_ident("and")) {
            SourceLoc loc = ts_.next().loc;
            lhs = at(ast::Binary{BinaryOp::And, lhs, comparison()}, loc);
        }
        return lhs;
    }

    ExprPtr comparison() {
        ExprPtr lhs = additive();
        for (;;) {
            static constexpr std::pair<std::string_view, BinaryOp> kOps[] = {
                {"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}, {"<", BinaryOp::Lt},
                {"<=", BinaryOp::Le}, {">", BinaryOp::Gt},  {">=", BinaryOp::Ge}};
            const BinaryOp* op = nullptr;
            for (const auto& [s, o] : kOps)
                if (ts_.peek().is(s)) op = &o;
            if (!op) return lhs;
            SourceLoc loc = ts_.next().loc;
            lhs = at(ast::Binary{*op, lhs, additive()}, loc);
        }
    }

    ExprPtr additive() {
        ExprPtr lhs = multiplicative();
        while (ts_.peek().is("+") || ts_.peek().is("-")) {
            BinaryOp op = ts_.peek().is("+") ? BinaryOp::Add : BinaryOp::Sub;
            SourceLoc loc = ts_.next().loc;
            lhs = at(ast::Binary{op, lhs, multiplicative()}, loc);
        }
        return lhs;
    }

    ExprPtr multiplicative() {
        ExprPtr lhs = unary();
        while (ts_.peek().is("*") || ts_.peek().is("/")) {
            BinaryOp op = ts_.peek().is("*") ? BinaryOp::Mul : BinaryOp::Div;
            SourceLoc loc = ts_.next().loc;
            lhs = at(ast::Binary{op, lhs, unary()}, loc);
        }
        return lhs;
    }

    ExprPtr unary() {
        if (ts_.peek().is("-")) {
            SourceLoc loc = ts_.next().loc;
            return at(ast::Unary{unary()}, loc);
        }
        return primary();
    }

    ExprPtr primary() {
        const Token& t = ts_.peek();
        SourceLoc loc = t.loc;
        switch (t.kind) {
            case TokenKind::Int: return at(ast::Literal{Value{ts_.next().int_value}}, loc);
            case TokenKind::String: return at(ast::Literal{Value{ts_.next().text}}, loc);
            case TokenKind::Date: return at(ast::Literal{Value{ts_.next().date_value}}, loc);
            case TokenKind::Ident: break;
            default:
                if (t.is("(")) {
                    ts_.next();
                    ExprPtr inner = expr();
                    ts_.expect(")");
                    return inner;
                }
                ts_.fail("unexpected " + t.describe(), {"expression"});
        }
        if (t.is_ident("null")) return ts_.next(), at(ast::Literal{Value{}}, loc);
        if (t.is_ident("true")) return ts_.next(), at(ast::Literal{Value{true}}, loc);
        if (t.is_ident("false")) return ts_.next(), at(ast::Literal{Value{false}}, loc);
        if (reserved(t.text)) ts_.fail("unexpected " + t.describe(), {"expression"});
        std::string name = ts_.next().text;
        if (ts_.peek().is("(")) return call(std::move(name), loc);
        if (ts_.accept(".")) {
            std::string field = ts_.expect_name("field name").text;
            return at(ast::FieldAccess{std::move(name), std::move(field)}, loc);
        }
        return at(ast::Var{std::move(name)}, loc);
    }

    ExprPtr call(std::string name, SourceLoc loc) {
        const BuiltinSignature* sig = find_builtin(name);
        if (!sig) throw SyntaxError("unknown function '" + name + "'", loc);
        ts_.expect("(");
        std::vector<ExprPtr> args;
        if (!ts_.accept(")")) {
            for (;;) {
                args.push_back(expr());
                if (ts_.accept(")")) break;
                if (!ts_.accept(",")) ts_.fail("unexpected " + ts_.peek().describe(), {"','", "')'"});
            }
        }
        if (args.size() != sig->params.size())
            throw SyntaxError(name + " expects " + std::to_string(sig->params.size()) + " argument(s), got " +
                                  std::to_string(args.size()),
                              loc);
        return at(ast::Call{std::move(name), std::move(args)}, loc);
    }

    TokenStream& ts_;
};

}  // namespace

ExprPtr parse_expr(TokenStream& ts) { return ExprParser(ts).expr(); }

ExprPtr parse_expr(std::string_view text) {
    TokenStream ts(tokenize(text));
    ExprPtr e = parse_expr(ts);
    if (!ts.at_end()) ts.fail("unexpected " + ts.peek().describe(), {"operator", "end of input"});
    return e;
}

// --------------------------------------------------------------- printing

namespace {

enum Prec { kTernary = 1, kOr, kAnd, kCmp, kAdd, kMul, kUnary, kPrimary };

int binary_prec(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return kOr;
        case BinaryOp::And: return kAnd;
        case BinaryOp::Add:
        case BinaryOp::Sub: return kAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div: return kMul;
        default: return kCmp;
    }
}

int prec_of(const Expr& e) {
    if (e.as<ast::Ternary>()) return kTernary;
    if (auto* b = e.as<ast::Binary>()) return binary_prec(b->op);
    if (e.as<ast::Unary>()) return kUnary;
    if (auto* l = e.as<ast::Literal>(); l && l->value.kind() == ValueKind::Int && l->value.as_int() < 0)
        return kUnary;
    return kPrimary;
}

void print(const Expr& e, int min_prec, std::string& out) {
    bool paren = prec_of(e) < min_prec;
    if (paren) out += '(';
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ast::Literal>) {
                out += to_literal(x.value);
            } else if constexpr (std::is_same_v<T, ast::Var>) {
                out += x.name;
            } else if constexpr (std::is_same_v<T, ast::FieldAccess>) {
                out += x.var + "." + x.field;
            } else if constexpr (std::is_same_v<T, ast::Unary>) {
                out += '-';
                print(*x.operand, kUnary, out);
            } else if constexpr (std::is_same_v<T, ast::Binary>) {
                int p = binary_prec(x.op);
                print(*x.lhs, p, out);
                out += ' ';
                out += op_spelling(x.op);
                out += ' ';
                print(*x.rhs, p + 1, out);
            } else if constexpr (std::is_same_v<T, ast::Ternary>) {
                print(*x.cond, kOr, out);
                out += " ? ";
                print(*x.then_branch, kTernary, out);
                out += " : ";
                print(*x.else_branch, kTernary, out);
            } else {
                out += x.name;
                out += '(';
                for (std::size_t i = 0; i < x.args.size(); ++i) {
                    if (i) out += ", ";
                    print(*x.args[i], kTernary, out);
                }
                out += ')';
            }
        },
        e.node);
    if (paren) out += ')';
}

void collect_names(const Expr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ast::Var>) {
                out.insert(x.name);
            } else if constexpr (std::is_same_v<T, ast::FieldAccess>) {
                out.insert(x.var);
            } else if constexpr (std::is_same_v<T, ast::Unary>) {
                collect_names(*x.operand, out);
            } else if constexpr (std::is_same_v<T, ast::Binary>) {
                collect_names(*x.lhs, out);
                collect_names(*x.rhs, out);
            } else if constexpr (std::is_same_v<T, ast::Ternary>) {
                collect_names(*x.cond, out);
                collect_names(*x.then_branch, out);
                collect_names(*x.else_branch, out);
            } else if constexpr (std::is_same_v<T, ast::Call>) {
                for (const auto& a : x.args) collect_names(*a, out);
            }
        },
        e.node);
}

}  // namespace

std::string print_expr(const Expr& e) {
    std::string out;
    print(e, kTernary, out);
    return out;
}

std::set<std::string> free_names(const Expr& e) {
    std::set<std::string> out;
    collect_names(e, out);
    return out;
}

// ------------------------------------------------------------- evaluation

std::optional<Value> Env::lookup(std::string_view name) const {
    if (auto it = bindings.find(std::string(name)); it != bindings.end()) return it->second;
    if (name == "TODAY") return Value{today};
    return std::nullopt;
}

std::string_view eval_error_name(EvalErrorKind k) {
    switch (k) {
        case EvalErrorKind::UnboundName: return "unbound name";
        case EvalErrorKind::KindMismatch: return "kind mismatch";
        case EvalErrorKind::DivisionByZero: return "division by zero";
        case EvalErrorKind::NullOperand: return "null operand";
        case EvalErrorKind::Overflow: return "integer overflow";
        case EvalErrorKind::NegativeAge: return "negative age";
        case EvalErrorKind::NegativeYears: return "negative years";
        case EvalErrorKind::InvalidDate: return "invalid date";
        case EvalErrorKind::UnknownObject: return "unknown object";
    }
    return "?";
}

EvalError::EvalError(EvalErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(eval_error_name(kind)) + ": " + detail), kind_(kind) {}

std::int64_t years_between(const Date& from, const Date& to) {
    if (from > to)
        throw EvalError(EvalErrorKind::NegativeAge, format_date(from) + " is after " + format_date(to));
    std::int64_t years = to.year - from.year;
    if (std::pair(to.month, to.day) < std::pair(from.month, from.day)) --years;
    return years;
}

Date minus_years(const Date& ref, std::int64_t n) {
    if (n < 0) throw EvalError(EvalErrorKind::NegativeYears, std::to_string(n));
    if (n >= ref.year) throw EvalError(EvalErrorKind::InvalidDate, format_date(ref) + " minus " + std::to_string(n) + " years");
    Date d{ref.year - static_cast<int>(n), ref.month, ref.day};
    if (d.month == 2 && d.day == 29 && !is_leap_year(d.year)) d.day = 28;
    return d;
}

namespace {

[[noreturn]] void mismatch(std::string_view op, const Value& a, const Value& b) {
    throw EvalError(EvalErrorKind::KindMismatch, std::string(kind_name(a.kind())) + " " + std::string(op) + " " +
                                                     std::string(kind_name(b.kind())));
}

Value eval_binary(BinaryOp op, const Value& a, const Value& b) {
    if (op == BinaryOp::Eq || op == BinaryOp::Ne) {
        bool eq;
        if (a.is_null() || b.is_null()) eq = a.is_null() && b.is_null();
        else if (a.kind() != b.kind()) mismatch(op_spelling(op), a, b);
        else eq = a == b;
        return Value{op == BinaryOp::Eq ? eq : !eq};
    }
    if (a.is_null() || b.is_null())
        throw EvalError(EvalErrorKind::NullOperand, "operand of '" + std::string(op_spelling(op)) + "' is null");
    if (a.kind() != b.kind()) mismatch(op_spelling(op), a, b);
    switch (op) {
        case BinaryOp::And:
        case BinaryOp::Or:
            if (a.kind() != ValueKind::Bool) mismatch(op_spelling(op), a, b);
            return Value{op == BinaryOp::And ? (a.as_bool() && b.as_bool()) : (a.as_bool() || b.as_bool())};
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: {
            int c;
            switch (a.kind()) {
                case ValueKind::Int: c = a.as_int() < b.as_int() ? -1 : a.as_int() > b.as_int(); break;
                case ValueKind::String: c = a.as_string().compare(b.as_string()); break;
                case ValueKind::Date: c = a.as_date() < b.as_date() ? -1 : a.as_date() > b.as_date(); break;
                default: mismatch(op_spelling(op), a, b);
            }
            bool r = op == BinaryOp::Lt ? c < 0 : op == BinaryOp::Le ? c <= 0 : op == BinaryOp::Gt ? c > 0 : c >= 0;
            return Value{r};
        }
        case BinaryOp::Add:
            if (a.kind() == ValueKind::String) return Value{a.as_string() + b.as_string()};
            [[fallthrough]];
        case BinaryOp::Sub:
        case BinaryOp::Mul:
        case BinaryOp::Div: {
            if (a.kind() != ValueKind::Int) mismatch(op_spelling(op), a, b);
            std::int64_t x = a.as_int(), y = b.as_int(), r = 0;
            bool overflow = false;
            switch (op) {
                case BinaryOp::Add: overflow = __builtin_add_overflow(x, y, &r); break;
                case BinaryOp::Sub: overflow = __builtin_sub_overflow(x, y, &r); break;
                case BinaryOp::Mul: overflow = __builtin_mul_overflow(x, y, &r); break;
                default:
                    if (y == 0) throw EvalError(EvalErrorKind::DivisionByZero, std::to_string(x) + " / 0");
                    if (x == INT64_MIN && y == -1) overflow = true;
                    else r = x / y;
            }
            if (overflow) throw EvalError(EvalErrorKind::Overflow, std::string(op_spelling(op)));
            return Value{r};
        }
        default: break;
    }
    mismatch(op_spelling(op), a, b);
}

Value eval_call(const ast::Call& c, const Env& env) {
    const BuiltinSignature* sig = find_builtin(c.name);
    if (!sig || sig->params.size() != c.args.size())
        throw EvalError(EvalErrorKind::UnboundName, "function '" + c.name + "'");
    std::vector<Value> args;
    for (std::size_t i = 0; i < c.args.size(); ++i) {
        Value v = eval(*c.args[i], env);
        if (v.is_null()) throw EvalError(EvalErrorKind::NullOperand, "argument " + std::to_string(i + 1) + " of " + c.name);
        if (v.kind() != sig->params[i])
            throw EvalError(EvalErrorKind::KindMismatch, c.name + " argument " + std::to_string(i + 1) + " is " +
                                                             std::string(kind_name(v.kind())));
        args.push_back(std::move(v));
    }
    if (c.name == "yearsBetween") return Value{years_between(args[0].as_date(), args[1].as_date())};
    return Value{minus_years(args[0].as_date(), args[1].as_int())};
}

}  // namespace

Value eval(const Expr& e, const Env& env) {
    return std::visit(
        [&](const auto& x) -> Value {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ast::Literal>) {
                return x.value;
            } else if constexpr (std::is_same_v<T, ast::Var>) {
                auto v = env.lookup(x.name);
                if (!v) throw EvalError(EvalErrorKind::UnboundName, x.name);
                return *v;
            } else if constexpr (std::is_same_v<T, ast::FieldAccess>) {
                auto v = env.lookup(x.var);
                if (!v) throw EvalError(EvalErrorKind::UnboundName, x.var);
                if (v->kind() != ValueKind::Ref)
                    throw EvalError(EvalErrorKind::KindMismatch, x.var + " is not an object reference");
                const ObjectNode* obj = env.graph ? env.graph->find(v->as_ref()) : nullptr;
                if (!obj) throw EvalError(EvalErrorKind::UnknownObject, v->as_ref());
                return obj->get(x.field);
            } else if constexpr (std::is_same_v<T, ast::Unary>) {
                Value v = eval(*x.operand, env);
                if (v.is_null()) throw EvalError(EvalErrorKind::NullOperand, "operand of unary '-' is null");
                if (v.kind() != ValueKind::Int)
                    throw EvalError(EvalErrorKind::KindMismatch, "-" + std::string(kind_name(v.kind())));
                if (v.as_int() == INT64_MIN) throw EvalError(EvalErrorKind::Overflow, "unary -");
                return Value{-v.as_int()};
            } else if constexpr (std::is_same_v<T, ast::Binary>) {
                Value a = eval(*x.lhs, env);
                Value b = eval(*x.rhs, env);
                return eval_binary(x.op, a, b);
            } else if constexpr (std::is_same_v<T, ast::Ternary>) {
                Value c = eval(*x.cond, env);
                if (c.is_null()) throw EvalError(EvalErrorKind::NullOperand, "ternary condition is null");
                if (c.kind() != ValueKind::Bool)
                    throw EvalError(EvalErrorKind::KindMismatch, "ternary condition is " + std::string(kind_name(c.kind())));
                return eval(c.as_bool() ? *x.then_branch : *x.else_branch, env);
            } else {
                return eval_call(x, env);
            }
        },
        e.node);
}

}  // namespace rtm
