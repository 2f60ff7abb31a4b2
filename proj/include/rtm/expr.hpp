#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rtm/diagnostics.hpp"
#include "rtm/lexer.hpp"
#include "rtm/object_graph.hpp"
#include "rtm/value.hpp"

namespace rtm {

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

std::string_view op_spelling(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

namespace ast {
struct Literal {
    Value value;
};
struct Var {
    std::string name;
};
/// `var.field`, where var holds an object reference.
struct FieldAccess {
    std::string var;
    std::string field;
};
/// Arithmetic negation.
struct Unary {
    ExprPtr operand;
};
struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Ternary {
    ExprPtr cond;
    ExprPtr then_branch;
    ExprPtr else_branch;
};
struct Call {
    std::string name;
    std::vector<ExprPtr> args;
};
}  // namespace ast

/// Immutable attribute-expression node.
struct Expr {
    using Node = std::variant<ast::Literal, ast::Var, ast::FieldAccess, ast::Unary, ast::Binary,
                              ast::Ternary, ast::Call>;
    Node node;
    SourceLoc loc;

    template <class T>
    const T* as() const { return std::get_if<T>(&node); }
};

/// Deep structural equality; source positions are ignored.
bool operator==(const Expr& a, const Expr& b);
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

namespace mk {
ExprPtr lit(Value v);
ExprPtr var(std::string name);
ExprPtr field(std::string var, std::string field);
ExprPtr neg(ExprPtr e);
ExprPtr bin(BinaryOp op, ExprPtr l, ExprPtr r);
ExprPtr ternary(ExprPtr c, ExprPtr t, ExprPtr e);
ExprPtr call(std::string name, std::vector<ExprPtr> args);
}  // namespace mk

/// Builtins callable from expressions.
struct BuiltinSignature {
    std::string_view name;
    std::vector<ValueKind> params;
    ValueKind result;
};
const BuiltinSignature* find_builtin(std::string_view name);

/// Precedence, loosest first: ternary, or, and, comparisons, + -, * /,
/// unary minus, call/primary.
ExprPtr parse_expr(std::string_view text);
/// Parses one expression at the cursor and leaves the rest of the stream.
ExprPtr parse_expr(TokenStream& ts);

/// Minimal-parenthesis rendering; parse_expr(print_expr(e)) == e for every
/// parser-produced tree.
std::string print_expr(const Expr& e);

/// Names an expression reads: plain variables plus the base variable of
/// every field access.
std::set<std::string> free_names(const Expr& e);

struct Env {
    std::map<std::string, Value> bindings;
    Date today{2020, 1, 1};
    const ObjectGraph* graph = nullptr;

    /// Bound value, else TODAY, else nullopt.
    std::optional<Value> lookup(std::string_view name) const;
    bool is_bound(std::string_view name) const { return lookup(name).has_value(); }
};

enum class EvalErrorKind {
    UnboundName,
    KindMismatch,
    DivisionByZero,
    NullOperand,
    Overflow,
    NegativeAge,
    NegativeYears,
    InvalidDate,
    UnknownObject,
};

std::string_view eval_error_name(EvalErrorKind k);

class EvalError : public std::runtime_error {
public:
    EvalError(EvalErrorKind kind, const std::string& detail);
    EvalErrorKind kind() const { return kind_; }

private:
    EvalErrorKind kind_;
};

/// Strict, pure evaluation. == and != accept null on either side; every
/// other operator rejects null. Only the chosen ternary branch is evaluated.
Value eval(const Expr& e, const Env& env);

/// Whole completed years from `from` to `to`. Throws NegativeAge if from > to.
std::int64_t years_between(const Date& from, const Date& to);
/// `ref` shifted back `n` years; Feb 29 clamps to Feb 28 in common years.
Date minus_years(const Date& ref, std::int64_t n);

}  // namespace rtm
