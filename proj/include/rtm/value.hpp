#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace rtm {

/// Proleptic Gregorian calendar date. Years are limited to 1..9999 so every
/// valid date has a YYYY-MM-DD spelling.
struct Date {
    int year = 1;
    int month = 1;
    int day = 1;

    friend auto operator<=>(const Date&, const Date&) = default;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);
bool is_valid_date(const Date& d);

/// "YYYY-MM-DD"
std::string format_date(const Date& d);
std::optional<Date> parse_date(std::string_view text);

struct Null {
    friend bool operator==(Null, Null) { return true; }
};

/// Reference to an object by id, within one ObjectGraph.
struct ObjectRef {
    std::string id;
    friend bool operator==(const ObjectRef&, const ObjectRef&) = default;
};

enum class ValueKind { Null, Int, Bool, String, Date, Ref };

std::string_view kind_name(ValueKind k);

/// Runtime value universe for attribute slots and expression evaluation.
class Value {
public:
    using Storage = std::variant<Null, std::int64_t, bool, std::string, Date, ObjectRef>;

    Value() = default;
    Value(Null) {}
    Value(std::int64_t v) : v_(v) {}
    Value(int v) : v_(std::int64_t{v}) {}
    Value(bool v) : v_(v) {}
    Value(std::string v) : v_(std::move(v)) {}
    Value(const char* v) : v_(std::string(v)) {}
    Value(Date v) : v_(v) {}
    Value(ObjectRef v) : v_(std::move(v)) {}

    static Value ref(std::string id) { return Value(ObjectRef{std::move(id)}); }

    ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }
    bool is_null() const { return kind() == ValueKind::Null; }

    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    const std::string& as_string() const { return std::get<std::string>(v_); }
    const Date& as_date() const { return std::get<Date>(v_); }
    const std::string& as_ref() const { return std::get<ObjectRef>(v_).id; }

    const Storage& storage() const { return v_; }

    friend bool operator==(const Value&, const Value&) = default;

private:
    Storage v_;
};

/// Literal spelling shared by the instance and rule formats: null, true/false,
/// integers, "escaped text", YYYY-MM-DD. References print as their id.
std::string to_literal(const Value& v);
std::string quote_string(std::string_view s);

std::ostream& operator<<(std::ostream& os, const Value& v);

}  // namespace rtm
