#include "rtm/value.hpp"

#include <charconv>
#include <cstdio>
#include <ostream>

namespace rtm {

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) return 0;
    if (month == 2 && is_leap_year(year)) return 29;
    return kDays[month - 1];
}

bool is_valid_date(const Date& d) {
    if (d.year < 1 || d.year > 9999) return false;
    if (d.month < 1 || d.month > 12) return false;
    return d.day >= 1 && d.day <= days_in_month(d.year, d.month);
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int out = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (text[i] < '0' || text[i] > '9') return std::nullopt;
            out = out * 10 + (text[i] - '0');
        }
        return out;
    };
    auto y = field(0, 4), m = field(5, 2), d = field(8, 2);
    if (!y || !m || !d) return std::nullopt;
    Date date{*y, *m, *d};
    if (!is_valid_date(date)) return std::nullopt;
    return date;
}

std::string_view kind_name(ValueKind k) {
    switch (k) {
        case ValueKind::Null: return "null";
        case ValueKind::Int: return "int";
        case ValueKind::Bool: return "bool";
        case ValueKind::String: return "string";
        case ValueKind::Date: return "date";
        case ValueKind::Ref: return "ref";
    }
    return "?";
}

std::string quote_string(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

std::string to_literal(const Value& v) {
    switch (v.kind()) {
        case ValueKind::Null: return "null";
        case ValueKind::Int: return std::to_string(v.as_int());
        case ValueKind::Bool: return v.as_bool() ? "true" : "false";
        case ValueKind::String: return quote_string(v.as_string());
        case ValueKind::Date: return format_date(v.as_date());
        case ValueKind::Ref: return v.as_ref();
    }
    return {};
}

std::ostream& operator<<(std::ostream& os, const Value& v) {
    if (v.kind() == ValueKind::Ref) return os << "->" << v.as_ref();
    return os << to_literal(v);
}

}  // namespace rtm
