#include "rtm/diagnostics.hpp"

#include <sstream>

namespace rtm {

std::string ValidationReport::to_string() const {
    if (ok()) return "ok";
    std::ostringstream os;
    for (const auto& v : violations) os << v.code << ": " << v.message << '\n';
    return os.str();
}

namespace {

std::string render(const std::string& message, SourceLoc loc, const std::vector<std::string>& expected,
                   const std::string& file) {
    std::ostringstream os;
    if (!file.empty()) os << file << ':';
    os << loc.line << ':' << loc.column << ": " << message;
    if (!expected.empty()) {
        os << " (expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) os << (i + 1 == expected.size() ? " or " : ", ");
            os << expected[i];
        }
        os << ')';
    }
    return os.str();
}

}  // namespace

SyntaxError::SyntaxError(std::string message, SourceLoc loc, std::vector<std::string> expected,
                         std::string file)
    : std::runtime_error(render(message, loc, expected, file)),
      detail_(std::move(message)),
      loc_(loc),
      expected_(std::move(expected)),
      file_(std::move(file)) {}

}  // namespace rtm
