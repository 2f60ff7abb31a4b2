#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rtm {

struct SourceLoc {
    int line = 0;
    int column = 0;

    // Positions are diagnostics only; they never take part in AST equality.
    friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

/// A single well-formedness problem. `code` is the stable short tag
/// ("duplicate class", "kind mismatch", ...); `message` names the culprits.
struct Violation {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    void add(std::string code, std::string message) {
        violations.push_back({std::move(code), std::move(message)});
    }
    bool has(const std::string& code) const {
        for (const auto& v : violations)
            if (v.code == code) return true;
        return false;
    }
    std::string to_string() const;
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::string message, SourceLoc loc, std::vector<std::string> expected = {},
                std::string file = {});

    /// Same error, attributed to `file`.
    SyntaxError in_file(std::string file) const { return {detail_, loc_, expected_, std::move(file)}; }

    const SourceLoc& loc() const { return loc_; }
    const std::vector<std::string>& expected() const { return expected_; }
    const std::string& detail() const { return detail_; }
    const std::string& file() const { return file_; }

private:
    std::string detail_;
    SourceLoc loc_;
    std::vector<std::string> expected_;
    std::string file_;
};

}  // namespace rtm
