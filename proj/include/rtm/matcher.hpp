#pragma once

#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtm/expr.hpp"
#include "rtm/object_graph.hpp"
#include "rtm/rule_module.hpp"

namespace rtm {

/// Injective assignment of pattern nodes to host objects plus the
/// environment extended by constraint bindings and node locals.
struct Match {
    std::map<std::string, std::string> nodes;  // local name -> object id
    Env env;
};

/// A pre-bound node whose parameter is missing, not an object reference,
/// names no object, or names an object of the wrong class.
class BindingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Enumerates matches of the given preserve nodes in deterministic order:
/// backtracking over nodes in declaration order (pre-bound nodes fixed
/// first), candidates in graph insertion order. `visit` returns false to
/// stop. Expression errors inside constraints propagate as EvalError.
void for_each_match(std::span<const PatternNode> nodes, const ObjectGraph& g, const Env& pre,
                    const std::function<bool(const Match&)>& visit);

std::vector<Match> find_matches(std::span<const PatternNode> nodes, const ObjectGraph& g, const Env& pre);
std::optional<Match> find_first_match(std::span<const PatternNode> nodes, const ObjectGraph& g, const Env& pre);

}  // namespace rtm
