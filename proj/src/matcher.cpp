#include "rtm/matcher.hpp"

#include <unordered_set>

namespace rtm {

namespace {

class Search {
public:
    Search(std::span<const PatternNode> nodes, const ObjectGraph& g, const Env& pre,
           const std::function<bool(const Match&)>& visit)
        : nodes_(nodes), g_(g), visit_(visit) {
        match_.env = pre;
        match_.env.graph = &g;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].bound_param) order_.push_back(i);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (!nodes[i].bound_param) order_.push_back(i);
        index_of_.reserve(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) index_of_[nodes[i].name] = i;
        assigned_.assign(nodes.size(), nullptr);
    }

    void run() { step(0); }

private:
    // Returns false once the visitor asked to stop.
    bool step(std::size_t depth) {
        if (depth == order_.size()) return visit_(match_);
        const PatternNode& node = nodes_[order_[depth]];
        if (node.bound_param) {
            const ObjectNode* obj = prebound(node);
            return try_candidate(depth, node, *obj);
        }
        if (const ObjectNode* nav = navigated(node)) return try_candidate(depth, node, *nav);
        if (navigation_dead_) {
            navigation_dead_ = false;
            return true;
        }
        for (const auto& obj : g_.objects()) {
            if (obj.cls != node.cls) continue;
            if (!try_candidate(depth, node, obj)) return false;
        }
        return true;
    }

    const ObjectNode* prebound(const PatternNode& node) const {
        auto v = match_.env.lookup(*node.bound_param);
        if (!v) throw BindingError("node '" + node.name + "': parameter '" + *node.bound_param + "' is unbound");
        if (v->kind() != ValueKind::Ref)
            throw BindingError("node '" + node.name + "': parameter '" + *node.bound_param + "' is not an object");
        const ObjectNode* obj = g_.find(v->as_ref());
        if (!obj) throw BindingError("node '" + node.name + "': object '" + v->as_ref() + "' not in graph");
        if (obj->cls != node.cls)
            throw BindingError("node '" + node.name + "': object '" + obj->id + "' is " + obj->cls.str() +
                               ", expected " + node.cls.str());
        return obj;
    }

    // If an already-assigned node references `node` through a preserve
    // reference clause, that slot is the only possible candidate. A dead
    // navigation (null/dangling/wrong class slot) means no candidate at all.
    const ObjectNode* navigated(const PatternNode& node) {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const ObjectNode* src = assigned_[i];
            if (!src) continue;
            for (const auto& c : nodes_[i].refs) {
                if (c.target != node.name) continue;
                const Value& v = src->get(c.field);
                const ObjectNode* t = v.kind() == ValueKind::Ref ? g_.find(v.as_ref()) : nullptr;
                if (!t || t->cls != node.cls) {
                    navigation_dead_ = true;
                    return nullptr;
                }
                return t;
            }
        }
        return nullptr;
    }

    bool used(const ObjectNode& obj) const {
        for (const auto* a : assigned_)
            if (a == &obj) return true;
        return false;
    }

    bool refs_hold(std::size_t idx) const {
        auto holds = [&](std::size_t from) {
            for (const auto& c : nodes_[from].refs) {
                auto it = index_of_.find(c.target);
                if (it == index_of_.end()) return false;
                const ObjectNode* target = assigned_[it->second];
                if (!target) continue;
                const Value& v = assigned_[from]->get(c.field);
                if (v.kind() != ValueKind::Ref || v.as_ref() != target->id) return false;
            }
            return true;
        };
        if (!holds(idx)) return false;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (i != idx && assigned_[i] && !holds(i)) return false;
        return true;
    }

    bool try_candidate(std::size_t depth, const PatternNode& node, const ObjectNode& obj) {
        if (used(obj)) return true;
        std::size_t idx = order_[depth];
        assigned_[idx] = &obj;
        Env saved = match_.env;
        bool keep_going = true;
        if (refs_hold(idx) && constraints_hold(node, obj)) {
            match_.nodes[node.name] = obj.id;
            keep_going = step(depth + 1);
            match_.nodes.erase(node.name);
        }
        match_.env = std::move(saved);
        assigned_[idx] = nullptr;
        return keep_going;
    }

    bool constraints_hold(const PatternNode& node, const ObjectNode& obj) {
        match_.env.bindings[node.name] = Value::ref(obj.id);
        for (const auto& a : node.attrs) {
            const Value& slot = obj.get(a.field);
            if (const auto* v = a.expr->as<ast::Var>(); v && !match_.env.is_bound(v->name)) {
                match_.env.bindings[v->name] = slot;
                continue;
            }
            if (slot != eval(*a.expr, match_.env)) return false;
        }
        return true;
    }

    std::span<const PatternNode> nodes_;
    const ObjectGraph& g_;
    const std::function<bool(const Match&)>& visit_;
    std::vector<std::size_t> order_;
    std::unordered_map<std::string, std::size_t> index_of_;
    std::vector<const ObjectNode*> assigned_;
    Match match_;
    bool navigation_dead_ = false;
};

}  // namespace

void for_each_match(std::span<const PatternNode> nodes, const ObjectGraph& g, const Env& pre,
                    const std::function<bool(const Match&)>& visit) {
    Search(nodes, g, pre, visit).run();
}

std::vector<Match> find_matches(std::span<const PatternNode> nodes, const ObjectGraph& g, const Env& pre) {
    std::vector<Match> out;
    for_each_match(nodes, g, pre, [&](const Match& m) {
        out.push_back(m);
        return true;
    });
    return out;
}

std::optional<Match> find_first_match(std::span<const PatternNode> nodes, const ObjectGraph& g, const Env& pre) {
    std::optional<Match> out;
    for_each_match(nodes, g, pre, [&](const Match& m) {
        out = m;
        return false;
    });
    return out;
}

}  // namespace rtm
