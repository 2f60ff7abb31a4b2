#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rtm/metamodel.hpp"
#include "rtm/value.hpp"

namespace rtm {

struct ObjectNode {
    std::string id;
    ClassRef cls;
    std::map<std::string, Value> slots;  // absent slot reads as null

    const Value& get(const std::string& field) const;
    void set(const std::string& field, Value v) { slots[field] = std::move(v); }

    friend bool operator==(const ObjectNode&, const ObjectNode&) = default;
};

/// Insertion-ordered set of objects with unique ids. Plain value type: a
/// copy is a deep copy.
class ObjectGraph {
public:
    explicit ObjectGraph(std::string id = "g") : id_(std::move(id)) {}

    const std::string& id() const { return id_; }
    void set_id(std::string id) { id_ = std::move(id); }

    /// Throws std::invalid_argument on a duplicate id.
    ObjectNode& add(ObjectNode node);
    ObjectNode& add(std::string id, ClassRef cls, std::map<std::string, Value> slots = {});

    bool contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }
    const ObjectNode* find(std::string_view id) const;
    ObjectNode* find(std::string_view id);

    /// Removes every object whose id satisfies `pred`, keeping order.
    template <class Pred>
    void remove_if(Pred pred) {
        std::vector<ObjectNode> kept;
        kept.reserve(objects_.size());
        for (auto& o : objects_)
            if (!pred(o)) kept.push_back(std::move(o));
        objects_ = std::move(kept);
        reindex();
    }

    std::span<const ObjectNode> objects() const { return objects_; }
    std::span<ObjectNode> objects() { return objects_; }
    std::size_t size() const { return objects_.size(); }
    bool empty() const { return objects_.empty(); }

private:
    void reindex();

    std::string id_;
    std::vector<ObjectNode> objects_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Per-object conformance against the object's class. Slots of unknown
/// fields, kind mismatches, null in mandatory fields, dangling refs and refs
/// to objects of the wrong class are violations.
ValidationReport validate_instance(const ObjectGraph& g, const MetamodelSet& mms);

ObjectGraph deep_copy(const ObjectGraph& g);

/// True iff some bijection between the objects of `a` and `b` preserves
/// classes and attribute values and maps references consistently. Ids and
/// insertion order are ignored.
bool graph_equal(const ObjectGraph& a, const ObjectGraph& b);

/// Objects reachable from `root` through reference slots, root first,
/// in discovery order.
std::vector<std::string> reference_closure(const ObjectGraph& g, const std::string& root);

}  // namespace rtm
