#include "rtm/object_graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace rtm {

namespace {
const Value kNull{};
}

const Value& ObjectNode::get(const std::string& field) const {
    auto it = slots.find(field);
    return it == slots.end() ? kNull : it->second;
}

ObjectNode& ObjectGraph::add(ObjectNode node) {
    if (contains(node.id)) throw std::invalid_argument("duplicate object id '" + node.id + "'");
    index_.emplace(node.id, objects_.size());
    objects_.push_back(std::move(node));
    return objects_.back();
}

ObjectNode& ObjectGraph::add(std::string id, ClassRef cls, std::map<std::string, Value> slots) {
    return add(ObjectNode{std::move(id), std::move(cls), std::move(slots)});
}

const ObjectNode* ObjectGraph::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &objects_[it->second];
}

ObjectNode* ObjectGraph::find(std::string_view id) {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &objects_[it->second];
}

void ObjectGraph::reindex() {
    index_.clear();
    for (std::size_t i = 0; i < objects_.size(); ++i) index_.emplace(objects_[i].id, i);
}

ValidationReport validate_instance(const ObjectGraph& g, const MetamodelSet& mms) {
    ValidationReport report;
    for (const auto& obj : g.objects()) {
        const ClassDef* cls = mms.find_class(obj.cls);
        if (!cls) {
            report.add("unknown class", obj.id + " : " + obj.cls.str());
            continue;
        }
        for (const auto& [name, value] : obj.slots) {
            const FieldDef* f = cls->field(name);
            if (!f) {
                report.add("unknown field", obj.id + "." + name);
                continue;
            }
            if (value.is_null()) continue;
            if (value.kind() != value_kind_of(f->kind)) {
                report.add("kind mismatch", obj.id + "." + name + ": expected " +
                                                std::string(field_kind_name(f->kind)) + ", got " +
                                                std::string(kind_name(value.kind())));
                continue;
            }
            if (f->kind == FieldKind::Ref) {
                const ObjectNode* target = g.find(value.as_ref());
                if (!target)
                    report.add("dangling reference", obj.id + "." + name + " -> " + value.as_ref());
                else if (target->cls != f->target)
                    report.add("ref target class mismatch", obj.id + "." + name + " -> " + target->cls.str());
            }
        }
        for (const auto& f : cls->fields) {
            if (!f.optional && obj.get(f.name).is_null())
                report.add("mandatory field null", obj.id + "." + f.name);
        }
    }
    return report;
}

ObjectGraph deep_copy(const ObjectGraph& g) { return g; }

namespace {

// Backtracking bijection search. Objects of `a` are assigned in order;
// references are checked as soon as both endpoints are mapped.
class IsoSearch {
public:
    IsoSearch(const ObjectGraph& a, const ObjectGraph& b) : a_(a), b_(b) {
        for (std::size_t j = 0; j < b.size(); ++j) b_pos_[b.objects()[j].id] = j;
        for (std::size_t i = 0; i < a.size(); ++i) a_pos_[a.objects()[i].id] = i;
        fwd_.assign(a.size(), kUnmapped);
        used_.assign(b.size(), false);
        for (std::size_t j = 0; j < b.size(); ++j) by_class_[b.objects()[j].cls].push_back(j);
        // Objects that reference object i, for checking incoming edges.
        incoming_.resize(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            for (const auto& [field, v] : a.objects()[i].slots)
                if (v.kind() == ValueKind::Ref)
                    if (auto it = a_pos_.find(v.as_ref()); it != a_pos_.end())
                        incoming_[it->second].push_back(i);
    }

    bool run() { return extend(0); }

private:
    static constexpr std::size_t kUnmapped = static_cast<std::size_t>(-1);

    bool attrs_equal(const ObjectNode& x, const ObjectNode& y) const {
        auto non_null = [](const ObjectNode& o) {
            std::size_t n = 0;
            for (const auto& [k, v] : o.slots) n += !v.is_null();
            return n;
        };
        if (non_null(x) != non_null(y)) return false;
        for (const auto& [field, v] : x.slots) {
            const Value& w = y.get(field);
            if (v.kind() == ValueKind::Ref || w.kind() == ValueKind::Ref) {
                if (v.kind() != w.kind()) return false;
                continue;
            }
            if (v != w) return false;
        }
        return true;
    }

    // Image of a reference value of `a` under the partial map; nullopt when
    // the target is not yet mapped. Dangling ids map to themselves.
    std::optional<std::string> image(const std::string& a_id) const {
        auto it = a_pos_.find(a_id);
        if (it == a_pos_.end()) return "\x01" "dangling:" + a_id;
        std::size_t j = fwd_[it->second];
        if (j == kUnmapped) return std::nullopt;
        return b_.objects()[j].id;
    }

    std::string b_ref_key(const Value& v) const {
        return b_pos_.count(v.as_ref()) ? v.as_ref() : "\x01" "dangling:" + v.as_ref();
    }

    bool refs_consistent(std::size_t i) const {
        auto check_out = [&](std::size_t src) {
            const ObjectNode& x = a_.objects()[src];
            const ObjectNode& y = b_.objects()[fwd_[src]];
            for (const auto& [field, v] : x.slots) {
                if (v.kind() != ValueKind::Ref) continue;
                auto img = image(v.as_ref());
                if (!img) continue;
                if (*img != b_ref_key(y.get(field))) return false;
            }
            return true;
        };
        if (!check_out(i)) return false;
        for (std::size_t src : incoming_[i])
            if (fwd_[src] != kUnmapped && !check_out(src)) return false;
        return true;
    }

    bool extend(std::size_t i) {
        if (i == a_.size()) return true;
        const ObjectNode& x = a_.objects()[i];
        auto it = by_class_.find(x.cls);
        if (it == by_class_.end()) return false;
        for (std::size_t j : it->second) {
            if (used_[j] || !attrs_equal(x, b_.objects()[j])) continue;
            fwd_[i] = j;
            used_[j] = true;
            if (refs_consistent(i) && extend(i + 1)) return true;
            fwd_[i] = kUnmapped;
            used_[j] = false;
        }
        return false;
    }

    const ObjectGraph& a_;
    const ObjectGraph& b_;
    std::unordered_map<std::string, std::size_t> a_pos_, b_pos_;
    std::map<ClassRef, std::vector<std::size_t>> by_class_;
    std::vector<std::vector<std::size_t>> incoming_;
    std::vector<std::size_t> fwd_;
    std::vector<bool> used_;
};

}  // namespace

bool graph_equal(const ObjectGraph& a, const ObjectGraph& b) {
    if (a.size() != b.size()) return false;
    std::map<ClassRef, std::size_t> count;
    for (const auto& o : a.objects()) ++count[o.cls];
    for (const auto& o : b.objects())
        if (count[o.cls]-- == 0) return false;
    return IsoSearch(a, b).run();
}

std::vector<std::string> reference_closure(const ObjectGraph& g, const std::string& root) {
    std::vector<std::string> order;
    if (!g.contains(root)) return order;
    std::set<std::string> seen{root};
    std::deque<std::string> queue{root};
    while (!queue.empty()) {
        std::string id = std::move(queue.front());
        queue.pop_front();
        const ObjectNode* o = g.find(id);
        order.push_back(id);
        for (const auto& [field, v] : o->slots) {
            if (v.kind() != ValueKind::Ref || !g.contains(v.as_ref())) continue;
            if (seen.insert(v.as_ref()).second) queue.push_back(v.as_ref());
        }
    }
    return order;
}

}  // namespace rtm
