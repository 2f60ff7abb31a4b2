#include "rtm/reference.hpp"

#include "rtm/expr.hpp"

namespace rtm {

namespace {

const Value& slot(const ObjectGraph& g, const std::string& id, const std::string& field) {
    return g.find(id)->get(field);
}

const std::string& target(const ObjectGraph& g, const std::string& id, const std::string& field) {
    const Value& v = slot(g, id, field);
    if (v.kind() != ValueKind::Ref)
        throw MigrationError(MigrationErrorKind::RuleFailure, "object '" + id + "' has no " + field);
    return v.as_ref();
}

}  // namespace

struct ReferenceTask::Builder {
    ReferenceTask& task;
    ObjectGraph out;

    std::string add(const std::string& mm, const std::string& cls, std::map<std::string, Value> slots) {
        std::string id;
        do id = "ref#" + std::to_string(++task.counter_);
        while (out.contains(id));
        out.add(id, {mm, cls}, std::move(slots));
        return id;
    }
};

ObjectGraph ReferenceTask::migrate(const ObjectGraph& g) {
    const std::string src = def_.source_metamodel(), dst = def_.target_metamodel();
    const bool forward = def_.direction == Direction::M1M2M1;
    trace_.reset();
    origin_.clear();
    if (def_.trace == TracePolicy::SourceCopy) trace_ = g;

    Builder b{*this, ObjectGraph(g.id())};
    for (const auto& o : g.objects()) {
        if (o.cls.metamodel != src || o.cls.name != def_.subject_class) continue;
        const Value& name = o.get("name");
        std::string made;
        if (def_.id == "s1") {
            made = forward ? b.add(dst, "Person", {{"name", name}, {"age", Value(std::int64_t{-1})}})
                           : b.add(dst, "Person", {{"name", name}});
        } else if (def_.id == "s2") {
            made = forward ? b.add(dst, "Person", {{"name", name}, {"age", Value(years_between(o.get("birthday").as_date(), today_))}})
                           : b.add(dst, "Person", {{"name", name}, {"birthday", Value(minus_years(today_, o.get("age").as_int()))}});
        } else if (def_.id == "s3") {
            Value n = forward ? (name.is_null() ? Value(std::string()) : name)
                              : (name.as_string().empty() ? Value(Null{}) : name);
            made = b.add(dst, "Person", {{"name", n}});
        } else {
            const std::string& p = target(g, o.id, "person");
            const std::string& d = target(g, o.id, "dog");
            std::string np, nd;
            if (forward) {
                np = b.add(dst, "Person", {{"name", slot(g, p, "name")},
                                           {"age", Value(years_between(slot(g, p, "birthday").as_date(), today_))}});
                nd = b.add(dst, "Dog", {{"name", slot(g, d, "name")}, {"owner", Value::ref(np)}});
            } else {
                np = b.add(dst, "Person", {{"name", slot(g, p, "name")},
                                           {"birthday", Value(minus_years(today_, slot(g, p, "age").as_int()))}});
                nd = b.add(dst, "Dog", {{"name", slot(g, d, "name")}, {"chipId", Value(std::int64_t{-1})}});
            }
            made = b.add(dst, "Container", {{"person", Value::ref(np)}, {"dog", Value::ref(nd)}});
        }
        origin_[made] = o.id;
    }
    return std::move(b.out);
}

ObjectGraph ReferenceTask::migrate_back(const ObjectGraph& g) {
    const std::string src = def_.source_metamodel(), dst = def_.target_metamodel();
    const bool forward = def_.direction == Direction::M1M2M1;  // of the round trip

    auto traced = [&](const std::string& id) -> const std::string& {
        auto it = origin_.find(id);
        if (!trace_ || it == origin_.end())
            throw MigrationError(MigrationErrorKind::MissingTrace, def_.label() + " reference back of '" + id + "': no trace");
        return it->second;
    };

    Builder b{*this, ObjectGraph(g.id())};
    for (const auto& o : g.objects()) {
        if (o.cls.metamodel != dst || o.cls.name != def_.subject_class) continue;
        const Value& name = o.get("name");
        if (def_.id == "s1") {
            if (forward) b.add(src, "Person", {{"name", name}});
            else b.add(src, "Person", {{"name", name}, {"age", slot(*trace_, traced(o.id), "age")}});
        } else if (def_.id == "s2") {
            if (forward) b.add(src, "Person", {{"name", name}, {"birthday", Value(minus_years(today_, o.get("age").as_int()))}});
            else b.add(src, "Person", {{"name", name}, {"age", Value(years_between(o.get("birthday").as_date(), today_))}});
        } else if (def_.id == "s3") {
            Value n = forward ? (name.as_string().empty() ? Value(Null{}) : name)
                              : (name.is_null() ? Value(std::string()) : name);
            b.add(src, "Person", {{"name", n}});
        } else {
            const std::string& p = target(g, o.id, "person");
            const std::string& d = target(g, o.id, "dog");
            std::string np, nd;
            if (forward) {
                const std::string& old_dog = target(*trace_, traced(o.id), "dog");
                np = b.add(src, "Person", {{"name", slot(g, p, "name")},
                                           {"birthday", Value(minus_years(today_, slot(g, p, "age").as_int()))}});
                nd = b.add(src, "Dog", {{"name", slot(g, d, "name")}, {"chipId", slot(*trace_, old_dog, "chipId")}});
            } else {
                np = b.add(src, "Person", {{"name", slot(g, p, "name")},
                                           {"age", Value(years_between(slot(g, p, "birthday").as_date(), today_))}});
                nd = b.add(src, "Dog", {{"name", slot(g, d, "name")}, {"owner", Value::ref(np)}});
            }
            b.add(src, "Container", {{"person", Value::ref(np)}, {"dog", Value::ref(nd)}});
        }
    }
    return std::move(b.out);
}

ObjectGraph reference_migrate(const ScenarioDef& def, const ObjectGraph& g, Date today) {
    return ReferenceTask(def, today).migrate(g);
}

ObjectGraph reference_roundtrip(const ScenarioDef& def, const ObjectGraph& g, Date today, std::span<const EditOp> edits) {
    ReferenceTask task(def, today);
    ObjectGraph migrated = task.migrate(g);
    for (const auto& e : edits)
        for (auto& o : migrated.objects())
            if (o.cls.metamodel == def.target_metamodel() && o.cls.name == e.class_name) o.set(e.field, e.value);
    return task.migrate_back(migrated);
}

}  // namespace rtm
