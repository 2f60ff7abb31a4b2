#include "rtm/harness.hpp"

#include <set>

#include "rtm/text_format.hpp"

namespace rtm {

EditOp parse_edit(std::string_view text) {
    TokenStream ts(tokenize(text));
    EditOp op;
    op.class_name = ts.expect_name("class name").text;
    ts.expect(".");
    op.field = ts.expect_name("field name").text;
    ts.expect("=");
    op.value = parse_literal(ts);
    if (!ts.at_end()) ts.fail("unexpected " + ts.peek().describe(), {"end of input"});
    return op;
}

void apply_edits(ObjectGraph& g, std::span<const EditOp> edits, const MetamodelSet& mms, const std::string& mm,
                 bool strict) {
    for (const auto& e : edits) {
        const ClassDef* cls = mms.find_class({mm, e.class_name});
        const FieldDef* f = cls ? cls->field(e.field) : nullptr;
        std::string where = mm + "." + e.class_name + "." + e.field;
        bool ok = f && f->kind != FieldKind::Ref &&
                  (e.value.is_null() ? f->optional : e.value.kind() == value_kind_of(f->kind));
        if (!ok) {
            if (strict) throw MigrationError(MigrationErrorKind::InvalidEdit, "edit " + where + " = " + to_literal(e.value) + " does not fit the metamodel");
            continue;
        }
        for (auto& obj : g.objects())
            if (obj.cls.metamodel == mm && obj.cls.name == e.class_name) obj.set(e.field, e.value);
    }
}

ScenarioTask::ScenarioTask(const LoadedScenario& scenario, Date today)
    : scenario_(&scenario), engine_(scenario.metamodels, today) {}

ScenarioTask::Signature ScenarioTask::signature(const std::string& invocable, const std::string& subject_mm,
                                                const std::string& result_mm) const {
    auto inv = scenario_->module->lookup(invocable);
    if (!inv)
        throw MigrationError(MigrationErrorKind::Unbindable, scenario_->def.label() + ": no invocable '" + invocable + "'");
    Signature sig{*inv, {}, {}, {}};
    ClassRef subject{subject_mm, scenario_->def.subject_class};
    for (const auto& p : inv->params()) {
        if (p.direction == ParamDirection::In) {
            if (!p.type.is_object)
                throw MigrationError(MigrationErrorKind::Unbindable,
                                     invocable + ": value in-param '" + p.name + "' cannot be supplied by the harness");
            if (sig.subject_param.empty() && p.type.cls == subject) sig.subject_param = p.name;
            else sig.trace_params.push_back(&p);
        } else if (p.direction == ParamDirection::Out && p.type.is_object && sig.result_param.empty() &&
                   p.type.cls.metamodel == result_mm) {
            sig.result_param = p.name;
        }
    }
    if (sig.subject_param.empty())
        throw MigrationError(MigrationErrorKind::Unbindable, invocable + ": no in-param of class " + subject.str());
    if (sig.result_param.empty())
        throw MigrationError(MigrationErrorKind::Unbindable, invocable + ": no out-param of metamodel " + result_mm);
    return sig;
}

void ScenarioTask::check_conforms(const ObjectGraph& g, const std::string& mm, const char* what) const {
    for (const auto& obj : g.objects())
        if (obj.cls.metamodel != mm)
            throw MigrationError(MigrationErrorKind::InvalidInput, std::string(what) + ": object '" + obj.id + "' is " +
                                                                       obj.cls.str() + ", expected metamodel " + mm);
    auto report = validate_instance(g, scenario_->metamodels);
    if (!report.ok()) throw MigrationError(MigrationErrorKind::InvalidInput, std::string(what) + ":\n" + report.to_string());
}

std::vector<std::string> ScenarioTask::subjects(const ObjectGraph& g, const std::string& mm) const {
    std::vector<std::string> out;
    for (const auto& obj : g.objects())
        if (obj.cls.metamodel == mm && obj.cls.name == scenario_->def.subject_class) out.push_back(obj.id);
    return out;
}

ObjectGraph ScenarioTask::migrate(const ObjectGraph& g) {
    const ScenarioDef& def = scenario_->def;
    const std::string source = def.source_metamodel(), target = def.target_metamodel();
    check_conforms(g, source, "migrate input");
    trace_.reset();
    origin_.clear();
    if (def.trace == TracePolicy::SourceCopy) trace_ = deep_copy(g);

    Signature sig = signature(def.migrate, source, target);
    if (!sig.trace_params.empty())
        throw MigrationError(MigrationErrorKind::MissingTrace,
                             def.migrate + ": in-param '" + sig.trace_params.front()->name + "' has no source");

    ObjectGraph work = g;
    for (const auto& id : subjects(g, source)) {
        ApplicationResult r = engine_.invoke(sig.inv, work, {{sig.subject_param, Value::ref(id)}});
        if (!r.success)
            throw MigrationError(MigrationErrorKind::RuleFailure, def.label() + " migrate of '" + id + "': " + r.describe());
        origin_[r.env.at(sig.result_param).as_ref()] = id;
    }
    ObjectGraph out(g.id());
    for (const auto& obj : work.objects())
        if (obj.cls.metamodel == target) out.add(obj);
    return out;
}

ObjectGraph ScenarioTask::migrate_back(const ObjectGraph& g) {
    const ScenarioDef& def = scenario_->def;
    const std::string source = def.source_metamodel(), target = def.target_metamodel();
    check_conforms(g, target, "migrateBack input");
    Signature sig = signature(def.migrate_back, target, source);

    ObjectGraph work = g;
    std::set<std::string> imported;
    for (const auto& id : subjects(g, target)) {
        Bindings args{{sig.subject_param, Value::ref(id)}};
        std::map<std::string, std::string> renamed;  // trace id -> workspace id
        for (const Param* p : sig.trace_params) {
            auto origin = origin_.find(id);
            if (!trace_ || origin == origin_.end())
                throw MigrationError(MigrationErrorKind::MissingTrace,
                                     def.label() + " migrateBack of '" + id + "': no trace for in-param '" + p->name + "'");
            std::vector<std::string> closure = reference_closure(*trace_, origin->second);
            std::vector<std::string> candidates;
            for (const auto& t : closure)
                if (trace_->find(t)->cls == p->type.cls) candidates.push_back(t);
            if (candidates.empty())
                throw MigrationError(MigrationErrorKind::MissingTrace,
                                     def.label() + " migrateBack of '" + id + "': trace has no " + p->type.cls.str());
            if (candidates.size() > 1)
                throw MigrationError(MigrationErrorKind::AmbiguousTrace,
                                     def.label() + " migrateBack of '" + id + "': " + std::to_string(candidates.size()) +
                                         " trace candidates of " + p->type.cls.str());
            if (renamed.empty()) {
                for (const auto& t : closure) {
                    std::string fresh = t + "#trace";
                    for (int k = 2; work.contains(fresh); ++k) fresh = t + "#trace" + std::to_string(k);
                    renamed[t] = fresh;
                }
                for (const auto& t : closure) {
                    ObjectNode copy = *trace_->find(t);
                    copy.id = renamed[t];
                    for (auto& [field, v] : copy.slots)
                        if (v.kind() == ValueKind::Ref) v = Value::ref(renamed.at(v.as_ref()));
                    imported.insert(copy.id);
                    work.add(std::move(copy));
                }
            }
            args[p->name] = Value::ref(renamed.at(candidates.front()));
        }
        ApplicationResult r = engine_.invoke(sig.inv, work, args);
        if (!r.success)
            throw MigrationError(MigrationErrorKind::RuleFailure, def.label() + " migrateBack of '" + id + "': " + r.describe());
    }
    ObjectGraph out(g.id());
    for (const auto& obj : work.objects())
        if (obj.cls.metamodel == source && !imported.count(obj.id)) out.add(obj);
    return out;
}

RoundTripResult roundtrip(ScenarioTask& task, const ObjectGraph& g, std::span<const EditOp> edits) {
    const ScenarioDef& def = task.scenario().def;
    const MetamodelSet& mms = task.scenario().metamodels;
    RoundTripResult r{task.migrate(g), ObjectGraph(g.id())};
    ObjectGraph edited = r.migrated;
    apply_edits(edited, edits, mms, def.target_metamodel(), true);
    r.result = task.migrate_back(edited);
    ObjectGraph expected = g;
    apply_edits(expected, edits, mms, def.source_metamodel(), false);
    r.identical = graph_equal(r.result, expected);
    r.identical_to_input = graph_equal(r.result, g);
    return r;
}

}  // namespace rtm
