#include "rtm/metamodel.hpp"

#include <set>

namespace rtm {

std::string_view field_kind_name(FieldKind k) {
    switch (k) {
        case FieldKind::String: return "string";
        case FieldKind::Int: return "int";
        case FieldKind::Bool: return "bool";
        case FieldKind::Date: return "date";
        case FieldKind::Ref: return "ref";
    }
    return "?";
}

ValueKind value_kind_of(FieldKind k) {
    switch (k) {
        case FieldKind::String: return ValueKind::String;
        case FieldKind::Int: return ValueKind::Int;
        case FieldKind::Bool: return ValueKind::Bool;
        case FieldKind::Date: return ValueKind::Date;
        case FieldKind::Ref: return ValueKind::Ref;
    }
    return ValueKind::Null;
}

const FieldDef* ClassDef::field(std::string_view n) const {
    for (const auto& f : fields)
        if (f.name == n) return &f;
    return nullptr;
}

const ClassDef* Metamodel::find_class(std::string_view n) const {
    for (const auto& c : classes)
        if (c.name == n) return &c;
    return nullptr;
}

const Metamodel* MetamodelSet::find(std::string_view name) const {
    for (const auto& mm : mms_)
        if (mm.name == name) return &mm;
    return nullptr;
}

const ClassDef* MetamodelSet::find_class(const ClassRef& c) const {
    const Metamodel* mm = find(c.metamodel);
    return mm ? mm->find_class(c.name) : nullptr;
}

ValidationReport validate_metamodel(const Metamodel& mm, const MetamodelSet& others) {
    ValidationReport report;
    std::set<std::string> class_names;
    for (const auto& cls : mm.classes) {
        if (!class_names.insert(cls.name).second)
            report.add("duplicate class", mm.name + "." + cls.name);
    }
    for (const auto& cls : mm.classes) {
        std::set<std::string> field_names;
        for (const auto& f : cls.fields) {
            if (!field_names.insert(f.name).second)
                report.add("duplicate field", mm.name + "." + cls.name + "." + f.name);
            if (f.kind != FieldKind::Ref) continue;
            bool found = f.target.metamodel == mm.name ? mm.find_class(f.target.name) != nullptr
                                                       : others.find_class(f.target) != nullptr;
            if (!found)
                report.add("unknown ref target",
                           mm.name + "." + cls.name + "." + f.name + " -> " + f.target.str());
        }
    }
    return report;
}

}  // namespace rtm
