#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "rtm/diagnostics.hpp"
#include "rtm/value.hpp"

namespace rtm {

/// Qualified class name, `Metamodel.Class`.
struct ClassRef {
    std::string metamodel;
    std::string name;

    std::string str() const { return metamodel + "." + name; }
    friend auto operator<=>(const ClassRef&, const ClassRef&) = default;
};

enum class FieldKind { String, Int, Bool, Date, Ref };

std::string_view field_kind_name(FieldKind k);
ValueKind value_kind_of(FieldKind k);

struct FieldDef {
    std::string name;
    FieldKind kind = FieldKind::String;
    ClassRef target;  // only for FieldKind::Ref
    bool optional = false;

    friend bool operator==(const FieldDef&, const FieldDef&) = default;
};

struct ClassDef {
    std::string name;
    std::vector<FieldDef> fields;

    const FieldDef* field(std::string_view n) const;
    friend bool operator==(const ClassDef&, const ClassDef&) = default;
};

struct Metamodel {
    std::string name;
    std::vector<ClassDef> classes;

    const ClassDef* find_class(std::string_view n) const;
    friend bool operator==(const Metamodel&, const Metamodel&) = default;
};

/// The metamodels visible to a workspace. A graph may hold objects of
/// classes from several of them at once.
class MetamodelSet {
public:
    MetamodelSet() = default;
    explicit MetamodelSet(std::vector<Metamodel> mms) : mms_(std::move(mms)) {}

    void add(Metamodel mm) { mms_.push_back(std::move(mm)); }
    const Metamodel* find(std::string_view name) const;
    const ClassDef* find_class(const ClassRef& c) const;
    const std::vector<Metamodel>& all() const { return mms_; }

private:
    std::vector<Metamodel> mms_;
};

/// Checks name uniqueness and that every ref target exists in `mm` or in
/// one of `others`.
ValidationReport validate_metamodel(const Metamodel& mm, const MetamodelSet& others = {});

}  // namespace rtm
