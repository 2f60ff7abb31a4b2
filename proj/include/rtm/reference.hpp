#pragma once

#include <map>
#include <optional>
#include <span>

#include "rtm/corpus.hpp"
#include "rtm/harness.hpp"

namespace rtm {

// Hand-written migrations that walk the objects directly, without rules or
// matching. Correctness oracle for the engine and the benchmark baseline.
// Created ids are "ref#<k>".
class ReferenceTask {
public:
    explicit ReferenceTask(const ScenarioDef& def, Date today = {2020, 1, 1}) : def_(def), today_(today) {}

    ObjectGraph migrate(const ObjectGraph& g);
    ObjectGraph migrate_back(const ObjectGraph& g);

    const ScenarioDef& def() const { return def_; }

private:
    struct Builder;

    ScenarioDef def_;
    Date today_;
    std::size_t counter_ = 0;
    std::optional<ObjectGraph> trace_;
    std::map<std::string, std::string> origin_;
};

ObjectGraph reference_migrate(const ScenarioDef& def, const ObjectGraph& g, Date today = {2020, 1, 1});

/// migrate, edit the migrated graph, migrate back.
ObjectGraph reference_roundtrip(const ScenarioDef& def, const ObjectGraph& g, Date today = {2020, 1, 1},
                                std::span<const EditOp> edits = {});

}  // namespace rtm
