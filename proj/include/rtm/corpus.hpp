#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtm/metamodel.hpp"
#include "rtm/object_graph.hpp"
#include "rtm/rule_module.hpp"

namespace rtm {

enum class Direction { M1M2M1, M2M1M2 };
std::string_view direction_name(Direction d);  // "m1m2m1" / "m2m1m2"
std::optional<Direction> parse_direction(std::string_view s);

enum class TracePolicy { None, SourceCopy };

/// One scenario/direction configuration: which metamodel version the
/// instances start from, which invocables migrate and migrate back, and
/// whether back-migration needs a copy of the source instance.
struct ScenarioDef {
    std::string id;  // s1..s4
    Direction direction;
    std::string subject_class;  // top-level class migrated per call
    std::string migrate;
    std::string migrate_back;
    TracePolicy trace = TracePolicy::None;

    std::string source_metamodel() const { return direction == Direction::M1M2M1 ? "M1" : "M2"; }
    std::string target_metamodel() const { return direction == Direction::M1M2M1 ? "M2" : "M1"; }
    std::filesystem::path relative_dir() const { return std::filesystem::path(id) / std::string(direction_name(direction)); }
    std::string label() const { return id + "/" + std::string(direction_name(direction)); }
};

/// The eight configurations (four scenarios, two round-trip directions).
const std::vector<ScenarioDef>& corpus_schemas();
/// Throws std::invalid_argument for an unknown pair.
const ScenarioDef& find_scenario(std::string_view id, Direction d);

struct Fixture {
    std::string name;
    ObjectGraph input;
    ObjectGraph expected_migrated;
    ObjectGraph expected_roundtrip;
};

struct LoadedScenario {
    ScenarioDef def;
    std::filesystem::path dir;
    MetamodelSet metamodels;
    std::shared_ptr<const LoadedModule> module;
    std::vector<Fixture> fixtures;  // sorted by name
};

/// Loads <root>/<sN>/<direction>/{*.mm, rules.rules, fixtures/*.im,
/// expected/<name>.migrated.im, expected/<name>.roundtrip.im}.
LoadedScenario load_scenario(const std::filesystem::path& corpus_root, const ScenarioDef& def,
                             bool with_fixtures = true);

/// $RTM_CORPUS if set, else the corpus directory of the source tree.
std::filesystem::path default_corpus_dir();

}  // namespace rtm
