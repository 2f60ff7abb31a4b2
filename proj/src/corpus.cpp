#include "rtm/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "rtm/text_format.hpp"

#ifndef RTM_SOURCE_CORPUS
#define RTM_SOURCE_CORPUS "corpus"
#endif

namespace rtm {

std::string_view direction_name(Direction d) { return d == Direction::M1M2M1 ? "m1m2m1" : "m2m1m2"; }

std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "m1m2m1") return Direction::M1M2M1;
    if (s == "m2m1m2") return Direction::M2M1M2;
    return std::nullopt;
}

const std::vector<ScenarioDef>& corpus_schemas() {
    using D = Direction;
    using T = TracePolicy;
    static const std::vector<ScenarioDef> kDefs = {
        // create/delete field
        {"s1", D::M1M2M1, "Person", "migrate", "migrateBack", T::None},
        {"s1", D::M2M1M2, "Person", "migrate", "migrateBack", T::SourceCopy},
        // rename field; both directions run the same two rules
        {"s2", D::M1M2M1, "Person", "migrate", "migrateBack", T::None},
        {"s2", D::M2M1M2, "Person", "s2_m1m2m1.migrateBack", "s2_m1m2m1.migrate", T::None},
        // optional/mandatory
        {"s3", D::M1M2M1, "Person", "migrate", "migrateBack", T::None},
        {"s3", D::M2M1M2, "Person", "migrate", "migrateBack", T::None},
        // multiple edits
        {"s4", D::M1M2M1, "Container", "migrate", "migrateBack", T::SourceCopy},
        {"s4", D::M2M1M2, "Container", "migrate", "migrateBack", T::None},
    };
    return kDefs;
}

const ScenarioDef& find_scenario(std::string_view id, Direction d) {
    for (const auto& def : corpus_schemas())
        if (def.id == id && def.direction == d) return def;
    throw std::invalid_argument("unknown scenario '" + std::string(id) + "/" + std::string(direction_name(d)) + "'");
}

LoadedScenario load_scenario(const std::filesystem::path& corpus_root, const ScenarioDef& def, bool with_fixtures) {
    namespace fs = std::filesystem;
    LoadedScenario s;
    s.def = def;
    s.dir = corpus_root / def.relative_dir();
    if (!fs::is_directory(s.dir)) throw std::runtime_error("missing scenario directory '" + s.dir.string() + "'");

    std::vector<fs::path> mm_files;
    for (const auto& e : fs::directory_iterator(s.dir))
        if (e.path().extension() == ".mm") mm_files.push_back(e.path());
    std::sort(mm_files.begin(), mm_files.end());
    for (const auto& p : mm_files) s.metamodels.add(load_metamodel(p));
    for (const auto& mm : s.metamodels.all()) {
        auto report = validate_metamodel(mm, s.metamodels);
        if (!report.ok()) throw std::runtime_error("metamodel " + mm.name + " in " + s.dir.string() + ":\n" + report.to_string());
    }
    s.module = load_module(s.dir / "rules.rules");

    if (!with_fixtures) return s;
    std::vector<fs::path> inputs;
    if (fs::is_directory(s.dir / "fixtures"))
        for (const auto& e : fs::directory_iterator(s.dir / "fixtures"))
            if (e.path().extension() == ".im") inputs.push_back(e.path());
    std::sort(inputs.begin(), inputs.end());
    for (const auto& p : inputs) {
        std::string name = p.stem().string();
        s.fixtures.push_back({name, load_instance(p), load_instance(s.dir / "expected" / (name + ".migrated.im")),
                              load_instance(s.dir / "expected" / (name + ".roundtrip.im"))});
    }
    return s;
}

std::filesystem::path default_corpus_dir() {
    if (const char* env = std::getenv("RTM_CORPUS"); env && *env) return env;
    return RTM_SOURCE_CORPUS;
}

}  // namespace rtm
