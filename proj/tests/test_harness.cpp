#include <doctest.h>

#include <sstream>

#include "rtm/bench.hpp"
#include "rtm/harness.hpp"
#include "rtm/reference.hpp"
#include "support.hpp"

using namespace rtm;
using namespace rtm::testing;

namespace {

ObjectGraph person(const std::string& mm, const std::string& slots) {
    return parse_instance("instance g { obj p : " + mm + ".Person { " + slots + " } }");
}

MigrationErrorKind error_kind(const std::function<void()>& f) {
    try {
        f();
    } catch (const MigrationError& e) {
        return e.kind();
    }
    FAIL("no MigrationError");
    return MigrationErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("migrate examples") {
    LoadedScenario s1 = load("s1", Direction::M1M2M1, false);
    ScenarioTask t1(s1);
    ObjectGraph out = t1.migrate(person("M1", "name = \"Hugo\""));
    CHECK(graph_equal(out, person("M2", "name = \"Hugo\", age = -1")));
    CHECK_FALSE(t1.trace());

    LoadedScenario s4 = load("s4", Direction::M1M2M1, false);
    ScenarioTask t4(s4);
    ObjectGraph in = parse_instance(R"(instance g {
        obj c : M1.Container { person -> p, dog -> d }
        obj p : M1.Person { name = "A", birthday = 1990-01-01 }
        obj d : M1.Dog { name = "Rex", chipId = 7 }
    })");
    ObjectGraph want = parse_instance(R"(instance g {
        obj c : M2.Container { person -> p, dog -> d }
        obj p : M2.Person { name = "A", age = 30 }
        obj d : M2.Dog { name = "Rex", owner -> p }
    })");
    ObjectGraph got = t4.migrate(in);
    CHECK(graph_equal(got, want));
    CHECK(graph_equal(got, reference_migrate(s4.def, in)));
    REQUIRE(t4.trace());
    CHECK(graph_equal(*t4.trace(), in));

    ObjectGraph empty_out = t4.migrate(ObjectGraph("e"));
    CHECK(empty_out.empty());
    REQUIRE(t4.trace());
    CHECK(t4.trace()->empty());
}

TEST_CASE("migrate back examples") {
    LoadedScenario s = load("s1", Direction::M2M1M2, false);
    ScenarioTask t(s);
    ObjectGraph migrated = t.migrate(person("M2", "name = \"X\", age = 42"));
    CHECK(graph_equal(t.migrate_back(migrated), person("M2", "name = \"X\", age = 42")));

    ObjectGraph edited = migrated;
    edited.objects()[0].set("name", Value("Y"));
    CHECK(graph_equal(t.migrate_back(edited), person("M2", "name = \"Y\", age = 42")));

    ScenarioTask fresh(s);
    CHECK(error_kind([&] { fresh.migrate_back(person("M1", "name = \"X\"")); }) == MigrationErrorKind::MissingTrace);
    CHECK_THROWS_AS(ReferenceTask(s.def).migrate_back(person("M1", "name = \"X\"")), MigrationError);
}

TEST_CASE("ambiguous trace candidates are an error") {
    // Variant of s1/m2m1m2 where persons may reference a friend: the trace
    // closure of a person with a friend holds two M2 persons.
    LoadedScenario s = load("s1", Direction::M2M1M2, false);
    MetamodelSet mms;
    mms.add(parse_metamodel("metamodel M1 { class Person { name: string } }"));
    mms.add(parse_metamodel("metamodel M2 { class Person { name: string, age: int, friend: ref Person? } }"));
    s.metamodels = mms;
    REQUIRE(validate_module(*s.module, s.metamodels).ok());

    ScenarioTask alone(s);
    ObjectGraph single = parse_instance("instance g { obj p : M2.Person { name = \"A\", age = 1 } }");
    CHECK(roundtrip(alone, single).identical);

    ScenarioTask t(s);
    ObjectGraph friends = parse_instance(R"(instance g {
        obj p : M2.Person { name = "A", age = 1, friend -> q }
        obj q : M2.Person { name = "B", age = 2 }
    })");
    ObjectGraph migrated = t.migrate(friends);
    CHECK(error_kind([&] { t.migrate_back(migrated); }) == MigrationErrorKind::AmbiguousTrace);
}

TEST_CASE("invalid inputs") {
    LoadedScenario s = load("s3", Direction::M2M1M2, false);
    ScenarioTask t(s);
    CHECK(error_kind([&] { t.migrate(person("M2", "name = null")); }) == MigrationErrorKind::InvalidInput);
    CHECK(error_kind([&] { t.migrate(person("M1", "name = \"x\"")); }) == MigrationErrorKind::InvalidInput);
    CHECK(error_kind([&] { t.migrate_back(person("M2", "name = \"x\"")); }) == MigrationErrorKind::InvalidInput);
}

TEST_CASE("rule failures carry scenario context") {
    LoadedScenario s = load("s2", Direction::M1M2M1, false);
    ScenarioTask t(s);
    try {
        t.migrate(person("M1", "name = \"late\", birthday = 2030-05-05"));
        FAIL("expected MigrationError");
    } catch (const MigrationError& e) {
        CHECK(e.kind() == MigrationErrorKind::RuleFailure);
        CHECK(std::string(e.what()).find("s2/m1m2m1") != std::string::npos);
    }
}

TEST_CASE("roundtrip examples") {
    {
        LoadedScenario s = load("s3", Direction::M2M1M2, false);
        ScenarioTask t(s);
        CHECK(roundtrip(t, person("M2", "name = \"\"")).identical);
    }
    {
        LoadedScenario s = load("s2", Direction::M1M2M1, false);
        ScenarioTask t(s);
        CHECK(roundtrip(t, person("M1", "name = \"H\", birthday = 1990-01-01")).identical);
        CHECK_FALSE(roundtrip(t, person("M1", "name = \"H\", birthday = 1990-06-15")).identical);
    }
    {
        LoadedScenario s = load("s1", Direction::M1M2M1, false);
        ScenarioTask t(s);
        std::vector<EditOp> edits = {parse_edit("Person.name=\"Z\"")};
        RoundTripResult r = roundtrip(t, person("M1", "name = \"Hugo\""), edits);
        CHECK(graph_equal(r.result, person("M1", "name = \"Z\"")));
        CHECK(r.identical);
        CHECK_FALSE(r.identical_to_input);
    }
}

TEST_CASE("edits") {
    EditOp e = parse_edit("Person.age=-3");
    CHECK(e.class_name == "Person");
    CHECK(e.field == "age");
    CHECK(e.value == Value(std::int64_t{-3}));
    CHECK(parse_edit("Dog.name = \"Ünï\"").value == Value("Ünï"));
    CHECK_THROWS_AS(parse_edit("Person"), SyntaxError);
    CHECK_THROWS_AS(parse_edit("Person.name=1 2"), SyntaxError);

    LoadedScenario s = load("s1", Direction::M1M2M1, false);
    ScenarioTask t(s);
    auto bad = [&](const char* text) {
        std::vector<EditOp> edits = {parse_edit(text)};
        return error_kind([&] { roundtrip(t, person("M1", "name = \"A\""), edits); });
    };
    CHECK(bad("Person.name=1") == MigrationErrorKind::InvalidEdit);
    CHECK(bad("Person.tail=1") == MigrationErrorKind::InvalidEdit);
    CHECK(bad("Cat.name=\"x\"") == MigrationErrorKind::InvalidEdit);
    CHECK(bad("Person.name=null") == MigrationErrorKind::InvalidEdit);
}

TEST_CASE("every fixture round trips and matches the reference") {
    for (const auto& def : corpus_schemas()) {
        LoadedScenario s = load_scenario(default_corpus_dir(), def);
        for (const auto& f : s.fixtures) {
            CAPTURE(def.label() + "/" + f.name);
            ScenarioTask t(s);
            RoundTripResult r = roundtrip(t, f.input);
            CHECK(r.identical);
            CHECK(r.identical_to_input);
            CHECK(graph_equal(r.migrated, f.expected_migrated));
            CHECK(graph_equal(r.result, f.expected_roundtrip));
            CHECK(validate_instance(r.migrated, s.metamodels).ok());
            CHECK(validate_instance(r.result, s.metamodels).ok());
            CHECK(graph_equal(r.migrated, reference_migrate(def, f.input)));
            CHECK(graph_equal(r.result, reference_roundtrip(def, f.input)));
        }
    }
}

TEST_CASE("stability: migrate after migrateBack is the identity on s2 and s3 targets") {
    for (const char* id : {"s2", "s3"})
        for (Direction d : {Direction::M1M2M1, Direction::M2M1M2}) {
            LoadedScenario s = load(id, d);
            for (const auto& f : s.fixtures) {
                CAPTURE(s.def.label() + "/" + f.name);
                ScenarioTask t(s);
                ObjectGraph y = t.migrate(f.input);
                ObjectGraph again = t.migrate(t.migrate_back(y));
                CHECK(graph_equal(again, y));
            }
        }
}

TEST_CASE("stability: migrate, back, migrate equals migrate on random inputs") {
    Rng rng(31);
    for (const auto& def : corpus_schemas()) {
        LoadedScenario s = load_scenario(default_corpus_dir(), def, false);
        for (int i = 0; i < 25; ++i) {
            ObjectGraph x = random_source(rng, def, uniform(rng, 1, 4));
            ScenarioTask t(s);
            ObjectGraph y = t.migrate(x);
            ObjectGraph x2 = t.migrate_back(y);
            CAPTURE(def.label());
            CHECK(graph_equal(t.migrate(x2), y));
        }
    }
}

TEST_CASE("engine agrees with the reference on random instances") {
    Rng rng(37);
    for (const auto& def : corpus_schemas()) {
        LoadedScenario s = load_scenario(default_corpus_dir(), def, false);
        for (int i = 0; i < 100; ++i) {
            ObjectGraph x = random_source(rng, def, uniform(rng, 1, 3));
            CAPTURE(def.label());
            ScenarioTask t(s);
            ReferenceTask ref(def);
            ObjectGraph y = t.migrate(x);
            ObjectGraph ry = ref.migrate(x);
            CHECK(graph_equal(y, ry));
            CHECK(graph_equal(t.migrate_back(y), ref.migrate_back(ry)));
        }
    }
}

TEST_CASE("workload and bench") {
    for (const auto& def : corpus_schemas()) {
        LoadedScenario s = load_scenario(default_corpus_dir(), def, false);
        ObjectGraph w = make_workload(def, 12, kToday);
        CAPTURE(def.label());
        CHECK(validate_instance(w, s.metamodels).ok());
        CHECK(w.size() == (def.id == "s4" ? 36u : 12u));
        CHECK(graph_equal(w, make_workload(def, 12, kToday)));
    }
    const ScenarioDef& s4 = find_scenario("s4", Direction::M1M2M1);
    ObjectGraph w = make_workload(s4, 100, kToday);
    CHECK(w.find("p81")->get("birthday") == Value(Date{2019, 1, 1}));
    CHECK(w.find("d81")->get("chipId") == Value(std::int64_t{81}));

    LoadedScenario s = load("s4", Direction::M1M2M1, false);
    BenchResult r = run_bench(s, 20, 3, kToday);
    CHECK(r.outputs_agree);
    REQUIRE(r.records.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.records[i].repeat == i);
        CHECK(r.records[i].n == 20);
        CHECK(r.records[i].engine_ms >= 0);
        CHECK(r.records[i].reference_ms >= 0);
    }
    std::ostringstream csv;
    write_bench_csv(csv, r.records);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "scenario,direction,n,repeat,engine_ms,reference_ms,ratio");
    int rows = 0;
    while (std::getline(lines, line)) {
        CHECK(line.rfind("s4,m1m2m1,20,", 0) == 0);
        CHECK(std::count(line.begin(), line.end(), ',') == 6);
        ++rows;
    }
    CHECK(rows == 3);
    CHECK(median_ratio({{"s", "d", 1, 0, 3, 1, 3}, {"s", "d", 1, 1, 1, 1, 1}, {"s", "d", 1, 2, 2, 1, 2}}) == 2);
}
