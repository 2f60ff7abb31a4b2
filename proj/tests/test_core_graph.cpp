#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "support.hpp"

using namespace rtm;
using namespace rtm::testing;

namespace {

Metamodel mm(const char* text) { return parse_metamodel(text); }

MetamodelSet set_of(std::initializer_list<const char*> texts) {
    MetamodelSet s;
    for (auto* t : texts) s.add(parse_metamodel(t));
    return s;
}

// Tries every bijection between same-sized graphs.
bool exhaustive_equal(const ObjectGraph& a, const ObjectGraph& b) {
    if (a.size() != b.size()) return false;
    std::vector<std::size_t> perm(b.size());
    std::iota(perm.begin(), perm.end(), 0);
    auto ao = a.objects();
    auto bo = b.objects();
    do {
        std::map<std::string, std::string> map;
        for (std::size_t i = 0; i < perm.size(); ++i) map[ao[i].id] = bo[perm[i]].id;
        bool ok = true;
        for (std::size_t i = 0; i < perm.size() && ok; ++i) {
            const auto& x = ao[i];
            const auto& y = bo[perm[i]];
            ok = x.cls == y.cls;
            std::set<std::string> fields;
            for (const auto& [k, v] : x.slots) fields.insert(k);
            for (const auto& [k, v] : y.slots) fields.insert(k);
            for (const auto& f : fields) {
                if (!ok) break;
                const Value& xv = x.get(f);
                const Value& yv = y.get(f);
                if (xv.kind() == ValueKind::Ref && yv.kind() == ValueKind::Ref) ok = map.at(xv.as_ref()) == yv.as_ref();
                else ok = xv == yv;
            }
        }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

}  // namespace

TEST_CASE("metamodel validation") {
    SUBCASE("minimal schema is ok") {
        Metamodel m = mm("metamodel M1 { class Person { name: string } }");
        CHECK(validate_metamodel(m, MetamodelSet{}).ok());
    }
    SUBCASE("duplicate class") {
        Metamodel m = mm("metamodel M1 { class Person { name: string } class Person { age: int } }");
        auto r = validate_metamodel(m, MetamodelSet{});
        CHECK(r.has("duplicate class"));
        CHECK(r.to_string().find("Person") != std::string::npos);
    }
    SUBCASE("duplicate field") {
        CHECK(validate_metamodel(mm("metamodel M { class P { a: int, a: string } }"), MetamodelSet{}).has("duplicate field"));
    }
    SUBCASE("unknown ref target") {
        auto r = validate_metamodel(mm("metamodel M1 { class Dog { owner: ref Person } }"), MetamodelSet{});
        CHECK(r.has("unknown ref target"));
    }
    SUBCASE("ref target in another loaded metamodel") {
        MetamodelSet s = set_of({"metamodel A { class X { y: ref B.Y } }", "metamodel B { class Y { v: int } }"});
        CHECK(validate_metamodel(*s.find("A"), s).ok());
    }
}

TEST_CASE("metamodel text round trip") {
    Metamodel m = mm("metamodel M1 { class Container { person: ref Person, dog: ref Dog? } class Person { name: string? ; birthday: date } class Dog { chipId: int, ok: bool } }");
    Metamodel again = parse_metamodel(print_metamodel(m));
    CHECK(print_metamodel(again) == print_metamodel(m));
    REQUIRE(again.find_class("Container"));
    CHECK(again.find_class("Container")->field("dog")->optional);
    CHECK(again.find_class("Container")->field("dog")->target == ClassRef{"M1", "Dog"});
}

TEST_CASE("instance validation") {
    MetamodelSet s3 = set_of({"metamodel M1 { class Person { name: string? } }", "metamodel M2 { class Person { name: string, age: int? } }"});
    SUBCASE("mandatory name null in M2") {
        ObjectGraph g = parse_instance("instance g { obj p : M2.Person { name = null } }");
        CHECK(validate_instance(g, s3).has("mandatory field null"));
    }
    SUBCASE("absent mandatory slot counts as null") {
        CHECK(validate_instance(parse_instance("instance g { obj p : M2.Person }"), s3).has("mandatory field null"));
    }
    SUBCASE("optional name null in M1") {
        CHECK(validate_instance(parse_instance("instance g { obj p : M1.Person { name = null } }"), s3).ok());
    }
    SUBCASE("kind mismatch") {
        auto g = parse_instance("instance g { obj p : M2.Person { name = \"a\", age = \"x\" } }");
        CHECK(validate_instance(g, s3).has("kind mismatch"));
    }
    SUBCASE("unknown class and field") {
        CHECK(validate_instance(parse_instance("instance g { obj p : M2.Cat }"), s3).has("unknown class"));
        CHECK(validate_instance(parse_instance("instance g { obj p : M1.Person { tail = 1 } }"), s3).has("unknown field"));
    }
    SUBCASE("references") {
        MetamodelSet s = set_of({"metamodel M { class A { b: ref B? } class B { } }"});
        CHECK(validate_instance(parse_instance("instance g { obj a : M.A { b -> nowhere } }"), s).has("dangling reference"));
        CHECK(validate_instance(parse_instance("instance g { obj a : M.A { b -> a } }"), s).has("ref target class mismatch"));
        CHECK(validate_instance(parse_instance("instance g { obj a : M.A { b -> x } obj x : M.B }"), s).ok());
    }
}

TEST_CASE("object graph basics") {
    ObjectGraph g;
    g.add("a", {"M", "A"});
    CHECK_THROWS_AS(g.add("a", {"M", "A"}), std::invalid_argument);
    CHECK(g.contains("a"));
    CHECK(g.find("a")->get("missing").is_null());
    g.add("b", {"M", "A"});
    g.add("c", {"M", "A"});
    g.remove_if([](const ObjectNode& o) { return o.id == "b"; });
    REQUIRE(g.size() == 2);
    CHECK(g.objects()[1].id == "c");
    CHECK(g.find("c"));
    CHECK_FALSE(g.find("b"));
}

TEST_CASE("deep copy") {
    SUBCASE("isolation") {
        ObjectGraph g = parse_instance("instance g { obj p1 : M1.Person { name = \"A\" } }");
        ObjectGraph c = deep_copy(g);
        c.find("p1")->set("name", Value("B"));
        CHECK(g.find("p1")->get("name") == Value("A"));
    }
    SUBCASE("empty") { CHECK(deep_copy(ObjectGraph("e")).empty()); }
    SUBCASE("cycle keeps ids") {
        ObjectGraph g = parse_instance("instance g { obj a : M.N { next -> b } obj b : M.N { next -> a } }");
        ObjectGraph c = deep_copy(g);
        CHECK(graph_equal(g, c));
        CHECK(c.find("a")->get("next") == Value::ref("b"));
        CHECK(c.find("b")->get("next") == Value::ref("a"));
        CHECK(std::equal(g.objects().begin(), g.objects().end(), c.objects().begin(), c.objects().end()));
    }
}

TEST_CASE("graph equality examples") {
    auto eq = [](const char* a, const char* b) { return graph_equal(parse_instance(a), parse_instance(b)); };
    CHECK(eq("instance a { obj x : M.Person { name = \"A\" } }", "instance b { obj y : M.Person { name = \"A\" } }"));
    CHECK_FALSE(eq("instance a { obj x : M.Person { name = \"A\" } }", "instance b { obj y : M.Person { name = \"B\" } }"));
    CHECK_FALSE(eq("instance a { obj x : M.Person }", "instance b { obj y : N.Person }"));
    CHECK_FALSE(eq("instance a { obj x : M.P }", "instance b { obj x : M.P obj y : M.P }"));
    CHECK(eq("instance a { obj x : M.P { n = null } }", "instance b { obj y : M.P }"));

    const char* a = "instance a { obj p : M.P { name = \"A\", pet -> d } obj d : M.D { name = \"R\" } obj q : M.P { name = \"B\" } }";
    const char* b = "instance b { obj q2 : M.P { name = \"B\" } obj d2 : M.D { name = \"R\" } obj p2 : M.P { name = \"A\", pet -> d2 } }";
    const char* c = "instance c { obj q2 : M.P { name = \"B\", pet -> d2 } obj d2 : M.D { name = \"R\" } obj p2 : M.P { name = \"A\" } }";
    CHECK(eq(a, b));
    CHECK(exhaustive_equal(parse_instance(a), parse_instance(b)));
    CHECK_FALSE(eq(a, c));
    CHECK_FALSE(exhaustive_equal(parse_instance(a), parse_instance(c)));
}

TEST_CASE("graph equality structure") {
    // Same attributes everywhere, only the reference shape differs.
    auto ring = parse_instance("instance r { obj a : M.N { n -> b } obj b : M.N { n -> c } obj c : M.N { n -> a } }");
    auto two = parse_instance("instance t { obj a : M.N { n -> b } obj b : M.N { n -> a } obj c : M.N { n -> c } }");
    auto ring2 = parse_instance("instance r { obj z : M.N { n -> x } obj x : M.N { n -> y } obj y : M.N { n -> z } }");
    CHECK_FALSE(graph_equal(ring, two));
    CHECK(graph_equal(ring, ring2));
}

TEST_CASE("graph equality agrees with exhaustive oracle") {
    Rng rng(7);
    int equal_pairs = 0;
    for (int trial = 0; trial < 400; ++trial) {
        ObjectGraph a = random_trial_graph(rng, 5);
        ObjectGraph b;
        if (coin(rng)) {
            // shuffled relabelling of a, possibly perturbed
            std::vector<ObjectNode> nodes(a.objects().begin(), a.objects().end());
            std::shuffle(nodes.begin(), nodes.end(), rng);
            std::map<std::string, std::string> rename;
            for (std::size_t i = 0; i < nodes.size(); ++i) rename[nodes[i].id] = "z" + std::to_string(i);
            for (auto n : nodes) {
                n.id = rename[n.id];
                for (auto& [f, v] : n.slots)
                    if (v.kind() == ValueKind::Ref) v = Value::ref(rename[v.as_ref()]);
                b.add(std::move(n));
            }
            if (!b.empty() && coin(rng, 0.3)) b.objects()[0].set("x", Value(std::int64_t{uniform(rng, 0, 2)}));
        } else {
            b = random_trial_graph(rng, 5);
        }
        bool fast = graph_equal(a, b);
        CHECK(fast == exhaustive_equal(a, b));
        CHECK(fast == graph_equal(b, a));
        CHECK(graph_equal(a, a));
        equal_pairs += fast;
    }
    CHECK(equal_pairs > 50);
}

TEST_CASE("graph equality on corpus fixtures matches oracle") {
    for (const auto& def : corpus_schemas()) {
        LoadedScenario s = load_scenario(default_corpus_dir(), def);
        for (const auto& f : s.fixtures) {
            CHECK(graph_equal(f.input, f.expected_roundtrip) == exhaustive_equal(f.input, f.expected_roundtrip));
            CHECK(graph_equal(f.input, f.expected_migrated) == exhaustive_equal(f.input, f.expected_migrated));
            CHECK(graph_equal(f.input, deep_copy(f.input)));
        }
    }
}

TEST_CASE("validation is preserved by deep copy") {
    Rng rng(11);
    MetamodelSet mms = trial_metamodels();
    for (int i = 0; i < 100; ++i) {
        ObjectGraph g = random_trial_graph(rng);
        if (!g.empty() && coin(rng)) g.objects()[0].set("x", coin(rng) ? Value(Null{}) : Value("oops"));
        CHECK(validate_instance(g, mms).to_string() == validate_instance(deep_copy(g), mms).to_string());
    }
}

TEST_CASE("instance text round trip") {
    MetamodelSet mms = set_of({"metamodel M { class P { name: string?, born: date, n: int, ok: bool, pet: ref P? } }"});
    const char* text = "instance g {\n"
                       "  obj a : M.P { name = \"Zo\\\"ë\\n\", born = 0001-01-01, n = -42, ok = true, pet -> b }\n"
                       "  obj b : M.P { name = null, born = 9999-12-31, n = 0, ok = false, pet = null }\n"
                       "}\n";
    ObjectGraph g = parse_instance(text);
    CHECK(validate_instance(g, mms).ok());
    CHECK(print_instance(g, &mms) == text);
    ObjectGraph again = parse_instance(print_instance(g));
    CHECK(std::equal(g.objects().begin(), g.objects().end(), again.objects().begin(), again.objects().end()));
}

TEST_CASE("reference closure") {
    auto g = parse_instance("instance g { obj c : M.C { p -> p, d -> d } obj p : M.P obj d : M.D { o -> p } obj x : M.P }");
    // slots are visited in field-name order
    CHECK(reference_closure(g, "c") == std::vector<std::string>{"c", "d", "p"});
    CHECK(reference_closure(g, "d") == std::vector<std::string>{"d", "p"});
    CHECK(reference_closure(g, "x") == std::vector<std::string>{"x"});
}

TEST_CASE("instance syntax errors carry positions") {
    try {
        parse_instance("instance g {\n  obj a : M.P { name = }\n}");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.loc().line == 2);
        CHECK(std::string(e.what()).find("2:") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_instance("instance g { obj a : M.P { d = 2020-02-30 } }"), SyntaxError);
}
