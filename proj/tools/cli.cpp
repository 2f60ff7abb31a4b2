#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

#include "rtm/bench.hpp"
#include "rtm/corpus.hpp"
#include "rtm/engine.hpp"
#include "rtm/harness.hpp"
#include "rtm/text_format.hpp"

namespace rtm {

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Date parse_today(const std::string& s) {
    auto d = parse_date(s);
    if (!d) throw UsageError("invalid --today '" + s + "', expected YYYY-MM-DD");
    return *d;
}

Direction parse_dir(const std::string& s) {
    auto d = parse_direction(s);
    if (!d) throw UsageError("invalid --direction '" + s + "', expected m1m2m1 or m2m1m2");
    return *d;
}

MetamodelSet load_metamodels(const std::vector<std::string>& files) {
    MetamodelSet mms;
    for (const auto& f : files) mms.add(load_metamodel(f));
    for (const auto& mm : mms.all()) {
        auto report = validate_metamodel(mm, mms);
        if (!report.ok()) throw UsageError("metamodel " + mm.name + ":\n" + report.to_string());
    }
    return mms;
}

std::vector<std::string> sibling_metamodels(const fs::path& module) {
    std::vector<std::string> out;
    fs::path dir = module.has_parent_path() ? module.parent_path() : fs::path(".");
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".mm") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

struct MigrateOpts {
    std::string module, input, invocable, output, today = "2020-01-01";
    std::vector<std::string> metamodels, binds;
};

int cmd_migrate(const MigrateOpts& o, std::ostream& out, std::ostream& err) {
    MetamodelSet mms = load_metamodels(o.metamodels);
    auto module = load_module(o.module);
    if (auto report = validate_module(*module, mms); !report.ok()) {
        err << o.module << ": invalid module\n" << report.to_string();
        return kUsage;
    }
    auto inv = module->lookup(o.invocable);
    if (!inv) throw UsageError("no rule or unit '" + o.invocable + "' in " + o.module);
    ObjectGraph g = load_instance(o.input);
    if (auto report = validate_instance(g, mms); !report.ok()) {
        err << o.input << ": invalid instance\n" << report.to_string();
        return kUsage;
    }
    Bindings args;
    for (const auto& b : o.binds) {
        auto eq = b.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == b.size())
            throw UsageError("invalid --bind '" + b + "', expected PARAM=OBJID");
        args[b.substr(0, eq)] = Value::ref(b.substr(eq + 1));
    }
    Engine engine(mms, parse_today(o.today));
    ApplicationResult r = engine.invoke(*inv, g, args);
    if (!r.success) {
        err << o.invocable << " failed: " << r.describe() << '\n';
        return kFailed;
    }
    write_file(o.output, "// today " + format_date(engine.today()) + "\n" + print_instance(g, &mms));
    for (const auto& [name, v] : r.env) out << name << " = " << to_literal(v) << '\n';
    return kOk;
}

struct RoundtripOpts {
    std::string scenario, direction, input, today = "2020-01-01", corpus;
    std::vector<std::string> edits;
};

int cmd_roundtrip(const RoundtripOpts& o, std::ostream& out, std::ostream& err) {
    const ScenarioDef& def = find_scenario(o.scenario, parse_dir(o.direction));
    LoadedScenario s = load_scenario(o.corpus.empty() ? default_corpus_dir() : fs::path(o.corpus), def, false);
    std::vector<EditOp> edits;
    for (const auto& e : o.edits) edits.push_back(parse_edit(e));
    ObjectGraph g = load_instance(o.input);
    ScenarioTask task(s, parse_today(o.today));
    RoundTripResult r = roundtrip(task, g, edits);
    out << (r.identical ? "MATCH" : "MISMATCH") << '\n';
    if (!r.identical) err << "round trip result:\n" << print_instance(r.result, &s.metamodels);
    return r.identical ? kOk : kFailed;
}

struct TestOpts {
    std::string corpus, report, today = "2020-01-01";
};

int cmd_test(const TestOpts& o, std::ostream& out, std::ostream& err) {
    fs::path root = o.corpus.empty() ? default_corpus_dir() : fs::path(o.corpus);
    Date today = parse_today(o.today);
    std::size_t passed = 0, total = 0;
    std::ofstream report;
    if (!o.report.empty()) {
        report.open(o.report);
        if (!report) throw UsageError("cannot write '" + o.report + "'");
        report << "scenario,direction,fixture,migrated_ok,roundtrip_ok,passed\n";
    }
    for (const auto& def : corpus_schemas()) {
        LoadedScenario s = load_scenario(root, def, true);
        if (auto v = validate_module(*s.module, s.metamodels); !v.ok()) {
            err << def.label() << ": invalid module\n" << v.to_string();
            total += s.fixtures.size();
            continue;
        }
        for (const auto& f : s.fixtures) {
            ++total;
            bool migrated_ok = false, roundtrip_ok = false;
            std::string why;
            try {
                ScenarioTask task(s, today);
                RoundTripResult r = roundtrip(task, f.input);
                migrated_ok = graph_equal(r.migrated, f.expected_migrated);
                roundtrip_ok = r.identical && graph_equal(r.result, f.expected_roundtrip);
                if (!migrated_ok) why = "migrated graph differs from expected";
                else if (!roundtrip_ok) why = "round trip result differs";
            } catch (const std::exception& e) {
                why = e.what();
            }
            bool ok = migrated_ok && roundtrip_ok;
            if (ok) ++passed;
            else err << "FAIL " << def.label() << "/" << f.name << ": " << why << '\n';
            if (report)
                report << def.id << ',' << direction_name(def.direction) << ',' << f.name << ',' << migrated_ok << ','
                       << roundtrip_ok << ',' << ok << '\n';
        }
    }
    out << "today " << format_date(today) << '\n';
    out << "passed " << passed << " of " << total << '\n';
    return passed == total && total > 0 ? kOk : kFailed;
}

struct BenchOpts {
    std::string scenario, direction, csv, today = "2020-01-01", corpus;
    std::size_t n = 0, repeat = 1;
};

int cmd_bench(const BenchOpts& o, std::ostream& out, std::ostream& err) {
    const ScenarioDef& def = find_scenario(o.scenario, parse_dir(o.direction));
    LoadedScenario s = load_scenario(o.corpus.empty() ? default_corpus_dir() : fs::path(o.corpus), def, false);
    BenchResult r = run_bench(s, o.n, o.repeat, parse_today(o.today));
    std::ofstream csv(o.csv);
    if (!csv) throw UsageError("cannot write '" + o.csv + "'");
    write_bench_csv(csv, r.records);
    double engine = 0, reference = 0;
    for (const auto& rec : r.records) engine += rec.engine_ms, reference += rec.reference_ms;
    out << "today " << format_date(parse_today(o.today)) << '\n';
    out << def.label() << " n=" << o.n << " repeat=" << o.repeat << " engine_ms=" << engine
        << " reference_ms=" << reference << " median_ratio=" << median_ratio(r.records) << '\n';
    if (!r.outputs_agree) {
        err << "engine and reference outputs differ\n";
        return kFailed;
    }
    return kOk;
}

struct ParseOpts {
    std::string module;
    std::vector<std::string> metamodels;
};

int cmd_parse(const ParseOpts& o, std::ostream& out, std::ostream& err) {
    auto module = load_module(o.module);
    std::vector<std::string> files = o.metamodels.empty() ? sibling_metamodels(o.module) : o.metamodels;
    MetamodelSet mms = load_metamodels(files);
    if (auto report = validate_module(*module, mms); !report.ok()) {
        err << o.module << ": " << report.violations.size() << " violation(s)\n" << report.to_string();
        return kUsage;
    }
    out << print_module(module->ast());
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Round-trip model migration engine", "rtm"};
    app.require_subcommand(1);

    MigrateOpts mo;
    auto* migrate = app.add_subcommand("migrate", "Run one rule or unit on an instance");
    migrate->add_option("--module", mo.module)->required();
    migrate->add_option("--metamodel", mo.metamodels)->required();
    migrate->add_option("--input", mo.input)->required();
    migrate->add_option("--invocable", mo.invocable)->required();
    migrate->add_option("--bind", mo.binds);
    migrate->add_option("--today", mo.today);
    migrate->add_option("--output", mo.output)->required();

    RoundtripOpts ro;
    auto* rt = app.add_subcommand("roundtrip", "Migrate, optionally edit, migrate back, compare");
    rt->add_option("--scenario", ro.scenario)->required();
    rt->add_option("--direction", ro.direction)->required();
    rt->add_option("--input", ro.input)->required();
    rt->add_option("--edit", ro.edits);
    rt->add_option("--today", ro.today);
    rt->add_option("--corpus", ro.corpus);

    TestOpts to;
    auto* test = app.add_subcommand("test", "Run every corpus fixture");
    test->add_option("--corpus", to.corpus);
    test->add_option("--report", to.report);
    test->add_option("--today", to.today);

    BenchOpts bo;
    auto* bench = app.add_subcommand("bench", "Time engine against the reference migration");
    bench->add_option("--scenario", bo.scenario)->required();
    bench->add_option("--direction", bo.direction)->required();
    bench->add_option("--n", bo.n)->required()->check(CLI::PositiveNumber);
    bench->add_option("--repeat", bo.repeat)->required()->check(CLI::PositiveNumber);
    bench->add_option("--csv", bo.csv)->required();
    bench->add_option("--today", bo.today);
    bench->add_option("--corpus", bo.corpus);

    ParseOpts po;
    auto* parse = app.add_subcommand("parse", "Validate and pretty-print a rule module");
    parse->add_option("--module", po.module)->required();
    parse->add_option("--metamodel", po.metamodels);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kUsage;
    }

    try {
        if (*migrate) return cmd_migrate(mo, out, err);
        if (*rt) return cmd_roundtrip(ro, out, err);
        if (*test) return cmd_test(to, out, err);
        if (*bench) return cmd_bench(bo, out, err);
        return cmd_parse(po, out, err);
    } catch (const SyntaxError& e) {
        err << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const MigrationError& e) {
        err << e.what() << '\n';
        return e.kind() == MigrationErrorKind::InvalidInput || e.kind() == MigrationErrorKind::InvalidEdit ? kUsage : kFailed;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace rtm
