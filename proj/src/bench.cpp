#include "rtm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>

#include "rtm/expr.hpp"
#include "rtm/harness.hpp"
#include "rtm/reference.hpp"

namespace rtm {

ObjectGraph make_workload(const ScenarioDef& def, std::size_t n, Date today) {
    const std::string mm = def.source_metamodel();
    const bool m1 = mm == "M1";
    ObjectGraph g("bench");
    for (std::size_t i = 0; i < n; ++i) {
        const std::string k = std::to_string(i);
        const auto years = static_cast<std::int64_t>(i % 80);
        std::map<std::string, Value> person{{"name", Value("p" + k)}};
        if (def.id == "s1") {
            if (!m1) person["age"] = Value(years);
        } else if (def.id == "s2" || def.id == "s4") {
            if (m1) person["birthday"] = Value(minus_years(today, years));
            else person["age"] = Value(years);
        } else if (i % 3 == 2) {
            person["name"] = m1 ? Value(Null{}) : Value(std::string());
        }
        if (def.id != "s4") {
            g.add("p" + k, {mm, "Person"}, std::move(person));
            continue;
        }
        g.add("p" + k, {mm, "Person"}, std::move(person));
        if (m1) g.add("d" + k, {mm, "Dog"}, {{"name", Value("d" + k)}, {"chipId", Value(static_cast<std::int64_t>(i))}});
        else g.add("d" + k, {mm, "Dog"}, {{"name", Value("d" + k)}, {"owner", Value::ref("p" + k)}});
        g.add("c" + k, {mm, "Container"}, {{"person", Value::ref("p" + k)}, {"dog", Value::ref("d" + k)}});
    }
    return g;
}

BenchResult run_bench(const LoadedScenario& scenario, std::size_t n, std::size_t repeats, Date today) {
    using Clock = std::chrono::steady_clock;
    auto ms = [](Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };

    BenchResult result;
    const ObjectGraph workload = make_workload(scenario.def, n, today);
    for (std::size_t r = 0; r < repeats; ++r) {
        ObjectGraph input = workload;
        ScenarioTask task(scenario, today);
        auto t0 = Clock::now();
        ObjectGraph migrated = task.migrate(input);
        ObjectGraph back = task.migrate_back(migrated);
        auto t1 = Clock::now();

        ObjectGraph ref_input = workload;
        ReferenceTask ref(scenario.def, today);
        auto t2 = Clock::now();
        ObjectGraph ref_migrated = ref.migrate(ref_input);
        ObjectGraph ref_back = ref.migrate_back(ref_migrated);
        auto t3 = Clock::now();

        if (!graph_equal(migrated, ref_migrated) || !graph_equal(back, ref_back)) result.outputs_agree = false;
        BenchRecord rec{scenario.def.id, std::string(direction_name(scenario.def.direction)), n, r, ms(t1 - t0), ms(t3 - t2), 0};
        if (rec.reference_ms > 0) rec.ratio = rec.engine_ms / rec.reference_ms;
        result.records.push_back(rec);
    }
    return result;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
    os << kBenchCsvHeader << '\n';
    char buf[128];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.2f", r.engine_ms, r.reference_ms, r.ratio);
        os << r.scenario << ',' << r.direction << ',' << r.n << ',' << r.repeat << ',' << buf << '\n';
    }
}

double median_ratio(const std::vector<BenchRecord>& records) {
    if (records.empty()) return 0;
    std::vector<double> v;
    for (const auto& r : records) v.push_back(r.ratio);
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2;
}

}  // namespace rtm
