#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rtm/corpus.hpp"

namespace rtm {

/// Deterministic synthetic source instance with `n` subjects.
/// s4: containers c<i> holding person p<i> (birthday TODAY minus i%80
/// years, or age i%80) and dog d<i> (chipId i, or owner p<i>).
/// s1-s3: persons p<i>; s3 leaves every third name null (M1) or "" (M2).
ObjectGraph make_workload(const ScenarioDef& def, std::size_t n, Date today);

struct BenchRecord {
    std::string scenario;
    std::string direction;
    std::size_t n = 0;
    std::size_t repeat = 0;
    double engine_ms = 0;
    double reference_ms = 0;
    double ratio = 0;  // engine_ms / reference_ms; 0 when reference_ms is 0
};

struct BenchResult {
    std::vector<BenchRecord> records;
    bool outputs_agree = true;  // engine and reference results graph_equal on every repeat
};

/// Times migrate + migrateBack over the whole workload for the engine and
/// the reference. Workload generation and graph copies stay outside the
/// timed region.
BenchResult run_bench(const LoadedScenario& scenario, std::size_t n, std::size_t repeats, Date today);

inline constexpr const char* kBenchCsvHeader = "scenario,direction,n,repeat,engine_ms,reference_ms,ratio";
void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records);

/// Median of per-repeat ratios.
double median_ratio(const std::vector<BenchRecord>& records);

}  // namespace rtm
