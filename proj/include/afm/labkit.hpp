#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "afm/knowledge.hpp"
#include "afm/matrix.hpp"

namespace afm {

struct GeneratorParams {
    std::size_t v = 5;
    std::size_t c = 8;
    std::size_t d = 3;
    std::uint64_t seed = 0;

    /// Throws Error{"labkit","InvalidParams"} unless v >= 1, c >= 1, d >= 2.
    void validate() const;
};

struct GeneratedMatrix {
    ConfigurationMatrix matrix;
    /// Kind drawn for each column: BooleanFeature or Attribute.
    std::vector<ColumnKind> kinds;
    std::size_t effective_rows = 0;
    /// Largest number of distinct values observed in an attribute-like column
    /// (2 when every column is feature-like).
    std::size_t effective_d = 0;
};

/// Each column is feature-like ("yes"/"no") or attribute-like (integers in
/// [0, d)) with equal probability; cells are drawn uniformly. Duplicate rows
/// are dropped, so the effective row count can fall short of c.
GeneratedMatrix generate_matrix(const GeneratorParams& p);

/// Domain knowledge classifying each column as it was generated.
DomainKnowledge generated_knowledge(const GeneratedMatrix& g);

enum class SweepAxis { V, C, D };
std::string to_string(SweepAxis axis);

struct SweepPlan {
    SweepAxis axis = SweepAxis::C;
    std::vector<std::size_t> values;
    GeneratorParams base;
    std::size_t repetitions = 10;
    /// Untimed runs of the first point before measuring, so allocator and
    /// cache warm-up is not charged to it.
    std::size_t warmup = 1;
    bool or_groups = false;
    std::chrono::milliseconds timeout{10000};
    bool parallel = false;
    unsigned threads = 0;
};

struct BenchRun {
    GeneratorParams params;
    std::size_t repetition = 0;
    std::size_t effective_rows = 0;
    std::size_t effective_d = 0;
    double total_ms = 0;
    std::vector<double> phase_ms;
    bool timed_out = false;
    std::string error;
};

struct TrendFit {
    bool sqrt_time = false;
    double slope = 0;
    double intercept = 0;
    double correlation = 0;
    std::vector<double> x;
    std::vector<double> y;
};

struct BenchReport {
    SweepPlan plan;
    std::vector<BenchRun> runs;
    TrendFit fit;

    double timeout_rate(std::size_t value) const;
};

/// Least-squares line through (x, y) with Pearson correlation.
TrendFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Seed of repetition `rep` at sweep point `point`.
std::uint64_t run_seed(std::uint64_t base, std::size_t point, std::size_t rep);

/// Runs every point of the sweep. Time vs c is fitted linearly; √time vs v
/// and vs the effective d. Points are averaged over successful repetitions.
BenchReport run_benchmark(const SweepPlan& plan);

/// One CSV row per run with parameters, effective stats and phase times.
std::string bench_csv(const BenchReport& report);
/// "series,x,y" rows: measured means and the fitted line.
std::string bench_plot_data(const BenchReport& report);

}  // namespace afm
