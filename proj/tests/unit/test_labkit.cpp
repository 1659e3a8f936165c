#include "doctest.h"

#include <set>

#include "afm/error.hpp"
#include "afm/labkit.hpp"
#include "afm/pipeline.hpp"

using namespace afm;

TEST_CASE("generator is seeded and deduplicated") {
    auto a = generate_matrix({6, 40, 3, 9});
    auto b = generate_matrix({6, 40, 3, 9});
    CHECK(write_csv(a.matrix) == write_csv(b.matrix));
    CHECK(write_csv(a.matrix) != write_csv(generate_matrix({6, 40, 3, 10}).matrix));
    CHECK_NOTHROW(a.matrix.validate());
    CHECK(a.effective_rows == a.matrix.row_count());
    CHECK(a.effective_rows <= 40);
    CHECK(a.kinds.size() == 6);
    CHECK(a.effective_d <= 3);
}

TEST_CASE("generated columns respect their kind") {
    auto g = generate_matrix({20, 100, 5, 3});
    for (std::size_t j = 0; j < g.kinds.size(); ++j) {
        auto domain = column_domain(g.matrix, j);
        if (g.kinds[j] == ColumnKind::Attribute) {
            CHECK(domain.size() <= 5);
            for (const auto& v : domain) CHECK(v.as_integer() < 5);
        } else {
            for (const auto& v : domain) CHECK((v == CellValue::text("yes") || v == CellValue::text("no")));
        }
    }
    CHECK_NOTHROW(synthesize(g.matrix, generated_knowledge(g)));
}

TEST_CASE("invalid parameters are refused") {
    CHECK_THROWS_AS(generate_matrix({0, 1, 2, 0}), Error);
    CHECK_THROWS_AS(generate_matrix({1, 0, 2, 0}), Error);
    CHECK_THROWS_AS(generate_matrix({1, 1, 1, 0}), Error);
}

TEST_CASE("line fit recovers an exact line") {
    auto fit = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(fit.slope == doctest::Approx(2));
    CHECK(fit.intercept == doctest::Approx(1));
    CHECK(fit.correlation == doctest::Approx(1));
    CHECK(fit_line({1, 2, 3}, {3, 2, 1}).correlation == doctest::Approx(-1));
}

TEST_CASE("small benchmark reports every run") {
    SweepPlan plan;
    plan.axis = SweepAxis::C;
    plan.values = {20, 40, 80};
    plan.base = {6, 0, 3, 5};
    plan.repetitions = 2;
    plan.warmup = 0;
    auto report = run_benchmark(plan);
    CHECK(report.runs.size() == 6);
    CHECK(report.fit.x.size() == 3);
    CHECK_FALSE(report.fit.sqrt_time);
    for (const auto& r : report.runs) {
        double sum = 0;
        for (auto ms : r.phase_ms) sum += ms;
        CHECK(sum <= r.total_ms + 1e-6);
        CHECK(r.error.empty());
    }
    CHECK(report.fit.correlation >= -1);
    CHECK(report.fit.correlation <= 1);
    auto csv = bench_csv(report);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 7);
    CHECK(bench_plot_data(report).rfind("series,x,y", 0) == 0);
    CHECK(report.timeout_rate(20) == 0.0);
}

TEST_CASE("run seeds differ per point and repetition") {
    std::set<std::uint64_t> seeds;
    for (std::size_t p = 0; p < 5; ++p)
        for (std::size_t r = 0; r < 5; ++r) seeds.insert(run_seed(1, p, r));
    CHECK(seeds.size() == 25);
}
