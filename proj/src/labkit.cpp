#include "afm/labkit.hpp"

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "afm/error.hpp"
#include "afm/pipeline.hpp"

namespace afm {

namespace {

struct RowHash {
    std::size_t operator()(const Row& r) const noexcept {
        std::size_t h = 0;
        for (const auto& c : r) h = h * 1000003u ^ c.hash();
        return h;
    }
};

std::size_t& axis_field(GeneratorParams& p, SweepAxis axis) {
    switch (axis) {
        case SweepAxis::V: return p.v;
        case SweepAxis::C: return p.c;
        case SweepAxis::D: return p.d;
    }
    return p.c;
}

std::size_t axis_value(const GeneratorParams& p, SweepAxis axis) {
    GeneratorParams copy = p;
    return axis_field(copy, axis);
}

}  // namespace

void GeneratorParams::validate() const {
    if (v < 1 || c < 1 || d < 2)
        throw Error("labkit", "InvalidParams",
                    "need v >= 1, c >= 1, d >= 2 (got v=" + std::to_string(v) + ", c=" + std::to_string(c) +
                        ", d=" + std::to_string(d) + ")");
}

GeneratedMatrix generate_matrix(const GeneratorParams& p) {
    p.validate();
    std::mt19937_64 rng(p.seed);
    GeneratedMatrix g;
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<std::uint64_t> value(0, p.d - 1);
    for (std::size_t j = 0; j < p.v; ++j) {
        g.matrix.variables.push_back("v" + std::to_string(j));
        g.kinds.push_back(coin(rng) ? ColumnKind::Attribute : ColumnKind::BooleanFeature);
    }
    const auto yes = CellValue::text("yes"), no = CellValue::text("no");
    std::unordered_set<Row, RowHash> seen;
    for (std::size_t i = 0; i < p.c; ++i) {
        Row row;
        row.reserve(p.v);
        for (std::size_t j = 0; j < p.v; ++j)
            row.push_back(g.kinds[j] == ColumnKind::Attribute ? CellValue::integer(value(rng)) : (coin(rng) ? yes : no));
        if (seen.insert(row).second) g.matrix.rows.push_back(std::move(row));
    }
    g.effective_rows = g.matrix.row_count();
    g.effective_d = 2;
    for (std::size_t j = 0; j < p.v; ++j) {
        if (g.kinds[j] != ColumnKind::Attribute) continue;
        std::set<std::uint64_t> distinct;
        for (const auto& row : g.matrix.rows) distinct.insert(row[j].as_integer());
        g.effective_d = std::max(g.effective_d, distinct.size());
    }
    return g;
}

DomainKnowledge generated_knowledge(const GeneratedMatrix& g) {
    DomainKnowledge dk;
    for (std::size_t j = 0; j < g.kinds.size(); ++j) {
        ColumnSpec spec;
        spec.kind = g.kinds[j];
        if (spec.kind == ColumnKind::BooleanFeature) {
            spec.present = {CellValue::text("yes")};
            spec.absent = {CellValue::text("no")};
        }
        dk.columns[g.matrix.variables[j]] = spec;
    }
    return dk;
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::V: return "v";
        case SweepAxis::C: return "c";
        case SweepAxis::D: return "d";
    }
    return "?";
}

double BenchReport::timeout_rate(std::size_t value) const {
    std::size_t total = 0, out = 0;
    for (const auto& r : runs) {
        if (axis_value(r.params, plan.axis) != value) continue;
        ++total;
        out += r.timed_out;
    }
    return total ? double(out) / double(total) : 0.0;
}

TrendFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    TrendFit fit;
    fit.x = x;
    fit.y = y;
    std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return fit;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
    mx /= double(n);
    my /= double(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.correlation = syy == 0 ? 0 : sxy / std::sqrt(sxx * syy);
    return fit;
}

std::uint64_t run_seed(std::uint64_t base, std::size_t point, std::size_t rep) {
    std::seed_seq seq{std::uint32_t(base), std::uint32_t(base >> 32), std::uint32_t(point), std::uint32_t(rep)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (std::uint64_t(out[0]) << 32) | out[1];
}

BenchReport run_benchmark(const SweepPlan& plan) {
    BenchReport report;
    report.plan = plan;
    SynthesisOptions options;
    options.or_groups = plan.or_groups;
    options.or_budget = plan.timeout;
    options.threads = plan.threads;

    if (!plan.values.empty()) {
        for (std::size_t w = 0; w < plan.warmup; ++w) {
            GeneratorParams p = plan.base;
            axis_field(p, plan.axis) = plan.values.front();
            p.seed = run_seed(plan.base.seed, plan.values.size() + w, 0);
            try {
                auto g = generate_matrix(p);
                synthesize(g.matrix, generated_knowledge(g), options);
            } catch (const std::exception&) {
            }
        }
    }

    std::vector<std::vector<BenchRun>> per_point(plan.values.size());
    auto run_point = [&](std::size_t point) {
        for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
            BenchRun run;
            run.params = plan.base;
            axis_field(run.params, plan.axis) = plan.values[point];
            run.params.seed = run_seed(plan.base.seed, point, rep);
            run.repetition = rep;
            try {
                auto g = generate_matrix(run.params);
                run.effective_rows = g.effective_rows;
                run.effective_d = g.effective_d;
                auto dk = generated_knowledge(g);
                auto res = synthesize(g.matrix, dk, options);
                run.total_ms = res.total_ms;
                for (const auto& ph : res.phases) run.phase_ms.push_back(ph.ms);
                run.timed_out = res.model.provenance.or_groups_timed_out;
            } catch (const std::exception& e) {
                run.error = e.what();
            }
            per_point[point].push_back(std::move(run));
        }
    };
    if (plan.parallel) {
        std::vector<std::thread> workers;
        for (std::size_t p = 0; p < plan.values.size(); ++p) workers.emplace_back(run_point, p);
        for (auto& w : workers) w.join();
    } else {
        for (std::size_t p = 0; p < plan.values.size(); ++p) run_point(p);
    }

    std::vector<double> xs, ys;
    bool sqrt_time = plan.axis != SweepAxis::C;
    for (auto& runs : per_point) {
        double x = 0, y = 0;
        std::size_t ok = 0;
        for (const auto& r : runs) {
            if (!r.error.empty() || r.timed_out) continue;
            x += plan.axis == SweepAxis::D ? double(r.effective_d) : double(axis_value(r.params, plan.axis));
            y += r.total_ms;
            ++ok;
        }
        if (ok) {
            xs.push_back(x / double(ok));
            double mean = y / double(ok);
            ys.push_back(sqrt_time ? std::sqrt(mean) : mean);
        }
        for (auto& r : runs) report.runs.push_back(std::move(r));
    }
    report.fit = fit_line(xs, ys);
    report.fit.sqrt_time = sqrt_time;
    return report;
}

std::string bench_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "axis,v,c,d,seed,rep,effective_rows,effective_d,timed_out,error,total_ms";
    for (const auto& ph : phase_names()) os << "," << ph << "_ms";
    os << "\n";
    for (const auto& r : report.runs) {
        os << to_string(report.plan.axis) << "," << r.params.v << "," << r.params.c << "," << r.params.d << ","
           << r.params.seed << "," << r.repetition << "," << r.effective_rows << "," << r.effective_d << ","
           << (r.timed_out ? 1 : 0) << ",";
        if (!r.error.empty()) {
            std::string e = r.error;
            for (auto& ch : e)
                if (ch == '"') ch = '\'';
            os << '"' << e << '"';
        }
        os << "," << r.total_ms;
        for (std::size_t i = 0; i < phase_names().size(); ++i) os << "," << (i < r.phase_ms.size() ? r.phase_ms[i] : 0.0);
        os << "\n";
    }
    return os.str();
}

std::string bench_plot_data(const BenchReport& report) {
    std::ostringstream os;
    const auto& f = report.fit;
    std::string measured = f.sqrt_time ? "sqrt_time_ms" : "time_ms";
    os << "series,x,y\n";
    for (std::size_t i = 0; i < f.x.size(); ++i) os << measured << "," << f.x[i] << "," << f.y[i] << "\n";
    for (double x : f.x) os << "fit," << x << "," << f.slope * x + f.intercept << "\n";
    os << "# slope=" << f.slope << " intercept=" << f.intercept << " r=" << f.correlation << "\n";
    return os.str();
}

}  // namespace afm
