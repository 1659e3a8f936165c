#include "afm/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "afm/error.hpp"
#include "afm/labkit.hpp"
#include "afm/pipeline.hpp"
#include "afm/semantics.hpp"
#include "afm/serialize.hpp"
#include "afm/server.hpp"

namespace afm {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "FileNotFound", "cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "WriteFailed", "cannot write '" + path + "'");
    out << text;
}

/// "250", "250ms", "10s", "2m"; bare numbers are milliseconds.
std::chrono::milliseconds parse_duration(const std::string& text) {
    std::size_t pos = 0;
    unsigned long long n = 0;
    try {
        n = std::stoull(text, &pos);
    } catch (const std::exception&) {
        throw Error("cli", "BadDuration", "'" + text + "'");
    }
    auto unit = text.substr(pos);
    if (unit.empty() || unit == "ms") return std::chrono::milliseconds(n);
    if (unit == "s") return std::chrono::seconds(n);
    if (unit == "m" || unit == "min") return std::chrono::minutes(n);
    throw Error("cli", "BadDuration", "'" + text + "'");
}

/// "c=500,1000,2000" lists points; "c=100:5000" doubles from 100 up to
/// 5000 (both ends included); "c=100:5000:900" steps linearly.
std::pair<SweepAxis, std::vector<std::size_t>> parse_sweep(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos) throw Error("cli", "BadSweep", "expected axis=values, got '" + text + "'");
    auto axis_name = text.substr(0, eq);
    SweepAxis axis;
    if (axis_name == "v") axis = SweepAxis::V;
    else if (axis_name == "c") axis = SweepAxis::C;
    else if (axis_name == "d") axis = SweepAxis::D;
    else throw Error("cli", "BadSweep", "axis must be v, c or d");
    auto spec = text.substr(eq + 1);
    auto number = [&](const std::string& s) {
        auto v = CellValue::parse_natural(s);
        if (!v || *v == 0) throw Error("cli", "BadSweep", "'" + s + "' is not a positive number");
        return std::size_t(*v);
    };
    std::vector<std::size_t> values;
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() < 2 || parts.size() > 3) throw Error("cli", "BadSweep", "range is lo:hi or lo:hi:step");
        auto lo = number(parts[0]), hi = number(parts[1]);
        if (lo > hi) throw Error("cli", "BadSweep", "empty range");
        if (parts.size() == 3) {
            auto step = number(parts[2]);
            for (auto x = lo; x <= hi; x += step) values.push_back(x);
        } else {
            for (auto x = lo; x < hi; x *= 2) values.push_back(x);
            values.push_back(hi);
        }
    } else {
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ',');) values.push_back(number(p));
    }
    return {axis, values};
}

class TerminalProvider : public DecisionProvider {
public:
    TerminalProvider(std::ostream& out, std::istream& in) : out_(out), in_(in) {}

    std::string decide(const Question& q) override {
        for (;;) {
            out_ << "\n" << to_string(q.kind) << ": " << q.subject << "\n";
            if (!q.context.empty()) {
                out_ << "  values:";
                for (const auto& c : q.context) out_ << " " << c;
                out_ << "\n";
            }
            for (std::size_t i = 0; i < q.candidates.size(); ++i) out_ << "  [" << i + 1 << "] " << q.candidates[i] << "\n";
            if (q.kind == QuestionKind::ConfirmBounds) out_ << "  bounds (comma-separated, empty for none)";
            else if (q.kind == QuestionKind::ChooseRoot) out_ << "  number or a new root name";
            else out_ << "  choice";
            out_ << "> " << std::flush;
            std::string line;
            if (!std::getline(in_, line)) throw Error("cli", "Aborted", "input closed during " + to_string(q.kind));
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (q.kind == QuestionKind::ConfirmBounds) return line;
            if (auto n = CellValue::parse_natural(line); n && *n >= 1 && *n <= q.candidates.size())
                return q.candidates[*n - 1];
            if (q.kind == QuestionKind::ChooseRoot && !line.empty()) return line;
            if (std::find(q.candidates.begin(), q.candidates.end(), line) != q.candidates.end()) return line;
            out_ << "  not a candidate\n";
        }
    }

private:
    std::ostream& out_;
    std::istream& in_;
};

int exit_code_for(const Error& e) {
    if (e.code() == "BudgetExceeded") return kExitBudget;
    return kExitInput;
}

std::string replace_extension(const std::string& path, const std::string& ext) {
    std::filesystem::path p(path);
    p.replace_extension(ext);
    return p.string();
}

std::atomic<SessionServer*> active_server{nullptr};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
    CLI::App app{"Attributed feature model synthesis from configuration matrices", "afmforge"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Synthesize an attributed feature model from a CSV matrix");
    std::string matrix_path, dk_path, out_path, text_path, transcript_path, replay_path;
    std::vector<std::string> identifiers;
    std::vector<std::string> or_groups_arg;
    bool no_phi = false, interactive = false, no_interactive = false, dedup = false;
    unsigned threads = 0;
    synth->add_option("matrix", matrix_path, "configuration matrix (CSV)")->required();
    synth->add_option("--dk", dk_path, "domain knowledge (JSON)");
    synth->add_option("-o,--output", out_path, "AFM JSON output (text rendering goes to stdout otherwise)");
    synth->add_option("--text", text_path, "text rendering output (default: the -o path with .txt)");
    synth->add_flag("--no-phi", no_phi, "omit the residual constraint (diagram-only, over-approximate)");
    auto* or_opt = synth->add_option("--or-groups", or_groups_arg, "compute or-groups, optional budget (ms or 10s)")
                       ->expected(0, 1);
    synth->add_flag("--interactive", interactive, "ask every open decision on the terminal");
    synth->add_flag("--no-interactive", no_interactive, "never prompt (default)");
    synth->add_option("--identifier", identifiers, "column to treat as a product identifier");
    synth->add_flag("--dedup", dedup, "collapse duplicate rows instead of failing");
    synth->add_option("--transcript", transcript_path, "write every decision taken to this file");
    synth->add_option("--replay", replay_path, "answer decisions from a recorded transcript first");
    synth->add_option("--threads", threads, "workers for binary implications (default AFM_FORGE_THREADS or 1)");

    // check
    auto* check = app.add_subcommand("check", "Compare a model's configurations with a matrix and audit maximality");
    std::string afm_path, check_matrix;
    std::uint64_t budget = kDefaultEnumerationBudget;
    check->add_option("afm", afm_path, "AFM JSON")->required();
    check->add_option("matrix", check_matrix, "configuration matrix (CSV)")->required();
    check->add_option("--budget", budget, "enumeration node budget");

    // enumerate
    auto* enumerate = app.add_subcommand("enumerate", "List every configuration of a model");
    std::string enum_afm;
    bool enum_no_phi = false;
    enumerate->add_option("afm", enum_afm, "AFM JSON")->required();
    enumerate->add_flag("--no-phi", enum_no_phi, "ignore the residual constraint");
    enumerate->add_option("--budget", budget, "enumeration node budget");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random configuration matrix");
    GeneratorParams gp;
    std::string gen_out, gen_dk;
    gen->add_option("-v", gp.v, "variables")->required();
    gen->add_option("-c", gp.c, "configurations attempted")->required();
    gen->add_option("-d", gp.d, "maximum domain size")->required();
    gen->add_option("--seed", gp.seed, "random seed");
    gen->add_option("-o,--output", gen_out, "CSV output (stdout otherwise)");
    gen->add_option("--dk", gen_dk, "write domain knowledge classifying the generated columns");

    // bench
    auto* bench = app.add_subcommand("bench", "Time synthesis over a parameter sweep");
    std::string sweep_text, bench_out, plot_out, timeout_text = "10s";
    SweepPlan plan;
    plan.base = {50, 1000, 10, 1};
    bench->add_option("--sweep", sweep_text, "axis=lo:hi, axis=lo:hi:step or axis=a,b,c")->required();
    bench->add_option("--v", plan.base.v, "variables");
    bench->add_option("--c", plan.base.c, "configurations");
    bench->add_option("--d", plan.base.d, "maximum domain size");
    bench->add_option("--seed", plan.base.seed, "base seed");
    bench->add_option("--reps", plan.repetitions, "repetitions per point");
    bench->add_option("--warmup", plan.warmup, "untimed runs before measuring");
    bench->add_flag("--or-groups", plan.or_groups, "compute or-groups");
    bench->add_option("--timeout", timeout_text, "or-group budget per run (ms, or with s/m suffix)");
    bench->add_flag("--parallel", plan.parallel, "run sweep points concurrently");
    bench->add_option("-o,--output", bench_out, "per-run CSV output");
    bench->add_option("--plot", plot_out, "plot data output (default: the -o path with .plot.csv)");

    // serve
    auto* serve = app.add_subcommand("serve", "Serve interactive synthesis sessions over HTTP");
    std::string host = "127.0.0.1", store_dir;
    int port = 8080;
    serve->add_option("--host", host, "listen address");
    serve->add_option("--port", port, "listen port (0 picks one)");
    serve->add_option("--store", store_dir, "directory persisting sessions");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*synth) {
            IngestionHints hints;
            hints.dedup_rows = dedup;
            auto matrix = parse_matrix(read_file(matrix_path), hints);
            DomainKnowledge dk;
            if (!dk_path.empty()) dk = load_dk(read_file(dk_path));
            for (const auto& id : identifiers) dk.columns[id].kind = ColumnKind::Identifier;
            SynthesisOptions options;
            options.phi = !no_phi;
            options.threads = threads;
            if (or_opt->count()) {
                options.or_groups = true;
                if (!or_groups_arg.empty() && !or_groups_arg.front().empty())
                    options.or_budget = parse_duration(or_groups_arg.front());
            }
            std::shared_ptr<DecisionProvider> fallback;
            if (interactive && !no_interactive) fallback = std::make_shared<TerminalProvider>(err, in);
            else fallback = std::make_shared<HeuristicProvider>();
            std::shared_ptr<DecisionProvider> provider = std::make_shared<KnowledgeProvider>(dk, fallback);
            if (!replay_path.empty())
                provider = std::make_shared<ReplayProvider>(transcript_from_json(read_file(replay_path)), provider);
            auto res = synthesize(matrix, *provider, dk, options);
            auto text = to_text(res.model);
            if (!out_path.empty()) {
                write_file(out_path, to_json(res.model));
                write_file(text_path.empty() ? replace_extension(out_path, ".txt") : text_path, text);
                out << "wrote " << out_path << "\n";
            } else {
                if (!text_path.empty()) write_file(text_path, text);
                out << text;
            }
            if (!transcript_path.empty())
                write_file(transcript_path, transcript_to_json(res.model.provenance.decisions) + "\n");
            return kExitOk;
        }
        if (*check) {
            auto model = from_json(read_file(afm_path));
            auto matrix = parse_matrix(read_file(check_matrix));
            auto report = check_semantics(model, matrix, true, budget);
            out << "semantics: " << (model.phi ? "exact (with phi)" : "diagram only") << "\n";
            out << format_report(model, report);
            auto audit = audit_maximality(model, budget);
            out << format_report(audit);
            bool ok = report.sound && report.complete && audit.maximal();
            out << (ok ? "result: sound, complete and maximal\n" : "result: FAILED\n");
            return ok ? kExitOk : kExitValidation;
        }
        if (*enumerate) {
            auto model = from_json(read_file(enum_afm));
            auto configs = enumerate_configurations(model, !enum_no_phi, budget);
            out << configs.size() << " configurations\n";
            for (const auto& c : configs) out << format_configuration(model, c) << "\n";
            return kExitOk;
        }
        if (*gen) {
            auto g = generate_matrix(gp);
            auto csv = write_csv(g.matrix);
            if (gen_out.empty()) out << csv;
            else write_file(gen_out, csv);
            if (!gen_dk.empty()) write_file(gen_dk, dump_dk(generated_knowledge(g)));
            err << "effective rows " << g.effective_rows << ", effective d " << g.effective_d << "\n";
            return kExitOk;
        }
        if (*bench) {
            auto [axis, values] = parse_sweep(sweep_text);
            plan.axis = axis;
            plan.values = values;
            plan.timeout = parse_duration(timeout_text);
            auto report = run_benchmark(plan);
            if (!bench_out.empty()) {
                write_file(bench_out, bench_csv(report));
                write_file(plot_out.empty() ? replace_extension(bench_out, ".plot.csv") : plot_out, bench_plot_data(report));
            } else {
                out << bench_csv(report);
            }
            const auto& f = report.fit;
            out << (f.sqrt_time ? "sqrt(time)" : "time") << " vs " << to_string(axis) << ": slope " << f.slope
                << ", intercept " << f.intercept << ", r " << f.correlation << "\n";
            if (plan.or_groups)
                for (auto v : values) out << "timeout rate at " << to_string(axis) << "=" << v << ": " << report.timeout_rate(v) << "\n";
            return kExitOk;
        }
        if (*serve) {
            std::optional<std::filesystem::path> dir;
            if (!store_dir.empty()) dir = store_dir;
            SessionStore store(dir);
            SessionServer server(store);
            int bound = server.bind(host, port);
            if (bound < 0) throw Error("server", "BindFailed", host + ":" + std::to_string(port));
            out << "listening on http://" << host << ":" << bound << "\n" << std::flush;
            active_server = &server;
            std::signal(SIGINT, [](int) {
                if (auto* s = active_server.load()) s->stop();
            });
            server.run();
            active_server = nullptr;
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace afm
