// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "afm/constraints.hpp"
#include "afm/labkit.hpp"
#include "afm/semantics.hpp"
#include "afm/serialize.hpp"
#include "support/testkit.hpp"

#ifndef AFM_TOOL
#define AFM_TOOL "afmforge"
#endif

using namespace afm;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double x, int digits = 3) {
    std::ostringstream os;
    os.precision(digits);
    os << std::fixed << x;
    return os.str();
}

std::string parent_name(const AttributedFeatureModel& m, const std::string& child) {
    auto f = m.find_feature(child);
    if (!f || m.hierarchy.parent[*f] == kNoParent) return "";
    return m.features[m.hierarchy.parent[*f]];
}

bool has_constraint(const AttributedFeatureModel& m, const std::string& text) {
    for (const auto& rc : m.constraints)
        if (render_constraint(rc) == text) return true;
    return false;
}

// 1. Wiki golden model.
Outcome wiki_golden() {
    auto start = Clock::now();
    auto res = synthesize(testkit::wiki_matrix(), testkit::wiki_dk());
    double secs = seconds_since(start);
    const auto& m = res.model;
    std::vector<std::string> problems;
    const std::string root = "Wiki engine";
    if (m.root_name() != root) problems.push_back("root " + m.root_name());
    std::map<std::string, std::string> want{{"LanguageSupport", root}, {"LicenseType", root},
                                            {"WYSIWYG", root},         {"GPL", "LicenseType"},
                                            {"Commercial", "LicenseType"}, {"NoLimit", "LicenseType"}};
    std::size_t edges = 0;
    for (std::size_t f = 0; f < m.features.size(); ++f)
        if (f != m.hierarchy.root) ++edges;
    if (edges != want.size()) problems.push_back(std::to_string(edges) + " hierarchy edges");
    for (const auto& [c, p] : want)
        if (parent_name(m, c) != p) problems.push_back(c + " -> " + parent_name(m, c));
    std::vector<std::string> mandatory;
    for (std::size_t f = 0; f < m.features.size(); ++f)
        if (m.mandatory[f]) mandatory.push_back(m.features[f] + "->" + parent_name(m, m.features[f]));
    if (mandatory != std::vector<std::string>{"LicenseType->" + root}) problems.push_back("E_M differs");
    bool xor_ok = m.groups.size() == 1 && m.groups[0].kind == GroupKind::Xor &&
                  m.features[m.groups[0].parent] == "LicenseType";
    if (xor_ok) {
        std::set<std::string> members;
        for (auto c : m.groups[0].children) members.insert(m.features[c]);
        xor_ok = members == std::set<std::string>{"GPL", "Commercial", "NoLimit"};
    }
    if (!xor_ok) problems.push_back("groups differ");
    for (const auto& a : m.attributes) {
        auto host = m.features[a.host];
        if (a.name == "Language" && host != "LanguageSupport") problems.push_back("alpha(Language)=" + host);
        if (a.name == "LicensePrice" && host != "LicenseType") problems.push_back("alpha(LicensePrice)=" + host);
    }
    for (auto rc : {"GPL => LicensePrice <= 10", "Commercial => LicensePrice = 10", "NoLimit => !LanguageSupport"})
        if (!has_constraint(m, rc)) problems.push_back(std::string("missing ") + rc);
    if (secs >= 1.0) problems.push_back("took " + fmt(secs) + " s");
    std::string detail = "6 edges, E_M, xor, placements, 3 constraints, " + fmt(secs * 1000, 1) + " ms";
    if (!problems.empty()) {
        detail.clear();
        for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
    }
    return {problems.empty(), detail};
}

// 2. Soundness and completeness with phi.
Outcome sound_and_complete() {
    auto start = Clock::now();
    std::size_t checked = 0, failed = 0;
    std::string first_failure;
    auto check = [&](const ConfigurationMatrix& matrix, const DomainKnowledge& dk, const std::string& label) {
        auto res = synthesize(matrix, dk);
        auto rep = check_semantics(res.model, matrix, true);
        ++checked;
        if (!(rep.sound && rep.complete)) {
            ++failed;
            if (first_failure.empty()) first_failure = label;
        }
    };
    check(testkit::wiki_matrix(), testkit::wiki_dk(), "wiki");
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto s = testkit::random_sample(seed, 8, 16, 4);
        check(s.matrix, s.dk, "seed " + std::to_string(seed));
    }
    double secs = seconds_since(start);
    bool pass = failed == 0 && secs < 60;
    std::string detail = std::to_string(checked - failed) + "/" + std::to_string(checked) + " sound and complete in " +
                         fmt(secs, 2) + " s";
    if (!first_failure.empty()) detail += "; first failure " + first_failure;
    return {pass, detail};
}

// 3. Over-approximation of the diagram without phi.
Outcome over_approximation() {
    auto matrix = testkit::wiki_matrix();
    SynthesisOptions opt;
    opt.phi = false;
    auto m = synthesize(matrix, testkit::wiki_dk(), opt).model;
    auto make = [&](std::uint64_t price, bool wysiwyg) {
        Configuration c;
        c.selected.assign(m.features.size(), false);
        for (auto name : {"Wiki engine", "LicenseType", "GPL", "LanguageSupport"}) c.selected[*m.find_feature(name)] = true;
        if (wysiwyg) c.selected[*m.find_feature("WYSIWYG")] = true;
        c.values.resize(m.attributes.size());
        c.values[*m.find_attribute("LicensePrice")] = CellValue::integer(price);
        c.values[*m.find_attribute("Language")] = CellValue::text("PHP");
        return c;
    };
    bool a = eval_config(m, make(0, true), false);
    bool b = eval_config(m, make(10, false), false);
    auto rep = check_semantics(m, matrix, false);
    bool pass = a && b && rep.complete;
    return {pass, std::string("(GPL,0,Yes,PHP,Yes) ") + (a ? "admitted" : "rejected") + ", (GPL,10,Yes,PHP,No) " +
                      (b ? "admitted" : "rejected") + ", complete=" + (rep.complete ? "true" : "false") + ", " +
                      std::to_string(rep.extra.size()) + " extra configurations"};
}

// 4. Binary implication validity, comprehensiveness and size.
Outcome bi_properties() {
    auto start = Clock::now();
    std::size_t ok = 0, n = 1000;
    std::string first_failure;
    for (std::uint64_t seed = 1; seed <= n; ++seed) {
        auto s = testkit::random_sample(1000 + seed, 10, 50, 6);
        auto bi = compute_binary_implications(s.matrix, 1);
        bool good = bi_valid(bi, s.matrix) && bi_comprehensive(bi, s.matrix);
        std::size_t expected = 0;
        for (std::size_t i = 0; i < s.matrix.column_count(); ++i)
            expected += column_domain(s.matrix, i).size() * (s.matrix.column_count() - 1);
        good = good && bi.size() == expected;
        auto oracle = testkit::oracle_implications(s.matrix);
        good = good && oracle.size() == bi.size();
        for (const auto& e : bi.entries()) {
            auto values = bi.values(e);
            auto it = oracle.find({e.i, e.j, bi.value(e.i, e.u)});
            if (it == oracle.end() || std::set<CellValue>(values.begin(), values.end()) != it->second) good = false;
        }
        if (good) ++ok;
        else if (first_failure.empty()) first_failure = "seed " + std::to_string(1000 + seed);
    }
    double secs = seconds_since(start);
    std::string detail = std::to_string(ok) + "/" + std::to_string(n) + " matrices valid, comprehensive, sized and equal to the row oracle in " + fmt(secs, 2) + " s";
    if (!first_failure.empty()) detail += "; first failure " + first_failure;
    return {ok == n && secs < 120, detail};
}

// 5. Group oracles.
Outcome group_oracles() {
    std::size_t used = 0, mutex_ok = 0, or_ok = 0, xor_ok = 0, or_groups_seen = 0, mutex_groups_seen = 0;
    std::string first_failure;
    for (std::uint64_t seed = 1; used < 200 && seed < 5000; ++seed) {
        auto s = testkit::random_sample(5000 + seed, 7, 24, 3);
        auto f = testkit::front_half(s);
        if (f.vm.features.size() > 10) continue;
        ++used;
        auto mutex = compute_mutex_groups(f.mutex, f.h, f.mandatory);
        bool m_ok = testkit::as_set(mutex) == testkit::oracle_mutex_groups(f);
        auto ors = compute_or_groups(f.presence, f.h, f.mandatory, std::chrono::milliseconds(10000));
        bool o_ok = !ors.timed_out && testkit::as_set(ors.groups) == testkit::oracle_or_groups(f);
        auto xa = compute_xor_groups(mutex, ors.groups, f.presence);
        auto xb = compute_xor_groups(mutex, std::nullopt, f.presence);
        bool x_ok = testkit::as_set(xa) == testkit::as_set(xb);
        mutex_ok += m_ok;
        or_ok += o_ok;
        xor_ok += x_ok;
        mutex_groups_seen += mutex.size();
        or_groups_seen += ors.groups.size();
        if (!(m_ok && o_ok && x_ok) && first_failure.empty()) first_failure = "seed " + std::to_string(5000 + seed);
    }
    bool pass = used >= 200 && mutex_ok == used && or_ok == used && xor_ok == used && mutex_groups_seen > 0 &&
                or_groups_seen > 0;
    std::string detail = std::to_string(used) + " matrices: mutex " + std::to_string(mutex_ok) + ", or " +
                         std::to_string(or_ok) + ", xor A=B " + std::to_string(xor_ok) + " (" +
                         std::to_string(mutex_groups_seen) + " mutex / " + std::to_string(or_groups_seen) +
                         " or groups checked)";
    if (!first_failure.empty()) detail += "; first failure " + first_failure;
    return {pass, detail};
}

// 6. Maximality audit.
Outcome maximality() {
    SynthesisOptions opt;
    opt.or_groups = true;
    std::array<std::size_t, 4> examined{};
    std::size_t clean = 0, total = 0;
    std::string first_failure;
    auto audit = [&](const ConfigurationMatrix& matrix, const DomainKnowledge& dk, const std::string& label) {
        auto m = synthesize(matrix, dk, opt).model;
        auto rep = audit_maximality(m);
        ++total;
        for (std::size_t k = 0; k < 4; ++k) examined[k] += rep.examined[k];
        if (rep.maximal() && rep.or_groups_audited) ++clean;
        else if (first_failure.empty())
            first_failure = label + (rep.violations.empty() ? "" : ": " + to_string(rep.violations[0].mutation) + " " + rep.violations[0].detail);
    };
    audit(testkit::wiki_matrix(), testkit::wiki_dk(), "wiki");
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto s = testkit::random_sample(9000 + seed, 6, 12, 3);
        audit(s.matrix, s.dk, "seed " + std::to_string(9000 + seed));
    }
    bool all_classes = std::all_of(examined.begin(), examined.end(), [](std::size_t n) { return n > 0; });
    std::string detail = std::to_string(clean) + "/" + std::to_string(total) + " maximal; examined mandatory " +
                         std::to_string(examined[0]) + ", add-group " + std::to_string(examined[1]) +
                         ", promote-group " + std::to_string(examined[2]) + ", add-constraint " +
                         std::to_string(examined[3]);
    if (!first_failure.empty()) detail += "; first failure " + first_failure;
    return {clean == total && all_classes, detail};
}

SweepPlan plan(SweepAxis axis, std::vector<std::size_t> values, GeneratorParams base, std::size_t reps) {
    SweepPlan p;
    p.axis = axis;
    p.values = std::move(values);
    p.base = base;
    p.repetitions = reps;
    p.threads = 1;
    return p;
}

// 7. Scaling trends.
Outcome scaling() {
    struct Sweep {
        std::string name;
        SweepPlan plan;
        double threshold;
    };
    std::vector<Sweep> sweeps{
        {"time~c", plan(SweepAxis::C, {500, 1000, 2000, 4000, 8000}, {50, 0, 10, 71}, 10), 0.95},
        {"sqrt(time)~v", plan(SweepAxis::V, {50, 100, 200, 400}, {0, 1000, 10, 72}, 10), 0.90},
        {"sqrt(time)~d", plan(SweepAxis::D, {5, 10, 50, 100, 500}, {10, 5000, 0, 73}, 10), 0.85},
    };
    bool pass = true;
    std::string detail;
    for (auto& s : sweeps) {
        auto start = Clock::now();
        auto report = run_benchmark(s.plan);
        double secs = seconds_since(start);
        bool ok = report.fit.correlation >= s.threshold && secs < 600 && report.fit.x.size() == s.plan.values.size();
        pass = pass && ok;
        detail += (detail.empty() ? "" : "; ") + s.name + " r=" + fmt(report.fit.correlation) + " (>= " +
                  fmt(s.threshold, 2) + ", " + fmt(secs, 1) + " s)";
    }
    return {pass, detail};
}

// 8. Or-group timeout wall.
Outcome or_wall() {
    auto rate_at = [](std::size_t v) {
        auto p = plan(SweepAxis::V, {v}, {0, 1000, 10, 81}, 10);
        p.or_groups = true;
        p.timeout = std::chrono::seconds(10);
        p.warmup = 0;
        return run_benchmark(p).timeout_rate(v);
    };
    double low = rate_at(5);
    std::string detail = "v=5: " + fmt(low * 100, 0) + "%";
    double best = 0;
    for (std::size_t v : {40, 50, 55, 60}) {
        double r = rate_at(v);
        detail += ", v=" + std::to_string(v) + ": " + fmt(r * 100, 0) + "%";
        best = std::max(best, r);
        if (best >= 0.8) break;
    }
    return {low == 0.0 && best >= 0.8, detail};
}

// 9. Phase dominance.
Outcome phase_dominance() {
    auto p = plan(SweepAxis::V, {100}, {100, 1000, 10, 91}, 10);
    auto report = run_benchmark(p);
    const auto& names = phase_names();
    auto index = [&](const std::string& n) {
        return std::size_t(std::find(names.begin(), names.end(), n) - names.begin());
    };
    double dominant = 0, total = 0;
    for (const auto& r : report.runs)
        for (std::size_t i = 0; i < r.phase_ms.size(); ++i) {
            total += r.phase_ms[i];
            if (i == index("implications") || i == index("complex")) dominant += r.phase_ms[i];
        }
    double share = total > 0 ? dominant / total : 0;
    return {share >= 0.5 && 1 - share <= 0.5,
            "implications + complex " + fmt(share * 100, 1) + "%, remaining phases " + fmt((1 - share) * 100, 1) + "%"};
}

// 10. Byte-identical cmd_synth output.
Outcome determinism() {
    auto dir = std::filesystem::temp_directory_path() / ("afm-determinism-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::size_t same = 0, n = 20;
    std::string first_failure;
    for (std::uint64_t seed = 1; seed <= n; ++seed) {
        auto g = generate_matrix({8, 40, 4, seed});
        auto csv = dir / ("m" + std::to_string(seed) + ".csv");
        auto dk = dir / ("m" + std::to_string(seed) + ".dk.json");
        std::ofstream(csv) << write_csv(g.matrix);
        std::ofstream(dk) << dump_dk(generated_knowledge(g));
        bool ok = true;
        std::string outputs[2][2];
        for (int run = 0; run < 2; ++run) {
            auto out = dir / ("m" + std::to_string(seed) + "-" + std::to_string(run) + ".json");
            auto cmd = std::string("\"") + AFM_TOOL + "\" synth \"" + csv.string() + "\" --dk \"" + dk.string() +
                       "\" --or-groups -o \"" + out.string() + "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0) ok = false;
            outputs[run][0] = testkit::read_file(out.string());
            auto txt = out;
            txt.replace_extension(".txt");
            outputs[run][1] = testkit::read_file(txt.string());
        }
        ok = ok && !outputs[0][0].empty() && outputs[0][0] == outputs[1][0] && outputs[0][1] == outputs[1][1];
        if (ok) ++same;
        else if (first_failure.empty()) first_failure = "seed " + std::to_string(seed);
    }
    std::filesystem::remove_all(dir);
    std::string detail = std::to_string(same) + "/" + std::to_string(n) + " seeds byte-identical (JSON and text)";
    if (!first_failure.empty()) detail += "; first failure " + first_failure;
    return {same == n, detail};
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 wiki golden model", wiki_golden},
        {"2 soundness and completeness", sound_and_complete},
        {"3 over-approximation without phi", over_approximation},
        {"4 binary implication properties", bi_properties},
        {"5 group oracles", group_oracles},
        {"6 maximality audit", maximality},
        {"7 scaling trends", scaling},
        {"8 or-group timeout wall", or_wall},
        {"9 phase dominance", phase_dominance},
        {"10 determinism", determinism},
    };
    std::set<std::string> only;
    for (int i = 1; i < argc; ++i) only.insert(argv[i]);
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        if (!only.empty() && !only.count(name.substr(0, name.find(' ')))) continue;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << std::endl;
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
