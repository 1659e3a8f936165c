#include "afm/pipeline.hpp"

#include <chrono>
#include <cstdio>

#include "afm/error.hpp"
#include "afm/implications.hpp"
#include "afm/structure.hpp"
#include "afm/variability.hpp"

namespace afm {

namespace {

using Clock = std::chrono::steady_clock;

class PhaseClock {
public:
    explicit PhaseClock(std::vector<PhaseTiming>& out) : out_(out), start_(Clock::now()) {}
    void lap(const std::string& phase) {
        auto now = Clock::now();
        out_.push_back({phase, std::chrono::duration<double, std::milli>(now - start_).count()});
        start_ = now;
    }

private:
    std::vector<PhaseTiming>& out_;
    Clock::time_point start_;
};

class Fnv {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) h_ = (h_ ^ p[i]) * 1099511628211ULL;
    }
    void text(std::string_view s) {
        bytes(s.data(), s.size());
        bytes("\x1f", 1);
    }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    std::uint64_t h_ = 1469598103934665603ULL;
};

std::string hash_table(const ConfigurationMatrix& m) {
    Fnv h;
    for (const auto& v : m.variables) h.text(v);
    for (const auto& row : m.rows) {
        for (const auto& c : row) {
            auto k = static_cast<unsigned char>(c.kind());
            h.bytes(&k, 1);
            if (c.is_text()) {
                h.text(c.as_text());
            } else {
                std::uint64_t n = c.is_flag() ? c.as_flag() : c.as_integer();
                h.bytes(&n, sizeof n);
            }
        }
        h.bytes("\x1e", 1);
    }
    return h.hex();
}

std::string hash_graph(const Digraph& g) {
    std::string buf(g.size() * g.size(), '0');
    for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = 0; b < g.size(); ++b)
            if (g.has(a, b)) buf[a * g.size() + b] = '1';
    return fnv1a_hex(buf);
}

std::string hash_hierarchy(const Hierarchy& h, const std::vector<bool>& mandatory) {
    std::string buf;
    for (std::size_t f = 0; f < h.parent.size(); ++f)
        buf += std::to_string(h.parent[f]) + (mandatory.empty() ? "" : mandatory[f] ? "m" : "o") + ",";
    return fnv1a_hex(buf);
}

PresenceTable presence_table(const VariableModel& vm, const RootedGraph& g) {
    PresenceTable t;
    std::size_t nf = vm.features.size();
    t.rows.reserve(vm.table.row_count());
    for (const auto& row : vm.table.rows) {
        std::vector<bool> sel(g.features.size(), true);
        for (std::size_t f = 0; f < nf; ++f) sel[f] = row[f].as_flag();
        t.rows.push_back(std::move(sel));
    }
    return t;
}

}  // namespace

std::string RecordingProvider::decide(const Question& q) {
    auto answer = inner_.decide(q);
    transcript_.push_back({q, answer});
    return answer;
}

const std::vector<std::string>& phase_names() {
    static const std::vector<std::string> names{"extract",  "implications", "graphs", "hierarchy",
                                                "placement", "mandatory",   "groups", "constraints",
                                                "complex",   "phi"};
    return names;
}

SynthesisResult synthesize(const ConfigurationMatrix& matrix, const DomainKnowledge& dk,
                           const SynthesisOptions& options) {
    auto provider = default_provider(dk);
    return synthesize(matrix, *provider, dk, options);
}

SynthesisResult synthesize(const ConfigurationMatrix& matrix, DecisionProvider& provider, const DomainKnowledge& dk,
                           const SynthesisOptions& options) {
    SynthesisResult res;
    RecordingProvider rec(provider);
    auto& model = res.model;
    auto& prov = model.provenance;
    auto start = Clock::now();
    PhaseClock clock(res.phases);

    // 1. features, attributes, domains
    auto input_hash = hash_table(matrix);
    res.variables = extract_variables(matrix, rec, dk);
    auto& vm = res.variables;
    prov.stages.push_back({"extract", input_hash,
                           std::to_string(vm.features.size()) + " features, " + std::to_string(vm.attributes.size()) +
                               " attributes, " + std::to_string(vm.table.row_count()) + " configurations"});
    clock.lap("extract");

    // 2. binary implications
    auto bi = compute_binary_implications(vm.table, options.threads);
    res.implication_count = bi.size();
    auto table_hash = hash_table(vm.table);
    prov.stages.push_back({"implications", table_hash, std::to_string(bi.size()) + " implications"});
    clock.lap("implications");

    // 3. BIG and mutex graph, rooted
    auto graphs = build_graphs(vm.table, vm.features.size(), bi);
    std::vector<std::string> core_names;
    auto core = core_features(vm);
    for (std::size_t f = 0; f < vm.features.size(); ++f)
        if (core[f]) core_names.push_back(vm.features[f]);
    auto root_name = rec.choose_root(core_names, default_root_name(vm));
    auto rooted = ensure_rooted(graphs.big, vm, root_name);
    prov.stages.push_back({"graphs", table_hash,
                           std::to_string(rooted.big.edge_count()) + " implication edges, " +
                               std::to_string(graphs.mutex.edge_count() / 2) + " mutex edges"});
    clock.lap("graphs");

    // 4. hierarchy
    auto h = extract_hierarchy(rooted, rec);
    prov.stages.push_back({"hierarchy", hash_graph(rooted.big), "root " + rooted.features[rooted.root]});
    clock.lap("hierarchy");

    // 5. attribute placement
    auto legal = legal_attribute_places(bi, vm, rooted);
    auto alpha = place_attributes(legal, vm, rooted, h, rec);
    prov.stages.push_back({"placement", hash_hierarchy(h, {}), std::to_string(alpha.size()) + " attributes placed"});
    clock.lap("placement");

    // 6. mandatory edges
    auto mandatory = compute_mandatory(h, rooted.big);
    std::size_t n_mandatory = 0;
    for (bool b : mandatory) n_mandatory += b;
    prov.stages.push_back({"mandatory", hash_hierarchy(h, {}), std::to_string(n_mandatory) + " mandatory edges"});
    clock.lap("mandatory");

    // 7. feature groups
    auto presence = presence_table(vm, rooted);
    GroupOptions gopt{options.or_groups, options.or_budget};
    auto sel = finalize_groups(presence, graphs.mutex.size() == rooted.features.size() ? graphs.mutex
                                                                                        : graphs.mutex.with_extra_node(),
                               h, mandatory, rooted.features, gopt, rec);
    prov.or_groups = options.or_groups;
    prov.or_groups_timed_out = sel.timed_out;
    prov.discarded_groups = sel.discarded;
    prov.stages.push_back({"groups", hash_hierarchy(h, mandatory),
                           std::to_string(sel.groups.size()) + " groups" + (sel.timed_out ? " (or-groups timed out)" : "")});
    clock.lap("groups");

    // 8. readable constraints
    std::vector<std::vector<std::uint64_t>> bounds;
    for (std::size_t a = 0; a < vm.attributes.size(); ++a)
        bounds.push_back(rec.confirm_bounds(vm.attributes[a], vm.domains[a].values));
    auto requires_ = compute_requires(rooted.big, rooted.features, h, mandatory);
    auto excludes = compute_excludes(graphs.mutex, rooted.features, h, sel.groups);
    auto disjunctions = compute_disjunctions(bi, vm, rooted.features, h, rooted.core, sel.groups);
    clock.lap("constraints");
    auto complex = compute_complex(bi, vm, bounds, options.constraints);
    clock.lap("complex");

    // Φ
    if (options.phi) model.phi = compute_phi(vm.source);
    clock.lap("phi");

    model.features = rooted.features;
    model.hierarchy = std::move(h);
    model.mandatory = std::move(mandatory);
    model.groups = std::move(sel.groups);
    for (std::size_t a = 0; a < vm.attributes.size(); ++a)
        model.attributes.push_back({vm.attributes[a], vm.domains[a], alpha[a], bounds[a]});
    for (auto* list : {&requires_, &excludes, &disjunctions, &complex})
        model.constraints.insert(model.constraints.end(), list->begin(), list->end());
    model.columns = vm.bindings;
    prov.stages.push_back({"constraints", table_hash,
                           std::to_string(model.constraints.size()) + " readable constraints" +
                               (options.phi ? "" : ", phi omitted")});
    prov.decisions = rec.transcript();
    model.check_structure();
    res.total_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return res;
}

}  // namespace afm
