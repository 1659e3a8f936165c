#include "afm/structure.hpp"

#include <algorithm>
#include <set>

#include "afm/error.hpp"

namespace afm {

namespace {

constexpr const char* kStage = "structure";

// Root first, then feature index.
std::size_t rank(const RootedGraph& g, std::size_t f) { return f == g.root ? 0 : f + 1; }

std::vector<std::string> names(const RootedGraph& g, const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(g.features[i]);
    return out;
}

}  // namespace

std::vector<bool> core_features(const VariableModel& vm) {
    std::vector<bool> core(vm.features.size(), true);
    for (const auto& row : vm.table.rows)
        for (std::size_t f = 0; f < core.size(); ++f)
            if (!row[f].as_flag()) core[f] = false;
    return core;
}

std::string default_root_name(const VariableModel& vm) {
    std::string name = "root";
    auto used = [&](const std::string& n) { return vm.find_feature(n) || vm.find_attribute(n); };
    while (used(name)) name = "_" + name;
    return name;
}

RootedGraph ensure_rooted(const Digraph& big, const VariableModel& vm, const std::string& root_name) {
    RootedGraph g;
    g.features = vm.features;
    g.core = core_features(vm);
    if (root_name.empty()) throw Error(kStage, "IllegalRoot", "empty root name");
    if (vm.find_attribute(root_name))
        throw Error(kStage, "IllegalRoot", "'" + root_name + "' is an attribute");
    if (auto f = vm.find_feature(root_name)) {
        if (!g.core[*f])
            throw Error(kStage, "IllegalRoot", "'" + root_name + "' is not selected in every configuration");
        g.big = big;
        g.root = *f;
    } else {
        g.big = big.with_extra_node();
        g.root = g.features.size();
        g.features.push_back(root_name);
        g.core.push_back(true);
        g.synthetic = true;
    }
    for (std::size_t f = 0; f < g.features.size(); ++f) {
        if (f == g.root) continue;
        g.big.set(f, g.root);
        if (g.core[f]) g.big.set(g.root, f);
    }
    return g;
}

std::vector<std::size_t> parent_candidates(const RootedGraph& g, std::size_t f) {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < g.features.size(); ++p) {
        if (p == f || !g.big.has(f, p)) continue;
        if (!g.big.has(p, f) || rank(g, p) < rank(g, f)) out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
        auto da = g.big.out_degree(a), db = g.big.out_degree(b);
        if (da != db) return da > db;
        return g.features[a] < g.features[b];
    });
    return out;
}

std::vector<std::size_t> parent_question_order(const RootedGraph& g) {
    std::vector<std::size_t> order;
    for (std::size_t f = 0; f < g.features.size(); ++f)
        if (f != g.root) order.push_back(f);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        auto da = g.big.out_degree(a), db = g.big.out_degree(b);
        if (da != db) return da > db;
        return g.features[a] < g.features[b];
    });
    return order;
}

Hierarchy extract_hierarchy(const RootedGraph& g, DecisionProvider& provider) {
    Hierarchy h;
    h.root = g.root;
    h.parent.assign(g.features.size(), kNoParent);
    for (auto f : parent_question_order(g)) {
        auto cands = parent_candidates(g, f);
        if (cands.empty()) throw Error(kStage, "Unreachable", "'" + g.features[f] + "' implies no candidate parent");
        auto labels = names(g, cands);
        auto answer = provider.choose_parent(g.features[f], labels);
        auto it = std::find(labels.begin(), labels.end(), answer);
        if (it == labels.end())
            throw Error(kStage, "IllegalParent", "'" + answer + "' cannot be the parent of '" + g.features[f] + "'");
        h.parent[f] = cands[static_cast<std::size_t>(it - labels.begin())];
    }
    return h;
}

std::vector<std::vector<std::size_t>> legal_attribute_places(const BISet& bi, const VariableModel& vm,
                                                            const RootedGraph& g) {
    std::vector<std::vector<std::size_t>> legal(vm.attributes.size());
    const auto off = CellValue::flag(false);
    for (std::size_t a = 0; a < vm.attributes.size(); ++a) {
        const auto& null = vm.domains[a].null_value;
        auto col = vm.attribute_column(a);
        for (std::size_t f = 0; f < g.features.size(); ++f) {
            if (f == g.root && g.synthetic) {
                legal[a].push_back(f);
                continue;
            }
            const auto* e = bi.find(f, col, off);
            bool ok = true;
            if (e)
                for (auto p = bi.codes_begin(*e); p != bi.codes_end(*e); ++p)
                    if (!same_value(bi.value(col, *p), null)) ok = false;
            if (ok) legal[a].push_back(f);
        }
    }
    return legal;
}

std::vector<std::size_t> place_attributes(const std::vector<std::vector<std::size_t>>& legal,
                                          const VariableModel& vm, const RootedGraph& g, const Hierarchy& h,
                                          DecisionProvider& provider) {
    std::vector<std::size_t> alpha;
    for (std::size_t a = 0; a < vm.attributes.size(); ++a) {
        auto cands = legal[a];
        std::sort(cands.begin(), cands.end(), [&](std::size_t x, std::size_t y) {
            auto dx = h.depth(x), dy = h.depth(y);
            if (dx != dy) return dx > dy;
            return g.features[x] < g.features[y];
        });
        auto labels = names(g, cands);
        auto answer = provider.choose_place(vm.attributes[a], labels);
        auto it = std::find(labels.begin(), labels.end(), answer);
        if (it == labels.end())
            throw Error(kStage, "IllegalPlacement",
                        "'" + vm.attributes[a] + "' cannot be placed in '" + answer + "'");
        alpha.push_back(cands[static_cast<std::size_t>(it - labels.begin())]);
    }
    return alpha;
}

}  // namespace afm
