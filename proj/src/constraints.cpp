#include "afm/constraints.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace afm {

namespace {

bool subset(const std::vector<bool>& a, const std::vector<bool>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] && !b[i]) return false;
    return true;
}

bool all_set(const std::vector<bool>& a) {
    return std::all_of(a.begin(), a.end(), [](bool x) { return x; });
}

bool none_set(const std::vector<bool>& a) {
    return std::none_of(a.begin(), a.end(), [](bool x) { return x; });
}

std::vector<bool> accepted(const Domain& d, RelOp op, std::uint64_t k) {
    std::vector<bool> out(d.values.size());
    for (std::size_t i = 0; i < d.values.size(); ++i) out[i] = rel_holds(op, d.values[i].as_integer(), k);
    return out;
}

// Positions into domain.values for every code of the BISet column.
std::vector<std::size_t> code_positions(const BISet& bi, std::size_t column, const Domain& d) {
    std::unordered_map<CellValue, std::size_t, CellValueHash> pos;
    for (std::size_t i = 0; i < d.values.size(); ++i) pos.emplace(d.values[i], i);
    std::vector<std::size_t> out;
    for (const auto& v : bi.domains()[column]) out.push_back(pos.at(v));
    return out;
}

void mark(const BISet& bi, const BinaryImplication* e, const std::vector<std::size_t>& positions,
          std::vector<bool>& observed) {
    if (!e) return;
    for (auto p = bi.codes_begin(*e); p != bi.codes_end(*e); ++p) observed[positions[*p]] = true;
}

}  // namespace

std::vector<RelationCandidate> relation_candidates(const std::string& attribute, const Domain& domain,
                                                   const std::vector<std::uint64_t>& bounds,
                                                   const ConstraintOptions& options) {
    std::vector<RelationCandidate> out;
    auto consider = [&](BoolFactor f, std::vector<bool> acc) {
        if (all_set(acc) || none_set(acc)) return;
        for (const auto& c : out)
            if (c.accepts == acc) return;
        out.push_back({std::move(f), std::move(acc)});
    };
    if (domain.numeric) {
        for (auto op : {RelOp::Eq, RelOp::Le, RelOp::Ge, RelOp::Lt, RelOp::Gt})
            for (auto k : bounds)
                consider(BoolFactor::relation(attribute, op, CellValue::integer(k)), accepted(domain, op, k));
    } else if (options.textual_equality) {
        for (std::size_t i = 0; i < domain.values.size(); ++i) {
            std::vector<bool> acc(domain.values.size(), false);
            acc[i] = true;
            consider(BoolFactor::relation(attribute, RelOp::Eq, domain.values[i]), std::move(acc));
        }
    }
    return out;
}

std::vector<RelationCandidate> left_classes(const std::string& attribute, const Domain& domain,
                                            const std::vector<std::uint64_t>& bounds,
                                            const ConstraintOptions& options) {
    std::vector<RelationCandidate> out;
    if (domain.numeric) {
        for (auto k : bounds)
            for (auto op : {RelOp::Lt, RelOp::Eq, RelOp::Gt}) {
                auto acc = accepted(domain, op, k);
                if (!none_set(acc)) out.push_back({BoolFactor::relation(attribute, op, CellValue::integer(k)), acc});
            }
    } else if (options.textual_equality) {
        for (std::size_t i = 0; i < domain.values.size(); ++i) {
            std::vector<bool> acc(domain.values.size(), false);
            acc[i] = true;
            out.push_back({BoolFactor::relation(attribute, RelOp::Eq, domain.values[i]), std::move(acc)});
        }
    }
    return out;
}

std::vector<const RelationCandidate*> minimal_covering(const std::vector<RelationCandidate>& candidates,
                                                       const std::vector<bool>& observed) {
    std::vector<const RelationCandidate*> valid;
    for (const auto& c : candidates)
        if (subset(observed, c.accepts)) valid.push_back(&c);
    std::vector<const RelationCandidate*> out;
    for (const auto* c : valid) {
        bool minimal = true;
        for (const auto* o : valid)
            if (o != c && subset(o->accepts, c->accepts) && o->accepts != c->accepts) minimal = false;
        if (minimal) out.push_back(c);
    }
    return out;
}

std::vector<ReadableConstraint> compute_requires(const Digraph& big, const std::vector<std::string>& names,
                                                 const Hierarchy& h, const std::vector<bool>& mandatory) {
    std::size_t n = names.size();
    std::vector<std::vector<std::size_t>> structural(n);
    for (std::size_t c = 0; c < n; ++c) {
        if (h.parent[c] == kNoParent) continue;
        structural[c].push_back(h.parent[c]);
        if (mandatory[c]) structural[h.parent[c]].push_back(c);
    }
    std::vector<ReadableConstraint> out;
    std::vector<char> seen(n);
    for (std::size_t f = 0; f < n; ++f) {
        if (f == h.root) continue;
        std::fill(seen.begin(), seen.end(), 0);
        std::vector<std::size_t> stack{f};
        seen[f] = 1;
        while (!stack.empty()) {
            auto x = stack.back();
            stack.pop_back();
            for (auto y : structural[x])
                if (!seen[y]) {
                    seen[y] = 1;
                    stack.push_back(y);
                }
        }
        for (std::size_t g = 0; g < n; ++g)
            if (g != f && g != h.root && big.has(f, g) && !seen[g])
                out.push_back({BoolFactor::feature(names[f]), BoolFactor::feature(names[g])});
    }
    return out;
}

std::vector<ReadableConstraint> compute_excludes(const Digraph& mutex, const std::vector<std::string>& names,
                                                 const Hierarchy& h, const std::vector<FeatureGroup>& groups) {
    std::vector<std::size_t> group_of(names.size(), kNoParent);
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        if (groups[gi].kind != GroupKind::Or)
            for (auto c : groups[gi].children) group_of[c] = gi;
    auto covered = [&](std::size_t f, std::size_t g) {
        for (auto a : h.ancestors_or_self(f))
            for (auto b : h.ancestors_or_self(g))
                if (a != b && group_of[a] != kNoParent && group_of[a] == group_of[b]) return true;
        return false;
    };
    std::vector<ReadableConstraint> out;
    for (std::size_t f = 0; f < mutex.size(); ++f)
        for (std::size_t g = f + 1; g < mutex.size(); ++g)
            if (mutex.has(f, g) && !covered(f, g))
                out.push_back({BoolFactor::feature(names[f]), BoolFactor::not_feature(names[g])});
    return out;
}

std::vector<ReadableConstraint> compute_disjunctions(const BISet& bi, const VariableModel& vm,
                                                     const std::vector<std::string>& names, const Hierarchy& h,
                                                     const std::vector<bool>& core,
                                                     const std::vector<FeatureGroup>& groups) {
    std::set<std::pair<std::size_t, std::size_t>> stated;
    for (const auto& g : groups)
        if (g.kind != GroupKind::Mutex && g.children.size() == 2 && core[g.parent])
            stated.emplace(g.children[0], g.children[1]);
    const auto off = CellValue::flag(false);
    std::vector<ReadableConstraint> out;
    std::size_t n = vm.features.size();
    for (std::size_t f = 0; f < n; ++f) {
        if (f == h.root || core[f]) continue;
        auto u = bi.code(f, off);
        if (!u) continue;
        for (std::size_t g = f + 1; g < n; ++g) {
            if (g == h.root || core[g] || stated.count({f, g})) continue;
            const auto* e = bi.find(f, g, *u);
            if (!e) continue;
            bool always = true;
            for (auto p = bi.codes_begin(*e); p != bi.codes_end(*e); ++p)
                if (!bi.value(g, *p).as_flag()) always = false;
            if (always) out.push_back({BoolFactor::not_feature(names[f]), BoolFactor::feature(names[g])});
        }
    }
    return out;
}

std::vector<ReadableConstraint> compute_complex(const BISet& bi, const VariableModel& vm,
                                                const std::vector<std::vector<std::uint64_t>>& bounds,
                                                const ConstraintOptions& options) {
    std::vector<ReadableConstraint> out;
    std::size_t nf = vm.features.size();
    std::size_t na = vm.attributes.size();
    std::vector<std::vector<RelationCandidate>> rights(na);
    std::vector<std::vector<std::size_t>> positions(na);
    for (std::size_t a = 0; a < na; ++a) {
        rights[a] = relation_candidates(vm.attributes[a], vm.domains[a], bounds[a], options);
        positions[a] = code_positions(bi, vm.attribute_column(a), vm.domains[a]);
    }

    // feature => attribute OP literal
    const auto on = CellValue::flag(true);
    for (std::size_t f = 0; f < nf; ++f) {
        auto u = bi.code(f, on);
        if (!u) continue;
        for (std::size_t a = 0; a < na; ++a) {
            if (rights[a].empty()) continue;
            std::vector<bool> observed(vm.domains[a].values.size(), false);
            mark(bi, bi.find(f, vm.attribute_column(a), *u), positions[a], observed);
            for (const auto* c : minimal_covering(rights[a], observed))
                out.push_back({BoolFactor::feature(vm.features[f]), c->factor});
        }
    }

    // attribute class => attribute OP literal
    for (std::size_t ai = 0; ai < na; ++ai) {
        auto classes = left_classes(vm.attributes[ai], vm.domains[ai], bounds[ai], options);
        if (classes.empty()) continue;
        auto ci = vm.attribute_column(ai);
        // domain position -> code in column ci
        std::vector<std::uint32_t> code_of(vm.domains[ai].values.size());
        for (std::uint32_t c = 0; c < positions[ai].size(); ++c) code_of[positions[ai][c]] = c;
        for (std::size_t aj = 0; aj < na; ++aj) {
            if (aj == ai || rights[aj].empty()) continue;
            auto cj = vm.attribute_column(aj);
            std::set<std::pair<std::vector<bool>, std::vector<bool>>> emitted;
            for (const auto& cls : classes) {
                std::vector<bool> observed(vm.domains[aj].values.size(), false);
                for (std::size_t p = 0; p < cls.accepts.size(); ++p)
                    if (cls.accepts[p]) mark(bi, bi.find(ci, cj, code_of[p]), positions[aj], observed);
                for (const auto* c : minimal_covering(rights[aj], observed))
                    if (emitted.emplace(cls.accepts, c->accepts).second) out.push_back({cls.factor, c->factor});
            }
        }
    }
    return out;
}

ResidualConstraint compute_phi(const ConfigurationMatrix& source) {
    return {source.variables, source.rows};
}

}  // namespace afm
