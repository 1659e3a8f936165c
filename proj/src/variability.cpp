#include "afm/variability.hpp"

#include <algorithm>
#include <set>

#include "afm/error.hpp"

namespace afm {

namespace {

using Clock = std::chrono::steady_clock;

void bron_kerbosch(const Digraph& g, std::vector<std::size_t>& r, std::vector<std::size_t> p, std::vector<std::size_t> x,
                   std::vector<std::vector<std::size_t>>& out) {
    if (p.empty() && x.empty()) {
        if (r.size() >= 2) {
            auto c = r;
            std::sort(c.begin(), c.end());
            out.push_back(std::move(c));
        }
        return;
    }
    // Pivot: the vertex of P u X with most neighbours in P.
    std::size_t pivot = p.empty() ? x.front() : p.front();
    std::size_t best = 0;
    for (const auto* set : {&p, &x})
        for (auto u : *set) {
            std::size_t deg = 0;
            for (auto v : p) deg += g.has(u, v);
            if (deg > best) {
                best = deg;
                pivot = u;
            }
        }
    std::vector<std::size_t> candidates;
    for (auto v : p)
        if (!g.has(pivot, v)) candidates.push_back(v);
    for (auto v : candidates) {
        std::vector<std::size_t> np, nx;
        for (auto w : p)
            if (g.has(v, w)) np.push_back(w);
        for (auto w : x)
            if (g.has(v, w)) nx.push_back(w);
        r.push_back(v);
        bron_kerbosch(g, r, std::move(np), std::move(nx), out);
        r.pop_back();
        p.erase(std::find(p.begin(), p.end(), v));
        x.push_back(v);
    }
}

struct CoverSearch {
    // rows[k] = positions (into nodes) selected by configuration k.
    std::vector<std::vector<std::uint32_t>> rows;
    std::vector<std::vector<std::uint32_t>> rows_of;  // position -> rows containing it
    std::vector<std::uint32_t> hits;                 // per row: members of S selected
    std::vector<char> in_s, excluded;
    std::vector<std::uint32_t> s;
    std::vector<std::vector<std::size_t>> found;
    const std::vector<std::size_t>* nodes = nullptr;
    Clock::time_point deadline;
    std::uint64_t visited = 0;
    bool timed_out = false;

    bool has_private(std::uint32_t x) const {
        for (auto k : rows_of[x])
            if (hits[k] == 1) return true;
        return false;
    }

    void add(std::uint32_t e) {
        in_s[e] = 1;
        s.push_back(e);
        for (auto k : rows_of[e]) ++hits[k];
    }
    void remove(std::uint32_t e) {
        in_s[e] = 0;
        s.pop_back();
        for (auto k : rows_of[e]) --hits[k];
    }

    void run() {
        if (timed_out) return;
        if ((visited++ & 1023) == 0 && Clock::now() > deadline) {
            timed_out = true;
            return;
        }
        std::size_t open = rows.size();
        for (std::size_t k = 0; k < rows.size(); ++k)
            if (hits[k] == 0) {
                open = k;
                break;
            }
        if (open == rows.size()) {
            if (s.size() >= 2) {
                std::vector<std::size_t> cover;
                for (auto e : s) cover.push_back((*nodes)[e]);
                std::sort(cover.begin(), cover.end());
                found.push_back(std::move(cover));
            }
            return;
        }
        std::vector<std::uint32_t> newly_excluded;
        for (auto e : rows[open]) {
            if (excluded[e]) continue;
            add(e);
            bool minimal = true;
            for (auto x : s)
                if (!has_private(x)) {
                    minimal = false;
                    break;
                }
            if (minimal) run();
            remove(e);
            if (timed_out) break;
            excluded[e] = 1;
            newly_excluded.push_back(e);
        }
        for (auto e : newly_excluded) excluded[e] = 0;
    }
};

bool overlaps(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    for (auto x : a)
        if (std::find(b.begin(), b.end(), x) != b.end()) return true;
    return false;
}

int kind_rank(GroupKind k) {
    switch (k) {
        case GroupKind::Xor: return 0;
        case GroupKind::Mutex: return 1;
        case GroupKind::Or: return 2;
    }
    return 3;
}

}  // namespace

std::vector<bool> compute_mandatory(const Hierarchy& h, const Digraph& big) {
    std::vector<bool> m(h.parent.size(), false);
    for (std::size_t c = 0; c < h.parent.size(); ++c)
        if (h.parent[c] != kNoParent && big.has(h.parent[c], c)) m[c] = true;
    return m;
}

std::vector<std::vector<std::size_t>> maximal_cliques(const Digraph& mutex, const std::vector<std::size_t>& nodes) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> r;
    bron_kerbosch(mutex, r, nodes, {}, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> free_children(const Hierarchy& h, const std::vector<bool>& mandatory, std::size_t p) {
    std::vector<std::size_t> out;
    for (auto c : h.children(p))
        if (!mandatory[c]) out.push_back(c);
    return out;
}

std::vector<FeatureGroup> compute_mutex_groups(const Digraph& mutex, const Hierarchy& h,
                                               const std::vector<bool>& mandatory) {
    std::vector<FeatureGroup> out;
    for (std::size_t p = 0; p < h.parent.size(); ++p)
        for (auto& c : maximal_cliques(mutex, free_children(h, mandatory, p)))
            out.push_back({GroupKind::Mutex, p, std::move(c)});
    return out;
}

std::vector<std::vector<std::size_t>> minimal_covers(const PresenceTable& t, std::size_t parent,
                                                     const std::vector<std::size_t>& nodes,
                                                     Clock::time_point deadline, bool& timed_out) {
    CoverSearch search;
    search.nodes = &nodes;
    search.deadline = deadline;
    search.rows_of.resize(nodes.size());
    std::set<std::vector<std::uint32_t>> distinct;
    for (const auto& row : t.rows) {
        if (!row[parent]) continue;
        std::vector<std::uint32_t> sel;
        for (std::uint32_t e = 0; e < nodes.size(); ++e)
            if (row[nodes[e]]) sel.push_back(e);
        if (sel.empty()) return {};
        distinct.insert(std::move(sel));
    }
    for (const auto& sel : distinct) {
        auto k = static_cast<std::uint32_t>(search.rows.size());
        for (auto e : sel) search.rows_of[e].push_back(k);
        search.rows.push_back(sel);
    }
    search.hits.assign(search.rows.size(), 0);
    search.in_s.assign(nodes.size(), 0);
    search.excluded.assign(nodes.size(), 0);
    if (!search.rows.empty()) search.run();
    if (search.timed_out) timed_out = true;
    std::sort(search.found.begin(), search.found.end());
    return search.found;
}

OrGroupResult compute_or_groups(const PresenceTable& t, const Hierarchy& h, const std::vector<bool>& mandatory,
                                std::chrono::milliseconds budget) {
    OrGroupResult res;
    auto deadline = Clock::now() + budget;
    for (std::size_t p = 0; p < h.parent.size() && !res.timed_out; ++p) {
        auto kids = free_children(h, mandatory, p);
        if (kids.size() < 2) continue;
        for (auto& c : minimal_covers(t, p, kids, deadline, res.timed_out))
            res.groups.push_back({GroupKind::Or, p, std::move(c)});
    }
    if (res.timed_out) res.groups.clear();
    return res;
}

bool parent_implies_disjunction(const PresenceTable& t, std::size_t parent, const std::vector<std::size_t>& children) {
    for (const auto& row : t.rows) {
        if (!row[parent]) continue;
        if (std::none_of(children.begin(), children.end(), [&](std::size_t c) { return row[c]; })) return false;
    }
    return true;
}

std::vector<FeatureGroup> compute_xor_groups(const std::vector<FeatureGroup>& mutex_groups,
                                             const std::optional<std::vector<FeatureGroup>>& or_groups,
                                             const PresenceTable& t) {
    std::vector<FeatureGroup> out;
    for (const auto& g : mutex_groups) {
        bool is_xor = false;
        if (or_groups) {
            is_xor = std::any_of(or_groups->begin(), or_groups->end(), [&](const FeatureGroup& o) {
                return o.parent == g.parent && o.children == g.children;
            });
        } else {
            is_xor = parent_implies_disjunction(t, g.parent, g.children);
        }
        if (is_xor) out.push_back({GroupKind::Xor, g.parent, g.children});
    }
    return out;
}

GroupSelection finalize_groups(const PresenceTable& t, const Digraph& mutex, const Hierarchy& h,
                               const std::vector<bool>& mandatory, const std::vector<std::string>& names,
                               const GroupOptions& options, DecisionProvider& provider) {
    GroupSelection sel;
    auto deadline = Clock::now() + options.budget;
    auto member_names = [&](const std::vector<std::size_t>& c) {
        std::vector<std::string> out;
        for (auto x : c) out.push_back(names[x]);
        return out;
    };

    for (std::size_t p = 0; p < h.parent.size(); ++p) {
        auto remaining = free_children(h, mandatory, p);
        while (remaining.size() >= 2) {
            std::vector<FeatureGroup> mutex_groups;
            for (auto& c : maximal_cliques(mutex, remaining)) mutex_groups.push_back({GroupKind::Mutex, p, std::move(c)});
            std::optional<std::vector<FeatureGroup>> or_groups;
            if (options.or_groups && !sel.timed_out) {
                bool timed_out = false;
                auto covers = minimal_covers(t, p, remaining, deadline, timed_out);
                if (timed_out) {
                    sel.timed_out = true;
                } else {
                    or_groups.emplace();
                    for (auto& c : covers) or_groups->push_back({GroupKind::Or, p, std::move(c)});
                }
            }
            auto xor_groups = compute_xor_groups(mutex_groups, or_groups, t);
            auto coextensive = [&](const FeatureGroup& g) {
                return std::any_of(xor_groups.begin(), xor_groups.end(),
                                   [&](const FeatureGroup& x) { return x.children == g.children; });
            };

            std::vector<FeatureGroup> cands = xor_groups;
            for (const auto* list : {&mutex_groups, or_groups ? &*or_groups : nullptr}) {
                if (!list) continue;
                for (const auto& g : *list) {
                    if (coextensive(g)) sel.discarded.push_back({g, "absorbed by xor"});
                    else cands.push_back(g);
                }
            }
            if (cands.empty()) break;
            std::stable_sort(cands.begin(), cands.end(), [&](const FeatureGroup& a, const FeatureGroup& b) {
                if (kind_rank(a.kind) != kind_rank(b.kind)) return kind_rank(a.kind) < kind_rank(b.kind);
                return member_names(a.children) < member_names(b.children);
            });

            std::vector<std::size_t> keep;
            for (std::size_t i = 0; i < cands.size(); ++i) {
                bool alone = true;
                for (std::size_t j = 0; j < cands.size() && alone; ++j)
                    if (i != j && overlaps(cands[i].children, cands[j].children)) alone = false;
                if (alone) keep.push_back(i);
            }
            if (keep.empty()) {
                std::vector<std::string> labels;
                std::vector<std::vector<std::string>> members;
                for (const auto& g : cands) {
                    members.push_back(member_names(g.children));
                    labels.push_back(group_label(to_string(g.kind), members.back()));
                }
                keep.push_back(provider.choose_group(names[p], labels, members));
                for (std::size_t i = 0; i < cands.size(); ++i)
                    if (i != keep.front()) sel.discarded.push_back({cands[i], "overlaps the chosen group"});
            }
            for (auto i : keep) {
                for (auto c : cands[i].children) remaining.erase(std::find(remaining.begin(), remaining.end(), c));
                sel.groups.push_back(cands[i]);
            }
        }
    }
    std::sort(sel.groups.begin(), sel.groups.end(), [](const FeatureGroup& a, const FeatureGroup& b) {
        return std::tie(a.parent, a.children) < std::tie(b.parent, b.children);
    });
    return sel;
}

}  // namespace afm
