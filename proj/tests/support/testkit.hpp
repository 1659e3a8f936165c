#pragma once

// Shared fixtures, generators and brute-force oracles for the test binaries.
// Oracles recompute their answer straight from matrix rows and never call
// the library routine they are compared against.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "afm/implications.hpp"
#include "afm/knowledge.hpp"
#include "afm/matrix.hpp"
#include "afm/pipeline.hpp"
#include "afm/structure.hpp"
#include "afm/variability.hpp"

#ifndef AFM_DATA_DIR
#define AFM_DATA_DIR "data"
#endif

namespace testkit {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string data_path(const std::string& name) { return std::string(AFM_DATA_DIR) + "/" + name; }

inline afm::ConfigurationMatrix wiki_matrix() { return afm::parse_matrix(read_file(data_path("wiki.csv"))); }
inline afm::DomainKnowledge wiki_dk() { return afm::load_dk(read_file(data_path("wiki.dk.json"))); }
inline afm::DomainKnowledge wiki_alt_dk() { return afm::load_dk(read_file(data_path("wiki-alt.dk.json"))); }

/// A random matrix together with the domain knowledge classifying it.
struct Sample {
    afm::ConfigurationMatrix matrix;
    afm::DomainKnowledge dk;
};

/// Mixed random matrix: boolean columns (Yes/No), enumerated columns,
/// numeric and textual attributes. A share of the boolean columns is
/// derived from an earlier one (implied by it, or excluding it) so the
/// implication graph has structure. Duplicate rows are dropped, and a
/// column that never shows "Yes" is patched so no feature is dead.
inline Sample random_sample(std::uint64_t seed, std::size_t max_v, std::size_t max_c, std::size_t max_d) {
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    std::size_t v = pick(1, max_v), c = pick(1, max_c), d = pick(2, std::max<std::size_t>(2, max_d));
    enum Kind { Bool, Enum, Num, Text };
    std::vector<Kind> kinds;
    std::vector<int> derive_from(v, -1);
    std::vector<int> derive_mode(v, 0);
    for (std::size_t j = 0; j < v; ++j) {
        auto r = pick(0, 9);
        kinds.push_back(r < 5 ? Bool : r < 6 ? Enum : r < 8 ? Num : Text);
        if (kinds[j] == Bool && j > 0 && pick(0, 2) == 0) {
            auto src = pick(0, j - 1);
            if (kinds[src] == Bool) {
                derive_from[j] = int(src);
                derive_mode[j] = int(pick(0, 1));
            }
        }
    }
    Sample s;
    for (std::size_t j = 0; j < v; ++j) s.matrix.variables.push_back("c" + std::to_string(j));
    std::set<afm::Row> seen;
    for (std::size_t i = 0; i < c; ++i) {
        afm::Row row;
        for (std::size_t j = 0; j < v; ++j) {
            switch (kinds[j]) {
                case Bool: {
                    bool on = pick(0, 1) == 1;
                    if (derive_from[j] >= 0) {
                        bool src = row[derive_from[j]].as_text() == "Yes";
                        // mode 0: j implies src; mode 1: j excludes src
                        if (derive_mode[j] == 0 && !src) on = false;
                        if (derive_mode[j] == 1 && src) on = false;
                    }
                    row.push_back(afm::CellValue::text(on ? "Yes" : "No"));
                    break;
                }
                case Enum: {
                    auto k = pick(0, d);
                    row.push_back(afm::CellValue::text(k == d ? "none" : "e" + std::to_string(j) + "_" + std::to_string(k)));
                    break;
                }
                case Num: row.push_back(afm::CellValue::integer(pick(0, d - 1))); break;
                case Text: row.push_back(afm::CellValue::text("t" + std::to_string(pick(0, d - 1)))); break;
            }
        }
        if (seen.insert(row).second) s.matrix.rows.push_back(std::move(row));
    }
    for (std::size_t j = 0; j < v; ++j) {
        afm::ColumnSpec spec;
        switch (kinds[j]) {
            case Bool:
                spec.kind = afm::ColumnKind::BooleanFeature;
                spec.present = {afm::CellValue::text("Yes")};
                spec.absent = {afm::CellValue::text("No")};
                break;
            case Enum:
                spec.kind = afm::ColumnKind::EnumeratedFeatures;
                spec.absent = {afm::CellValue::text("none")};
                break;
            default: spec.kind = afm::ColumnKind::Attribute;
        }
        s.dk.columns[s.matrix.variables[j]] = spec;
    }
    return s;
}

/// Every (i, j, u) -> S straight from the rows, i != j.
inline std::map<std::tuple<std::size_t, std::size_t, afm::CellValue>, std::set<afm::CellValue>>
oracle_implications(const afm::ConfigurationMatrix& m) {
    std::map<std::tuple<std::size_t, std::size_t, afm::CellValue>, std::set<afm::CellValue>> out;
    for (std::size_t i = 0; i < m.column_count(); ++i)
        for (std::size_t j = 0; j < m.column_count(); ++j) {
            if (i == j) continue;
            for (const auto& row : m.rows) out[{i, j, row[i]}].insert(row[j]);
        }
    return out;
}

/// Pipeline front half for group tests: table, graphs, hierarchy and
/// mandatory edges with heuristic answers.
struct Front {
    afm::VariableModel vm;
    afm::BISet bi;
    afm::ImplicationGraphs graphs;
    afm::RootedGraph rooted;
    afm::Hierarchy h;
    std::vector<bool> mandatory;
    afm::PresenceTable presence;
    afm::Digraph mutex;  // over rooted.features
};

inline Front front_half(const Sample& s) {
    Front f;
    auto provider = afm::default_provider(s.dk);
    f.vm = afm::extract_variables(s.matrix, *provider, s.dk);
    f.bi = afm::compute_binary_implications(f.vm.table, 1);
    f.graphs = afm::build_graphs(f.vm.table, f.vm.features.size(), f.bi);
    f.rooted = afm::ensure_rooted(f.graphs.big, f.vm, s.dk.root.value_or(afm::default_root_name(f.vm)));
    f.h = afm::extract_hierarchy(f.rooted, *provider);
    f.mandatory = afm::compute_mandatory(f.h, f.rooted.big);
    for (const auto& row : f.vm.table.rows) {
        std::vector<bool> sel(f.rooted.features.size(), true);
        for (std::size_t k = 0; k < f.vm.features.size(); ++k) sel[k] = row[k].as_flag();
        f.presence.rows.push_back(std::move(sel));
    }
    f.mutex = f.graphs.mutex.size() == f.rooted.features.size() ? f.graphs.mutex : f.graphs.mutex.with_extra_node();
    return f;
}

/// Non-mandatory children of p, by index.
inline std::vector<std::size_t> optional_children(const Front& f, std::size_t p) {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < f.h.parent.size(); ++c)
        if (f.h.parent[c] == p && !f.mandatory[c]) out.push_back(c);
    return out;
}

inline std::vector<std::vector<std::size_t>> subsets(const std::vector<std::size_t>& items, std::size_t min_size) {
    std::vector<std::vector<std::size_t>> out;
    for (std::uint32_t mask = 0; mask < (1u << items.size()); ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < items.size(); ++i)
            if (mask & (1u << i)) s.push_back(items[i]);
        if (s.size() >= min_size) out.push_back(s);
    }
    return out;
}

inline bool is_subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// Maximal sets (size >= 2) of optional siblings no row selects two of.
inline std::set<std::pair<std::size_t, std::vector<std::size_t>>> oracle_mutex_groups(const Front& f) {
    std::set<std::pair<std::size_t, std::vector<std::size_t>>> out;
    for (std::size_t p = 0; p < f.h.parent.size(); ++p) {
        auto kids = optional_children(f, p);
        std::vector<std::vector<std::size_t>> ok;
        for (auto& s : subsets(kids, 2)) {
            bool exclusive = std::all_of(f.presence.rows.begin(), f.presence.rows.end(), [&](const auto& row) {
                std::size_t n = 0;
                for (auto x : s) n += row[x];
                return n <= 1;
            });
            if (exclusive) ok.push_back(s);
        }
        for (const auto& s : ok) {
            bool maximal = std::none_of(ok.begin(), ok.end(),
                                        [&](const auto& t) { return t.size() > s.size() && is_subset(s, t); });
            if (maximal) out.insert({p, s});
        }
    }
    return out;
}

/// Minimal sets of optional siblings covering every row that selects the parent.
inline std::set<std::pair<std::size_t, std::vector<std::size_t>>> oracle_or_groups(const Front& f) {
    std::set<std::pair<std::size_t, std::vector<std::size_t>>> out;
    for (std::size_t p = 0; p < f.h.parent.size(); ++p) {
        auto kids = optional_children(f, p);
        std::vector<std::vector<std::size_t>> ok;
        for (auto& s : subsets(kids, 1)) {
            bool covers = std::all_of(f.presence.rows.begin(), f.presence.rows.end(), [&](const auto& row) {
                if (!row[p]) return true;
                return std::any_of(s.begin(), s.end(), [&](std::size_t x) { return bool(row[x]); });
            });
            if (covers) ok.push_back(s);
        }
        for (const auto& s : ok) {
            bool minimal = std::none_of(ok.begin(), ok.end(),
                                        [&](const auto& t) { return t.size() < s.size() && is_subset(t, s); });
            if (minimal && s.size() >= 2) out.insert({p, s});
        }
    }
    return out;
}

inline std::set<std::pair<std::size_t, std::vector<std::size_t>>> as_set(const std::vector<afm::FeatureGroup>& gs) {
    std::set<std::pair<std::size_t, std::vector<std::size_t>>> out;
    for (const auto& g : gs) out.insert({g.parent, g.children});
    return out;
}

}  // namespace testkit
