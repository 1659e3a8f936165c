#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "afm/matrix.hpp"

namespace afm {

/// Column i = u implies column j in S, with u and S given as value codes
/// into the column domains of the BISet that owns the entry.
struct BinaryImplication {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    std::uint32_t u = 0;
    std::uint32_t offset = 0;  // into BISet's code pool
    std::uint32_t count = 0;
};

class BISet {
public:
    BISet() = default;

    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<BinaryImplication>& entries() const noexcept { return entries_; }

    /// Column domains in first-occurrence order; codes index these.
    const std::vector<std::vector<CellValue>>& domains() const noexcept { return domains_; }
    std::size_t column_count() const noexcept { return domains_.size(); }
    std::optional<std::uint32_t> code(std::size_t column, const CellValue& v) const;
    const CellValue& value(std::size_t column, std::uint32_t code) const { return domains_[column][code]; }

    /// Codes of S for the entry, ascending.
    std::vector<std::uint32_t> codes(const BinaryImplication& e) const;
    const std::uint32_t* codes_begin(const BinaryImplication& e) const { return pool_.data() + e.offset; }
    const std::uint32_t* codes_end(const BinaryImplication& e) const { return pool_.data() + e.offset + e.count; }
    std::vector<CellValue> values(const BinaryImplication& e) const;

    /// Entry for (i, j, u) or nullptr.
    const BinaryImplication* find(std::size_t i, std::size_t j, std::uint32_t u) const;
    const BinaryImplication* find(std::size_t i, std::size_t j, const CellValue& u) const;

    /// Removes an entry (test hook for the comprehensiveness checker).
    void erase(std::size_t index);
    /// Replaces S of an entry (test hook for the validity checker).
    void set_values(std::size_t index, const std::vector<CellValue>& s);

    /// Line-oriented dump `i<TAB>j<TAB>u<TAB>{s1,s2}`, sorted.
    std::string dump() const;

private:
    friend BISet compute_binary_implications(const ConfigurationMatrix& matrix, unsigned threads);
    void rebuild_index();

    std::vector<std::vector<CellValue>> domains_;
    std::vector<std::unordered_map<CellValue, std::uint32_t, CellValueHash>> codes_;
    std::vector<BinaryImplication> entries_;
    std::vector<std::uint32_t> pool_;
    // (i * N + j) -> first entry index, entries of a pair are indexed by u.
    std::vector<std::int64_t> pair_start_;
    bool dense_ = true;
    std::unordered_map<std::uint64_t, std::size_t> sparse_;
};

/// All binary implications of the matrix, entries ordered by (i, j, u).
/// `threads` = 0 reads AFM_FORGE_THREADS (default 1).
BISet compute_binary_implications(const ConfigurationMatrix& matrix, unsigned threads = 0);

bool bi_valid(const BISet& bi, const ConfigurationMatrix& matrix);
bool bi_comprehensive(const BISet& bi, const ConfigurationMatrix& matrix);

/// Dense adjacency over n nodes.
class Digraph {
public:
    Digraph() = default;
    explicit Digraph(std::size_t n) : n_(n), adj_(n * n, 0) {}

    std::size_t size() const noexcept { return n_; }
    bool has(std::size_t a, std::size_t b) const { return adj_[a * n_ + b] != 0; }
    void set(std::size_t a, std::size_t b, bool on = true) { adj_[a * n_ + b] = on ? 1 : 0; }
    std::size_t out_degree(std::size_t a) const;
    std::size_t edge_count() const;
    /// Copy with one extra node appended.
    Digraph with_extra_node() const;

    friend bool operator==(const Digraph&, const Digraph&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> adj_;
};

struct ImplicationGraphs {
    Digraph big;    // a -> b: every configuration selecting a selects b
    Digraph mutex;  // symmetric: no configuration selects both
};

/// BIG and mutex graph over the first `feature_count` columns of `table`,
/// which hold presence flags. `bi` must be computed over `table`.
ImplicationGraphs build_graphs(const ConfigurationMatrix& table, std::size_t feature_count, const BISet& bi);

/// Worker count from AFM_FORGE_THREADS (>= 1).
unsigned configured_threads();

}  // namespace afm
