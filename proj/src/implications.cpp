#include "afm/implications.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace afm {

namespace {

std::uint64_t sparse_key(std::size_t i, std::size_t j, std::uint32_t u) {
    return (static_cast<std::uint64_t>(i) << 44) ^ (static_cast<std::uint64_t>(j) << 24) ^ u;
}

struct PairBlock {
    std::vector<BinaryImplication> entries;
    std::vector<std::uint32_t> pool;
};

}  // namespace

unsigned configured_threads() {
    if (const char* env = std::getenv("AFM_FORGE_THREADS")) {
        auto v = CellValue::parse_natural(env);
        if (v && *v > 0) {
            unsigned hw = std::max(1u, std::thread::hardware_concurrency());
            return static_cast<unsigned>(std::min<std::uint64_t>(*v, hw));
        }
    }
    return 1;
}

std::optional<std::uint32_t> BISet::code(std::size_t column, const CellValue& v) const {
    if (column >= codes_.size()) return std::nullopt;
    auto it = codes_[column].find(v);
    if (it == codes_[column].end()) return std::nullopt;
    return it->second;
}

std::vector<std::uint32_t> BISet::codes(const BinaryImplication& e) const {
    return {codes_begin(e), codes_end(e)};
}

std::vector<CellValue> BISet::values(const BinaryImplication& e) const {
    std::vector<CellValue> out;
    for (auto p = codes_begin(e); p != codes_end(e); ++p) out.push_back(domains_[e.j][*p]);
    return out;
}

const BinaryImplication* BISet::find(std::size_t i, std::size_t j, std::uint32_t u) const {
    std::size_t n = domains_.size();
    if (i >= n || j >= n) return nullptr;
    if (dense_) {
        auto start = pair_start_[i * n + j];
        if (start < 0 || u >= domains_[i].size()) return nullptr;
        return &entries_[static_cast<std::size_t>(start) + u];
    }
    auto it = sparse_.find(sparse_key(i, j, u));
    return it == sparse_.end() ? nullptr : &entries_[it->second];
}

const BinaryImplication* BISet::find(std::size_t i, std::size_t j, const CellValue& u) const {
    auto c = code(i, u);
    return c ? find(i, j, *c) : nullptr;
}

void BISet::rebuild_index() {
    std::size_t n = domains_.size();
    pair_start_.assign(n * n, -1);
    sparse_.clear();
    dense_ = true;
    std::size_t k = 0;
    while (k < entries_.size() && dense_) {
        const auto& e = entries_[k];
        std::size_t d = domains_[e.i].size();
        if (pair_start_[e.i * n + e.j] != -1 || k + d > entries_.size()) {
            dense_ = false;
            break;
        }
        for (std::uint32_t u = 0; u < d; ++u) {
            const auto& x = entries_[k + u];
            if (x.i != e.i || x.j != e.j || x.u != u) {
                dense_ = false;
                break;
            }
        }
        pair_start_[e.i * n + e.j] = static_cast<std::int64_t>(k);
        k += d;
    }
    if (!dense_)
        for (std::size_t idx = 0; idx < entries_.size(); ++idx) {
            const auto& e = entries_[idx];
            sparse_[sparse_key(e.i, e.j, e.u)] = idx;
        }
}

void BISet::erase(std::size_t index) {
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(index));
    rebuild_index();
}

void BISet::set_values(std::size_t index, const std::vector<CellValue>& s) {
    auto& e = entries_[index];
    std::vector<std::uint32_t> codes;
    for (const auto& v : s) {
        auto it = codes_[e.j].find(v);
        if (it == codes_[e.j].end()) {
            it = codes_[e.j].emplace(v, static_cast<std::uint32_t>(domains_[e.j].size())).first;
            domains_[e.j].push_back(v);
        }
        codes.push_back(it->second);
    }
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    e.offset = static_cast<std::uint32_t>(pool_.size());
    e.count = static_cast<std::uint32_t>(codes.size());
    pool_.insert(pool_.end(), codes.begin(), codes.end());
}

std::string BISet::dump() const {
    struct Line {
        std::uint32_t i, j;
        std::string u, s;
    };
    std::vector<Line> lines;
    for (const auto& e : entries_) {
        std::vector<std::string> vals;
        for (auto p = codes_begin(e); p != codes_end(e); ++p) vals.push_back(domains_[e.j][*p].to_string());
        std::sort(vals.begin(), vals.end());
        std::string s = "{";
        for (std::size_t k = 0; k < vals.size(); ++k) s += (k ? "," : "") + vals[k];
        lines.push_back({e.i, e.j, domains_[e.i][e.u].to_string(), s + "}"});
    }
    std::sort(lines.begin(), lines.end(),
              [](const Line& a, const Line& b) { return std::tie(a.i, a.j, a.u) < std::tie(b.i, b.j, b.u); });
    std::string out;
    for (const auto& l : lines)
        out += std::to_string(l.i) + "\t" + std::to_string(l.j) + "\t" + l.u + "\t" + l.s + "\n";
    return out;
}

BISet compute_binary_implications(const ConfigurationMatrix& matrix, unsigned threads) {
    BISet bi;
    std::size_t n = matrix.column_count();
    std::size_t m = matrix.row_count();
    bi.domains_.resize(n);
    bi.codes_.resize(n);

    // Encode every column to dense value codes.
    std::vector<std::vector<std::uint32_t>> enc(n, std::vector<std::uint32_t>(m));
    for (std::size_t j = 0; j < n; ++j) {
        auto& map = bi.codes_[j];
        for (std::size_t k = 0; k < m; ++k) {
            const auto& v = matrix.rows[k][j];
            auto [it, fresh] = map.emplace(v, static_cast<std::uint32_t>(bi.domains_[j].size()));
            if (fresh) bi.domains_[j].push_back(v);
            enc[j][k] = it->second;
        }
    }

    auto work = [&](std::size_t i, PairBlock& block) {
        std::size_t di = bi.domains_[i].size();
        // Rows grouped by their value in column i.
        std::vector<std::vector<std::uint32_t>> rows_of(di);
        for (std::size_t k = 0; k < m; ++k) rows_of[enc[i][k]].push_back(static_cast<std::uint32_t>(k));
        std::vector<std::uint32_t> stamp;
        std::uint32_t tick = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            stamp.assign(bi.domains_[j].size(), 0);
            const auto& col = enc[j];
            for (std::uint32_t u = 0; u < di; ++u) {
                ++tick;
                auto offset = block.pool.size();
                for (auto k : rows_of[u]) {
                    auto c = col[k];
                    if (stamp[c] != tick) {
                        stamp[c] = tick;
                        block.pool.push_back(c);
                    }
                }
                std::sort(block.pool.begin() + static_cast<std::ptrdiff_t>(offset), block.pool.end());
                block.entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), u,
                                         static_cast<std::uint32_t>(offset),
                                         static_cast<std::uint32_t>(block.pool.size() - offset)});
            }
        }
    };

    std::vector<PairBlock> blocks(n);
    unsigned workers = threads ? threads : configured_threads();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i, blocks[i]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) work(i, blocks[i]);
            });
        for (auto& t : pool) t.join();
    }

    std::size_t total_entries = 0, total_pool = 0;
    for (const auto& b : blocks) {
        total_entries += b.entries.size();
        total_pool += b.pool.size();
    }
    bi.entries_.reserve(total_entries);
    bi.pool_.reserve(total_pool);
    for (auto& b : blocks) {
        auto base = static_cast<std::uint32_t>(bi.pool_.size());
        for (auto e : b.entries) {
            e.offset += base;
            bi.entries_.push_back(e);
        }
        bi.pool_.insert(bi.pool_.end(), b.pool.begin(), b.pool.end());
    }
    bi.rebuild_index();
    return bi;
}

bool bi_valid(const BISet& bi, const ConfigurationMatrix& matrix) {
    for (const auto& e : bi.entries()) {
        if (e.i >= matrix.column_count() || e.j >= matrix.column_count()) return false;
        const auto& u = bi.value(e.i, e.u);
        auto s = bi.values(e);
        for (const auto& row : matrix.rows)
            if (row[e.i] == u && std::find(s.begin(), s.end(), row[e.j]) == s.end()) return false;
    }
    return true;
}

bool bi_comprehensive(const BISet& bi, const ConfigurationMatrix& matrix) {
    std::size_t n = matrix.column_count();
    for (const auto& row : matrix.rows)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && !bi.find(i, j, row[i])) return false;
    return true;
}

std::size_t Digraph::out_degree(std::size_t a) const {
    std::size_t d = 0;
    for (std::size_t b = 0; b < n_; ++b) d += adj_[a * n_ + b];
    return d;
}

std::size_t Digraph::edge_count() const {
    std::size_t c = 0;
    for (auto x : adj_) c += x;
    return c;
}

Digraph Digraph::with_extra_node() const {
    Digraph g(n_ + 1);
    for (std::size_t a = 0; a < n_; ++a)
        for (std::size_t b = 0; b < n_; ++b)
            if (has(a, b)) g.set(a, b);
    return g;
}

ImplicationGraphs build_graphs(const ConfigurationMatrix& table, std::size_t feature_count, const BISet& bi) {
    ImplicationGraphs g{Digraph(feature_count), Digraph(feature_count)};
    const auto on = CellValue::flag(true);
    for (std::size_t a = 0; a < feature_count; ++a) {
        auto u = bi.code(a, on);
        if (!u) continue;  // dead feature: no implication is recorded
        for (std::size_t b = 0; b < feature_count; ++b) {
            if (a == b) continue;
            const auto* e = bi.find(a, b, *u);
            if (!e) continue;
            bool all_on = true, all_off = true;
            for (auto p = bi.codes_begin(*e); p != bi.codes_end(*e); ++p) {
                bool v = bi.value(b, *p).as_flag();
                all_on = all_on && v;
                all_off = all_off && !v;
            }
            if (all_on) g.big.set(a, b);
            if (all_off) g.mutex.set(a, b);
        }
    }
    (void)table;
    return g;
}

}  // namespace afm
