#include "afm/variables.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "afm/error.hpp"

namespace afm {

namespace {

constexpr const char* kStage = "variables";

bool listed(const std::vector<CellValue>& list, const CellValue& v) {
    return std::any_of(list.begin(), list.end(), [&](const CellValue& x) { return same_value(x, v); });
}

// Resolves a dk-provided value against the column's own cells.
CellValue resolve(const CellValue& v, const std::vector<CellValue>& domain, bool numeric) {
    for (const auto& d : domain)
        if (same_value(d, v)) return d;
    if (numeric) {
        if (auto n = CellValue::parse_natural(v.to_string())) return CellValue::integer(*n);
    }
    return v.is_text() ? v : CellValue::text(v.to_string());
}

CellValue default_null(const std::vector<CellValue>& domain, bool numeric) {
    if (numeric) {
        std::uint64_t hi = 0;
        for (const auto& v : domain) {
            if (v.as_integer() == 0) return v;
            hi = std::max(hi, v.as_integer());
        }
        return CellValue::integer(hi + 1);
    }
    for (const auto& v : domain)
        if (is_absence_token(v)) return v;
    std::string sentinel = "null";
    while (listed(domain, CellValue::text(sentinel))) sentinel = "_" + sentinel + "_";
    return CellValue::text(sentinel);
}

}  // namespace

bool same_value(const CellValue& a, const CellValue& b) {
    if (a.kind() == b.kind()) return a == b;
    return a.to_string() == b.to_string();
}

bool Domain::contains(const CellValue& v) const { return listed(values, v); }

std::optional<std::size_t> VariableModel::find_feature(std::string_view name) const {
    auto it = std::find(features.begin(), features.end(), name);
    if (it == features.end()) return std::nullopt;
    return static_cast<std::size_t>(it - features.begin());
}

std::optional<std::size_t> VariableModel::find_attribute(std::string_view name) const {
    auto it = std::find(attributes.begin(), attributes.end(), name);
    if (it == attributes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - attributes.begin());
}

std::optional<bool> binding_presence(const ColumnBinding& b, const CellValue& v) {
    switch (b.kind) {
        case ColumnKind::BooleanFeature:
            if (listed(b.present, v)) return true;
            if (listed(b.absent, v)) return false;
            return std::nullopt;
        case ColumnKind::EnumeratedFeatures:
            if (listed(b.absent, v)) return false;
            for (const auto& [value, child] : b.children)
                if (same_value(value, v)) return true;
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

VariableModel extract_variables(const ConfigurationMatrix& matrix, const DomainKnowledge& dk) {
    auto provider = default_provider(dk);
    return extract_variables(matrix, *provider, dk);
}

VariableModel extract_variables(const ConfigurationMatrix& matrix, DecisionProvider& provider,
                                const DomainKnowledge& dk) {
    matrix.validate();
    for (const auto& [name, spec] : dk.columns)
        if (!matrix.find_column(name))
            throw Error(kStage, "UnknownColumn", "domain knowledge describes column '" + name + "'");

    std::vector<ColumnKind> kinds;
    for (std::size_t j = 0; j < matrix.column_count(); ++j) {
        try {
            kinds.push_back(provider.classify_column(matrix.variables[j], column_domain(matrix, j)));
        } catch (const Error& e) {
            if (e.code() == "Unanswered") throw Error(kStage, "UnclassifiedColumn", matrix.variables[j]);
            throw;
        }
    }

    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < kinds.size(); ++j)
        if (kinds[j] != ColumnKind::Identifier) kept.push_back(j);
    if (kept.empty()) throw Error(kStage, "EmptyMatrix", "every column is an identifier");

    VariableModel vm;
    // Rows of a validated matrix are distinct already; only dropping columns can merge them.
    vm.source = kept.size() == matrix.column_count() ? matrix : matrix.project(kept);
    const auto& src = vm.source;

    std::set<std::string> taken(src.variables.begin(), src.variables.end());
    auto spec_of = [&](const std::string& column) -> const ColumnSpec* {
        auto it = dk.columns.find(column);
        return it == dk.columns.end() ? nullptr : &it->second;
    };

    // Per-source-column presence per row, used for the dead-feature check
    // and the derived table.
    struct FeatureSource {
        std::size_t column;
        std::optional<CellValue> value;  // enumerated child: its value; otherwise none
    };
    std::vector<FeatureSource> feature_sources;
    std::vector<std::size_t> attribute_sources;

    for (std::size_t j = 0; j < src.column_count(); ++j) {
        const auto& name = src.variables[j];
        auto kind = kinds[kept[j]];
        auto domain = column_domain(src, j);
        bool numeric = src.is_numeric_column(j);
        const ColumnSpec* spec = spec_of(name);
        ColumnBinding b;
        b.column = name;
        b.kind = kind;
        b.target = name;

        if (kind == ColumnKind::BooleanFeature) {
            bool has_present = spec && !spec->present.empty();
            bool has_absent = spec && !spec->absent.empty();
            for (const auto& v : domain) {
                bool p = has_present ? listed(spec->present, v) : false;
                bool a = has_absent ? listed(spec->absent, v) : false;
                if (!has_present && !has_absent) {
                    p = is_presence_token(v);
                    a = is_absence_token(v);
                } else if (!has_present) {
                    p = !a;
                } else if (!has_absent) {
                    a = !p;
                }
                if (p == a)
                    throw Error(kStage, "AmbiguousPresenceMapping",
                                "value '" + v.to_string() + "' of column '" + name + "'");
                (p ? b.present : b.absent).push_back(v);
            }
            b.live = !b.present.empty();
            if (b.live) {
                vm.features.push_back(name);
                feature_sources.push_back({j, std::nullopt});
            }
        } else if (kind == ColumnKind::EnumeratedFeatures) {
            for (const auto& v : domain) {
                bool absent = spec && !spec->absent.empty() ? listed(spec->absent, v) : is_absence_token(v);
                if (spec && listed(spec->present, v)) absent = false;
                if (absent) b.absent.push_back(v);
            }
            b.live = b.absent.size() < domain.size();
            if (b.live) {
                vm.features.push_back(name);
                feature_sources.push_back({j, std::nullopt});
                for (const auto& v : domain) {
                    if (listed(b.absent, v)) continue;
                    std::string child = v.to_string();
                    if (taken.count(child)) child = name + "." + child;
                    while (taken.count(child)) child += "'";
                    taken.insert(child);
                    b.children.emplace_back(v, child);
                    vm.features.push_back(child);
                    feature_sources.push_back({j, v});
                }
            }
        } else {
            Domain d;
            d.values = domain;
            if (numeric) std::sort(d.values.begin(), d.values.end());
            d.numeric = numeric;
            auto ait = dk.attributes.find(name);
            const AttributeSpec* aspec = ait == dk.attributes.end() ? nullptr : &ait->second;
            d.null_value = aspec && aspec->null_value ? resolve(*aspec->null_value, domain, numeric)
                                                      : default_null(domain, numeric);
            if (aspec && aspec->order) {
                std::vector<CellValue> order;
                for (const auto& v : *aspec->order) order.push_back(resolve(v, domain, numeric));
                for (const auto& v : domain)
                    if (!listed(order, v))
                        throw Error(kStage, "IncompleteOrder",
                                    "order of '" + name + "' does not rank value '" + v.to_string() + "'");
                d.order = std::move(order);
            }
            vm.attributes.push_back(name);
            vm.domains.push_back(std::move(d));
            attribute_sources.push_back(j);
        }
        vm.bindings.push_back(std::move(b));
    }

    // Derived table.
    std::vector<Row> rows;
    rows.reserve(src.row_count());
    for (const auto& raw : src.rows) {
        Row r;
        r.reserve(feature_sources.size() + attribute_sources.size());
        for (const auto& fs : feature_sources) {
            const auto& cell = raw[fs.column];
            const auto& b = vm.bindings[fs.column];
            bool sel = fs.value ? same_value(*fs.value, cell) : binding_presence(b, cell).value_or(false);
            r.push_back(CellValue::flag(sel));
        }
        for (auto j : attribute_sources) r.push_back(raw[j]);
        rows.push_back(std::move(r));
    }
    vm.table.variables = vm.features;
    vm.table.variables.insert(vm.table.variables.end(), vm.attributes.begin(), vm.attributes.end());
    vm.table.rows = std::move(rows);
    std::vector<std::size_t> all(vm.table.column_count());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    vm.table = vm.table.project(all);

    // A null value outside the domain is only acceptable when its declared
    // host feature is never deselected.
    for (std::size_t a = 0; a < vm.attributes.size(); ++a) {
        const auto& d = vm.domains[a];
        auto ait = dk.attributes.find(vm.attributes[a]);
        if (ait == dk.attributes.end() || !ait->second.null_value || d.null_observed()) continue;
        auto pit = dk.placements.find(vm.attributes[a]);
        if (pit == dk.placements.end()) continue;
        auto f = vm.find_feature(pit->second);
        if (!f) continue;
        for (const auto& row : vm.table.rows)
            if (!row[*f].as_flag())
                throw Error(kStage, "NullValueNotInDomain",
                            "'" + d.null_value.to_string() + "' never occurs in '" + vm.attributes[a] +
                                "' although '" + pit->second + "' is deselected in some configuration");
    }
    return vm;
}

}  // namespace afm
