#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "afm/knowledge.hpp"
#include "afm/matrix.hpp"

namespace afm {

/// Value set of an attribute plus its null value.
struct Domain {
    std::vector<CellValue> values;  // first-occurrence order
    CellValue null_value;
    bool numeric = false;
    /// Explicit ranking from the domain knowledge (textual domains are
    /// otherwise unordered). Kept for display; comparisons other than `=`
    /// are only ever emitted over numeric domains.
    std::optional<std::vector<CellValue>> order;

    bool contains(const CellValue& v) const;
    bool null_observed() const { return contains(null_value); }
};

/// How a source column maps onto features and attributes.
struct ColumnBinding {
    std::string column;
    ColumnKind kind = ColumnKind::Attribute;
    /// Boolean: the feature. Enumerated: the parent feature. Attribute: the attribute.
    std::string target;
    /// False when the target feature was discarded as dead.
    bool live = true;
    /// Boolean and enumerated columns: values read as "deselected".
    std::vector<CellValue> absent;
    /// Boolean columns: values read as "selected".
    std::vector<CellValue> present;
    /// Enumerated columns: value -> child feature.
    std::vector<std::pair<CellValue, std::string>> children;

    friend bool operator==(const ColumnBinding&, const ColumnBinding&) = default;
};

struct VariableModel {
    std::vector<std::string> features;
    std::vector<std::string> attributes;
    std::vector<Domain> domains;  // aligned with attributes
    std::vector<ColumnBinding> bindings;
    /// Input columns that were not classified as identifiers.
    ConfigurationMatrix source;
    /// Derived table: one flag column per feature, then one column per
    /// attribute. Duplicate rows are collapsed.
    ConfigurationMatrix table;

    std::optional<std::size_t> find_feature(std::string_view name) const;
    std::optional<std::size_t> find_attribute(std::string_view name) const;
    std::size_t attribute_column(std::size_t a) const { return features.size() + a; }
};

/// Classifies every column through `provider` and builds features,
/// attributes and domains. Presence tokens, null values and value orders
/// come from `dk` when given there.
VariableModel extract_variables(const ConfigurationMatrix& matrix, DecisionProvider& provider,
                                const DomainKnowledge& dk);
VariableModel extract_variables(const ConfigurationMatrix& matrix, const DomainKnowledge& dk);

/// Interprets one raw cell of a bound column. Returns nullopt when the
/// value belongs to no known category.
std::optional<bool> binding_presence(const ColumnBinding& binding, const CellValue& value);

/// Same value up to its display form ("10" matches 10).
bool same_value(const CellValue& a, const CellValue& b);

}  // namespace afm
