#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "afm/knowledge.hpp"
#include "afm/matrix.hpp"
#include "afm/variables.hpp"

namespace afm {

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

/// Rooted tree over feature indices; parent[root] == kNoParent.
struct Hierarchy {
    std::size_t root = 0;
    std::vector<std::size_t> parent;

    std::vector<std::size_t> children(std::size_t f) const;
    std::size_t depth(std::size_t f) const;
    /// f itself, then its parent, up to the root.
    std::vector<std::size_t> ancestors_or_self(std::size_t f) const;
    /// Root first; siblings in index order.
    std::vector<std::size_t> preorder() const;

    friend bool operator==(const Hierarchy&, const Hierarchy&) = default;
};

enum class GroupKind { Mutex, Or, Xor };
std::string to_string(GroupKind kind);
std::optional<GroupKind> parse_group_kind(std::string_view text);

struct FeatureGroup {
    GroupKind kind = GroupKind::Mutex;
    std::size_t parent = 0;
    std::vector<std::size_t> children;  // ascending

    friend bool operator==(const FeatureGroup&, const FeatureGroup&) = default;
};

enum class RelOp { Eq, Le, Ge, Lt, Gt };
std::string to_string(RelOp op);
bool rel_holds(RelOp op, std::uint64_t value, std::uint64_t literal);

/// feature | !feature | attribute OP literal
struct BoolFactor {
    enum class Kind { Feature, NotFeature, Relation };
    Kind kind = Kind::Feature;
    std::string name;
    RelOp op = RelOp::Eq;
    CellValue literal;

    static BoolFactor feature(std::string name) { return {Kind::Feature, std::move(name), RelOp::Eq, {}}; }
    static BoolFactor not_feature(std::string name) { return {Kind::NotFeature, std::move(name), RelOp::Eq, {}}; }
    static BoolFactor relation(std::string attribute, RelOp op, CellValue literal) {
        return {Kind::Relation, std::move(attribute), op, std::move(literal)};
    }

    friend bool operator==(const BoolFactor&, const BoolFactor&) = default;
};

/// left => right
struct ReadableConstraint {
    BoolFactor left;
    BoolFactor right;
    friend bool operator==(const ReadableConstraint&, const ReadableConstraint&) = default;
};

/// "requires", "excludes", "or" (!a => b) or "complex".
std::string constraint_category(const ReadableConstraint& rc);

std::string render_constraint(const ReadableConstraint& rc);
/// Inverse of render_constraint. Throws Error{"constraints","ParseError"}.
ReadableConstraint parse_constraint(std::string_view text);
/// Identifier or textual literal, quoted when needed.
std::string render_name(const std::string& name);

/// Disjunction over rows of conjunctions `column = value`.
struct ResidualConstraint {
    std::vector<std::string> columns;
    std::vector<Row> rows;
    friend bool operator==(const ResidualConstraint&, const ResidualConstraint&) = default;
};

struct AttributeDecl {
    std::string name;
    Domain domain;
    std::size_t host = 0;               // α
    std::vector<std::uint64_t> bounds;  // interesting values, ascending
};

struct DiscardedGroup {
    FeatureGroup group;
    std::string reason;
    friend bool operator==(const DiscardedGroup&, const DiscardedGroup&) = default;
};

struct StageRecord {
    std::string stage;
    std::string input_hash;  // FNV-1a, hex
    std::string summary;
};

struct Provenance {
    Transcript decisions;
    std::vector<DiscardedGroup> discarded_groups;
    std::vector<StageRecord> stages;
    bool or_groups = false;
    bool or_groups_timed_out = false;
};

struct AttributedFeatureModel {
    std::vector<std::string> features;
    Hierarchy hierarchy;
    std::vector<bool> mandatory;  // edge feature -> parent is mandatory
    std::vector<FeatureGroup> groups;
    std::vector<AttributeDecl> attributes;
    std::vector<ReadableConstraint> constraints;
    std::optional<ResidualConstraint> phi;
    std::vector<ColumnBinding> columns;
    Provenance provenance;

    std::optional<std::size_t> find_feature(std::string_view name) const;
    std::optional<std::size_t> find_attribute(std::string_view name) const;
    const std::string& root_name() const { return features[hierarchy.root]; }
    std::vector<FeatureGroup> groups_of(GroupKind kind) const;
    /// Throws Error{"pipeline","InvalidModel"} when a structural invariant fails.
    void check_structure() const;
};

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace afm
