#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "afm/implications.hpp"
#include "afm/model.hpp"
#include "afm/variables.hpp"

namespace afm {

struct ConstraintOptions {
    /// Admit `attribute = text` for textual attributes (beyond the numeric
    /// literal grammar).
    bool textual_equality = true;
};

/// A relational expression over one attribute and the domain values
/// (positions into Domain::values) it accepts.
struct RelationCandidate {
    BoolFactor factor;
    std::vector<bool> accepts;
};

/// Every expression `attribute OP literal` allowed for the attribute:
/// numeric domains use the interesting bounds with all five operators,
/// textual domains use equality with each value. Expressions accepting the
/// same values are collapsed onto the preferred one (=, <=, >=, <, >, then
/// the smaller literal). Tautologies and unsatisfiable expressions are left out.
std::vector<RelationCandidate> relation_candidates(const std::string& attribute, const Domain& domain,
                                                   const std::vector<std::uint64_t>& bounds,
                                                   const ConstraintOptions& options);

/// Left-hand classes of an attribute for attribute-to-attribute merging:
/// u < k, u = k, u > k per bound (numeric), or one class per value (textual).
/// Empty classes are omitted.
std::vector<RelationCandidate> left_classes(const std::string& attribute, const Domain& domain,
                                            const std::vector<std::uint64_t>& bounds,
                                            const ConstraintOptions& options);

/// The minimal candidates accepting every value in `observed`.
std::vector<const RelationCandidate*> minimal_covering(const std::vector<RelationCandidate>& candidates,
                                                       const std::vector<bool>& observed);

/// BIG edges not already expressed by the hierarchy (child -> parent) or
/// by mandatory edges (parent -> child), transitively. Root is skipped.
std::vector<ReadableConstraint> compute_requires(const Digraph& big, const std::vector<std::string>& names,
                                                 const Hierarchy& h, const std::vector<bool>& mandatory);

/// Mutex edges not covered by a kept mutex or xor group between ancestors.
/// The feature with the lower index goes on the left.
std::vector<ReadableConstraint> compute_excludes(const Digraph& mutex, const std::vector<std::string>& names,
                                                 const Hierarchy& h, const std::vector<FeatureGroup>& groups);

/// `!a => b` for every valid pair of features that a two-member or/xor
/// group under an always-selected parent does not already state.
std::vector<ReadableConstraint> compute_disjunctions(const BISet& bi, const VariableModel& vm,
                                                     const std::vector<std::string>& names, const Hierarchy& h,
                                                     const std::vector<bool>& core,
                                                     const std::vector<FeatureGroup>& groups);

/// Feature -> attribute and attribute -> attribute constraints merged
/// from the binary implications. `bounds` is aligned with vm.attributes.
std::vector<ReadableConstraint> compute_complex(const BISet& bi, const VariableModel& vm,
                                                const std::vector<std::vector<std::uint64_t>>& bounds,
                                                const ConstraintOptions& options);

/// One disjunct per configuration of the source matrix.
ResidualConstraint compute_phi(const ConfigurationMatrix& source);

}  // namespace afm
