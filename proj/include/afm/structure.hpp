#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "afm/implications.hpp"
#include "afm/knowledge.hpp"
#include "afm/model.hpp"
#include "afm/variables.hpp"

namespace afm {

/// The BIG over F plus its root. When the root is synthetic it is the last
/// node and `features` gains its name.
struct RootedGraph {
    std::vector<std::string> features;
    Digraph big;
    std::size_t root = 0;
    bool synthetic = false;
    std::vector<bool> core;  // selected in every configuration
};

/// Features selected in every row of the derived table.
std::vector<bool> core_features(const VariableModel& vm);

/// Adds the root. `root_name` naming a core feature reuses that feature;
/// any other unused name creates a synthetic root implied by every
/// feature. Core features also get root -> f edges. Throws
/// Error{"structure","IllegalRoot"} for a non-core feature or an attribute name.
RootedGraph ensure_rooted(const Digraph& big, const VariableModel& vm, const std::string& root_name);

/// Fresh root name that collides with no feature or attribute.
std::string default_root_name(const VariableModel& vm);

/// Candidate parents of f, best first (descending BIG out-degree, then name).
std::vector<std::size_t> parent_candidates(const RootedGraph& g, std::size_t f);

/// Order in which parents are asked for: descending out-degree, then name.
std::vector<std::size_t> parent_question_order(const RootedGraph& g);

/// Spanning tree of the BIG chosen through the provider. Throws
/// Error{"structure","IllegalParent"} for answers outside the candidates.
Hierarchy extract_hierarchy(const RootedGraph& g, DecisionProvider& provider);

/// For each attribute (in vm order), the features f such that every row
/// deselecting f holds the null value. Indices refer to g.features.
std::vector<std::vector<std::size_t>> legal_attribute_places(const BISet& bi, const VariableModel& vm,
                                                            const RootedGraph& g);

/// α chosen through the provider; candidates sorted deepest first, then by
/// name. Throws Error{"structure","IllegalPlacement"}.
std::vector<std::size_t> place_attributes(const std::vector<std::vector<std::size_t>>& legal,
                                          const VariableModel& vm, const RootedGraph& g, const Hierarchy& h,
                                          DecisionProvider& provider);

}  // namespace afm
