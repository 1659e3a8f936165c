#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <vector>

#include "afm/implications.hpp"
#include "afm/knowledge.hpp"
#include "afm/model.hpp"

namespace afm {

/// Presence of every feature per configuration, as used by the group
/// searches. rows[k][f] is true when configuration k selects f.
struct PresenceTable {
    std::vector<std::vector<bool>> rows;
};

std::vector<bool> compute_mandatory(const Hierarchy& h, const Digraph& big);

/// Maximal cliques (size >= 2) of `mutex` restricted to `nodes`, each
/// sorted ascending, the list sorted lexicographically.
std::vector<std::vector<std::size_t>> maximal_cliques(const Digraph& mutex, const std::vector<std::size_t>& nodes);

/// Non-mandatory children of p that are not excluded.
std::vector<std::size_t> free_children(const Hierarchy& h, const std::vector<bool>& mandatory, std::size_t p);

std::vector<FeatureGroup> compute_mutex_groups(const Digraph& mutex, const Hierarchy& h,
                                               const std::vector<bool>& mandatory);

struct OrGroupResult {
    std::vector<FeatureGroup> groups;
    bool timed_out = false;
};

/// Minimal covering subsets of `nodes` over the configurations that select
/// `parent`. Search stops at `deadline` and reports the timeout.
std::vector<std::vector<std::size_t>> minimal_covers(const PresenceTable& t, std::size_t parent,
                                                     const std::vector<std::size_t>& nodes,
                                                     std::chrono::steady_clock::time_point deadline, bool& timed_out);

OrGroupResult compute_or_groups(const PresenceTable& t, const Hierarchy& h, const std::vector<bool>& mandatory,
                                std::chrono::milliseconds budget);

/// True when every configuration selecting `parent` selects one of `children`.
bool parent_implies_disjunction(const PresenceTable& t, std::size_t parent, const std::vector<std::size_t>& children);

/// Mode A (or-groups given): groups present in both lists. Mode B: mutex
/// groups whose parent implies their disjunction.
std::vector<FeatureGroup> compute_xor_groups(const std::vector<FeatureGroup>& mutex_groups,
                                             const std::optional<std::vector<FeatureGroup>>& or_groups,
                                             const PresenceTable& t);

struct GroupSelection {
    std::vector<FeatureGroup> groups;  // kept, sorted by (parent, children)
    std::vector<DiscardedGroup> discarded;
    bool timed_out = false;
};

struct GroupOptions {
    bool or_groups = false;
    std::chrono::milliseconds budget{10000};
};

/// Computes candidates per parent, lets xor absorb coextensive mutex/or
/// candidates and resolves overlaps through the provider. Runs until no
/// candidate is left among the still ungrouped siblings, so the result is
/// non-overlapping and no further group fits.
GroupSelection finalize_groups(const PresenceTable& t, const Digraph& mutex, const Hierarchy& h,
                               const std::vector<bool>& mandatory, const std::vector<std::string>& names,
                               const GroupOptions& options, DecisionProvider& provider);

}  // namespace afm
