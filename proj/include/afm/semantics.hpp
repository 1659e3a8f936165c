#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "afm/matrix.hpp"
#include "afm/model.hpp"

namespace afm {

/// Selected features and one value per attribute, indexed like the model.
struct Configuration {
    std::vector<bool> selected;
    std::vector<CellValue> values;

    friend bool operator==(const Configuration&, const Configuration&) = default;
    friend bool operator<(const Configuration& a, const Configuration& b) {
        if (a.selected != b.selected) return a.selected < b.selected;
        return a.values < b.values;
    }
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;

/// Membership in the model's semantics. `with_phi` is ignored when the
/// model carries no Φ. Throws Error{"semantics","UnknownVariable"} when the
/// model refers to names it does not declare.
bool eval_config(const AttributedFeatureModel& model, const Configuration& cfg, bool with_phi = true);

/// Every valid configuration, sorted. Throws Error{"semantics","BudgetExceeded"}
/// when more than `budget` search nodes are needed.
std::vector<Configuration> enumerate_configurations(const AttributedFeatureModel& model, bool with_phi = true,
                                                    std::uint64_t budget = kDefaultEnumerationBudget);

/// The configuration a matrix row stands for, read through the model's
/// column bindings.
Configuration configuration_of_row(const AttributedFeatureModel& model, const ConfigurationMatrix& matrix,
                                   std::size_t row);
std::vector<Configuration> matrix_configurations(const AttributedFeatureModel& model,
                                                 const ConfigurationMatrix& matrix);

struct SemanticsReport {
    bool sound = false;
    bool complete = false;
    std::size_t model_count = 0;
    std::size_t matrix_count = 0;
    std::vector<Configuration> extra;    // in the model, not in the matrix
    std::vector<Configuration> missing;  // in the matrix, not in the model
};

SemanticsReport check_semantics(const AttributedFeatureModel& model, const ConfigurationMatrix& matrix,
                                bool with_phi = true, std::uint64_t budget = kDefaultEnumerationBudget);

enum class MutationClass { Mandatory, AddGroup, PromoteGroup, AddConstraint };
std::string to_string(MutationClass c);

struct MaximalityViolation {
    MutationClass mutation;
    std::string detail;
};

struct MaximalityReport {
    std::vector<MaximalityViolation> violations;
    /// Mutations examined per class, indexed by MutationClass.
    std::array<std::size_t, 4> examined{};
    /// False when the model was synthesized without or-groups (or their
    /// search timed out); or-group additions are then not examined.
    bool or_groups_audited = true;
    bool maximal() const { return violations.empty(); }
};

/// Tries every mutation of the four classes. A mutation is a violation
/// when it leaves the model's semantics unchanged; for added constraints
/// only those not already implied by the diagram count. Or-group additions
/// are only tried on models whose provenance records an or-group search.
MaximalityReport audit_maximality(const AttributedFeatureModel& model,
                                  std::uint64_t budget = kDefaultEnumerationBudget);

/// Same configuration sets, compared by feature and attribute names (the
/// root is ignored).
bool same_semantics(const AttributedFeatureModel& a, const AttributedFeatureModel& b,
                    std::uint64_t budget = kDefaultEnumerationBudget);

/// Equal hierarchy, mandatory edges, groups, placements and constraints.
bool structurally_equal(const AttributedFeatureModel& a, const AttributedFeatureModel& b);

std::string format_configuration(const AttributedFeatureModel& model, const Configuration& cfg);
std::string format_report(const AttributedFeatureModel& model, const SemanticsReport& report);
std::string format_report(const MaximalityReport& report);

}  // namespace afm
