#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "afm/matrix.hpp"

namespace afm {

enum class ColumnKind { Identifier, BooleanFeature, EnumeratedFeatures, Attribute };

std::string to_string(ColumnKind kind);
std::optional<ColumnKind> parse_column_kind(std::string_view text);

struct ColumnSpec {
    std::optional<ColumnKind> kind;
    /// Cell values meaning "feature selected" / "feature deselected".
    std::vector<CellValue> present;
    std::vector<CellValue> absent;
};

struct AttributeSpec {
    std::optional<CellValue> null_value;
    /// Explicit value ranking, lowest first.
    std::optional<std::vector<CellValue>> order;
};

struct InterestingValue {
    std::string attribute;
    std::uint64_t bound = 0;
    friend bool operator==(const InterestingValue&, const InterestingValue&) = default;
};

/// Everything the synthesis may be told up front. Every entry is optional;
/// what is missing is asked of a DecisionProvider.
struct DomainKnowledge {
    std::map<std::string, ColumnSpec> columns;
    std::optional<std::string> root;
    std::map<std::string, std::string> hierarchy;   // child -> parent
    std::map<std::string, AttributeSpec> attributes;
    std::map<std::string, std::string> placements;  // attribute -> feature
    std::vector<std::vector<std::string>> groups;   // preferred groups, in priority order
    std::optional<std::vector<InterestingValue>> interesting_values;
};

/// Parses the JSON domain-knowledge document. Throws Error{"knowledge",
/// "SchemaError"} naming the offending path.
DomainKnowledge load_dk(std::string_view json_text);
std::string dump_dk(const DomainKnowledge& dk);

enum class QuestionKind { ClassifyColumn, ChooseRoot, ChooseParent, ChoosePlace, ChooseGroup, ConfirmBounds };

std::string to_string(QuestionKind kind);
std::optional<QuestionKind> parse_question_kind(std::string_view text);

/// One decision point. Answers are strings drawn from `candidates`, except
/// ChooseRoot (any name; a name that is not a candidate creates a synthetic
/// root) and ConfirmBounds (a comma-separated list of natural numbers).
struct Question {
    QuestionKind kind{};
    std::string subject;
    std::vector<std::string> candidates;
    /// ClassifyColumn: the observed values. ConfirmBounds: the domain.
    std::vector<std::string> context;
    /// ChooseGroup: members of each candidate, aligned with `candidates`.
    std::vector<std::vector<std::string>> group_members;

    friend bool operator==(const Question&, const Question&) = default;
};

struct Decision {
    Question question;
    std::string answer;
    friend bool operator==(const Decision&, const Decision&) = default;
};

using Transcript = std::vector<Decision>;

class DecisionProvider {
public:
    virtual ~DecisionProvider() = default;

    ColumnKind classify_column(const std::string& column, const std::vector<CellValue>& observed);
    std::string choose_root(const std::vector<std::string>& core_features, const std::string& default_name);
    std::string choose_parent(const std::string& feature, const std::vector<std::string>& candidates);
    std::string choose_place(const std::string& attribute, const std::vector<std::string>& candidates);
    std::size_t choose_group(const std::string& parent, const std::vector<std::string>& labels,
                             const std::vector<std::vector<std::string>>& members);
    std::vector<std::uint64_t> confirm_bounds(const std::string& attribute, const std::vector<CellValue>& domain);

    /// Generic entry point; the typed helpers above build the Question.
    virtual std::string decide(const Question& question) = 0;
};

/// Fixed heuristics: columns named id, identifier, name or product are
/// identifiers, numeric columns become attributes, yes/no columns
/// boolean features, other text columns enumerated features; every
/// selection question takes the first (best-ranked) candidate; bounds are
/// the lower median of the domain.
class HeuristicProvider : public DecisionProvider {
public:
    std::string decide(const Question& question) override;
};

/// Answers from the domain knowledge when it covers the question, otherwise
/// delegates to `fallback`.
class KnowledgeProvider : public DecisionProvider {
public:
    KnowledgeProvider(DomainKnowledge dk, std::shared_ptr<DecisionProvider> fallback);
    std::string decide(const Question& question) override;
    const DomainKnowledge& knowledge() const noexcept { return dk_; }

private:
    DomainKnowledge dk_;
    std::shared_ptr<DecisionProvider> fallback_;
};

/// Replays a recorded transcript; questions beyond it go to `fallback`.
/// Throws Error{"knowledge","TranscriptMismatch"} when a recorded entry does
/// not match the question being asked.
class ReplayProvider : public DecisionProvider {
public:
    ReplayProvider(Transcript transcript, std::shared_ptr<DecisionProvider> fallback);
    std::string decide(const Question& question) override;
    std::size_t consumed() const noexcept { return next_; }

private:
    Transcript transcript_;
    std::shared_ptr<DecisionProvider> fallback_;
    std::size_t next_ = 0;
};

/// Raised by PendingProvider when a question has no answer yet.
struct PendingQuestion {
    Question question;
};

/// Throws PendingQuestion for every question. Used behind a ReplayProvider
/// to drive step-by-step sessions.
class PendingProvider : public DecisionProvider {
public:
    std::string decide(const Question& question) override;
};

/// The default provider: domain knowledge first, heuristics for the rest.
std::shared_ptr<DecisionProvider> default_provider(const DomainKnowledge& dk);

/// Natural numbers from a bounds answer ("10,20"). Empty text gives no bounds.
std::vector<std::uint64_t> parse_bounds(std::string_view answer);
std::string format_bounds(const std::vector<std::uint64_t>& bounds);

/// Token heuristics shared by extraction and the provider.
bool is_presence_token(const CellValue& v);
bool is_absence_token(const CellValue& v);

std::string group_label(const std::string& kind, const std::vector<std::string>& members);

}  // namespace afm
