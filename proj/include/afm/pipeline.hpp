#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "afm/constraints.hpp"
#include "afm/knowledge.hpp"
#include "afm/matrix.hpp"
#include "afm/model.hpp"
#include "afm/variables.hpp"

namespace afm {

struct SynthesisOptions {
    bool or_groups = false;
    std::chrono::milliseconds or_budget{10000};
    bool phi = true;
    ConstraintOptions constraints;
    /// Workers for the implication stage; 0 reads AFM_FORGE_THREADS.
    unsigned threads = 0;
};

struct PhaseTiming {
    std::string phase;
    double ms = 0;
};

struct SynthesisResult {
    AttributedFeatureModel model;
    VariableModel variables;
    std::vector<PhaseTiming> phases;
    double total_ms = 0;
    std::size_t implication_count = 0;
};

/// Phase names, in execution order.
const std::vector<std::string>& phase_names();

/// Runs every synthesis stage. Questions reach `provider` in a fixed order:
/// column classification, root, parents, placements, groups, bounds.
/// Every answer is recorded in the model's provenance.
SynthesisResult synthesize(const ConfigurationMatrix& matrix, DecisionProvider& provider, const DomainKnowledge& dk,
                           const SynthesisOptions& options = {});
SynthesisResult synthesize(const ConfigurationMatrix& matrix, const DomainKnowledge& dk,
                           const SynthesisOptions& options = {});

/// Records every question and answer passing through to `inner`.
class RecordingProvider : public DecisionProvider {
public:
    explicit RecordingProvider(DecisionProvider& inner) : inner_(inner) {}
    std::string decide(const Question& question) override;
    const Transcript& transcript() const noexcept { return transcript_; }

private:
    DecisionProvider& inner_;
    Transcript transcript_;
};

}  // namespace afm
