#pragma once

#include <string>
#include <string_view>

#include "afm/model.hpp"

namespace afm {

/// AFM document with sections features, hierarchy, mandatory, groups,
/// attributes, constraints, phi (when present), columns and provenance.
/// Output is byte-stable for equal models.
std::string to_json(const AttributedFeatureModel& model);
/// Throws Error{"serialize","SchemaError"}.
AttributedFeatureModel from_json(std::string_view text);

/// Indented tree with groups, attributes and the constraint list.
std::string to_text(const AttributedFeatureModel& model);

/// Transcript as a JSON array of {kind, subject, candidates, answer}.
std::string transcript_to_json(const Transcript& t);
Transcript transcript_from_json(std::string_view text);

}  // namespace afm
