#include "afm/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <json.hpp>

#include "afm/error.hpp"

namespace afm {

using nlohmann::json;

namespace {

constexpr const char* kStage = "knowledge";

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

const std::set<std::string>& presence_words() {
    static const std::set<std::string> words{"yes", "y", "true", "x", "present", "supported", "full"};
    return words;
}

const std::set<std::string>& absence_words() {
    static const std::set<std::string> words{"no",   "n",      "false", "-",       "--",          "none",
                                             "n/a",  "na",     "null",  "absent", "unsupported", "nil"};
    return words;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw Error(kStage, "SchemaError", path + ": " + what);
}

CellValue cell_from_json(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return CellValue::integer(j.get<std::uint64_t>());
    if (j.is_number_integer()) {
        auto v = j.get<std::int64_t>();
        if (v < 0) schema_error(path, "numbers must be natural");
        return CellValue::integer(static_cast<std::uint64_t>(v));
    }
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s.empty()) schema_error(path, "empty value");
        if (auto n = CellValue::parse_natural(s)) return CellValue::integer(*n);
        return CellValue::text(s);
    }
    if (j.is_boolean()) return CellValue::flag(j.get<bool>());
    schema_error(path, "expected a string or a natural number");
}

json cell_to_json(const CellValue& v) {
    if (v.is_integer()) return v.as_integer();
    if (v.is_flag()) return v.as_flag();
    return v.as_text();
}

std::vector<CellValue> cells_from_json(const json& j, const std::string& path) {
    std::vector<CellValue> out;
    if (!j.is_array()) schema_error(path, "expected an array");
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(cell_from_json(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::map<std::string, std::string> string_map(const json& j, const std::string& path) {
    if (!j.is_object()) schema_error(path, "expected an object");
    std::map<std::string, std::string> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string()) schema_error(path + "." + it.key(), "expected a string");
        out[it.key()] = it.value().get<std::string>();
    }
    return out;
}

}  // namespace

std::string to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::Identifier: return "identifier";
        case ColumnKind::BooleanFeature: return "boolean-feature";
        case ColumnKind::EnumeratedFeatures: return "enumerated-features";
        case ColumnKind::Attribute: return "attribute";
    }
    return {};
}

std::optional<ColumnKind> parse_column_kind(std::string_view text) {
    for (auto k : {ColumnKind::Identifier, ColumnKind::BooleanFeature, ColumnKind::EnumeratedFeatures,
                   ColumnKind::Attribute})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::string to_string(QuestionKind kind) {
    switch (kind) {
        case QuestionKind::ClassifyColumn: return "classify_column";
        case QuestionKind::ChooseRoot: return "choose_root";
        case QuestionKind::ChooseParent: return "choose_parent";
        case QuestionKind::ChoosePlace: return "choose_place";
        case QuestionKind::ChooseGroup: return "choose_group";
        case QuestionKind::ConfirmBounds: return "confirm_bounds";
    }
    return {};
}

std::optional<QuestionKind> parse_question_kind(std::string_view text) {
    for (auto k : {QuestionKind::ClassifyColumn, QuestionKind::ChooseRoot, QuestionKind::ChooseParent,
                   QuestionKind::ChoosePlace, QuestionKind::ChooseGroup, QuestionKind::ConfirmBounds})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

bool is_presence_token(const CellValue& v) {
    if (v.is_flag()) return v.as_flag();
    if (v.is_integer()) return v.as_integer() == 1;
    return presence_words().count(lower(v.as_text())) > 0;
}

bool is_absence_token(const CellValue& v) {
    if (v.is_flag()) return !v.as_flag();
    if (v.is_integer()) return v.as_integer() == 0;
    return absence_words().count(lower(v.as_text())) > 0;
}

std::string group_label(const std::string& kind, const std::vector<std::string>& members) {
    std::string out = kind + " {";
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) out += ", ";
        out += members[i];
    }
    return out + "}";
}

DomainKnowledge load_dk(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw Error(kStage, "SchemaError", std::string("$: ") + e.what());
    }
    DomainKnowledge dk;
    if (doc.is_null()) return dk;
    if (!doc.is_object()) schema_error("$", "expected an object");

    static const std::set<std::string> known{"columns",    "root",   "hierarchy",         "attributes",
                                             "placements", "groups", "interesting_values"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!known.count(it.key())) schema_error("$." + it.key(), "unknown key");

    if (doc.contains("columns")) {
        const auto& cols = doc["columns"];
        if (!cols.is_object()) schema_error("$.columns", "expected an object");
        for (auto it = cols.begin(); it != cols.end(); ++it) {
            std::string path = "$.columns." + it.key();
            ColumnSpec spec;
            const auto& v = it.value();
            if (v.is_string()) {
                spec.kind = parse_column_kind(v.get<std::string>());
                if (!spec.kind) schema_error(path, "unknown column kind '" + v.get<std::string>() + "'");
            } else if (v.is_object()) {
                for (auto f = v.begin(); f != v.end(); ++f)
                    if (f.key() != "kind" && f.key() != "present" && f.key() != "absent")
                        schema_error(path + "." + f.key(), "unknown key");
                if (v.contains("kind")) {
                    if (!v["kind"].is_string()) schema_error(path + ".kind", "expected a string");
                    spec.kind = parse_column_kind(v["kind"].get<std::string>());
                    if (!spec.kind) schema_error(path + ".kind", "unknown column kind");
                }
                if (v.contains("present")) spec.present = cells_from_json(v["present"], path + ".present");
                if (v.contains("absent")) spec.absent = cells_from_json(v["absent"], path + ".absent");
            } else {
                schema_error(path, "expected a kind string or an object");
            }
            dk.columns[it.key()] = std::move(spec);
        }
    }
    if (doc.contains("root")) {
        if (!doc["root"].is_string() || doc["root"].get<std::string>().empty())
            schema_error("$.root", "expected a non-empty string");
        dk.root = doc["root"].get<std::string>();
    }
    if (doc.contains("hierarchy")) dk.hierarchy = string_map(doc["hierarchy"], "$.hierarchy");
    if (doc.contains("placements")) dk.placements = string_map(doc["placements"], "$.placements");
    if (doc.contains("attributes")) {
        const auto& attrs = doc["attributes"];
        if (!attrs.is_object()) schema_error("$.attributes", "expected an object");
        for (auto it = attrs.begin(); it != attrs.end(); ++it) {
            std::string path = "$.attributes." + it.key();
            const auto& v = it.value();
            if (!v.is_object()) schema_error(path, "expected an object");
            AttributeSpec spec;
            for (auto f = v.begin(); f != v.end(); ++f) {
                if (f.key() == "null") spec.null_value = cell_from_json(f.value(), path + ".null");
                else if (f.key() == "order") spec.order = cells_from_json(f.value(), path + ".order");
                else schema_error(path + "." + f.key(), "unknown key");
            }
            dk.attributes[it.key()] = std::move(spec);
        }
    }
    if (doc.contains("groups")) {
        const auto& groups = doc["groups"];
        if (!groups.is_array()) schema_error("$.groups", "expected an array");
        for (std::size_t i = 0; i < groups.size(); ++i) {
            std::string path = "$.groups[" + std::to_string(i) + "]";
            if (!groups[i].is_array() || groups[i].size() < 2) schema_error(path, "expected an array of >= 2 names");
            std::vector<std::string> members;
            for (const auto& m : groups[i]) {
                if (!m.is_string()) schema_error(path, "expected feature names");
                members.push_back(m.get<std::string>());
            }
            dk.groups.push_back(std::move(members));
        }
    }
    if (doc.contains("interesting_values")) {
        const auto& iv = doc["interesting_values"];
        if (!iv.is_array()) schema_error("$.interesting_values", "expected an array");
        std::vector<InterestingValue> values;
        for (std::size_t i = 0; i < iv.size(); ++i) {
            std::string path = "$.interesting_values[" + std::to_string(i) + "]";
            const auto& e = iv[i];
            json name, bound;
            if (e.is_array() && e.size() == 2) {
                name = e[0];
                bound = e[1];
            } else if (e.is_object() && e.contains("attribute") && e.contains("bound")) {
                name = e["attribute"];
                bound = e["bound"];
            } else {
                schema_error(path, "expected [attribute, bound] or {attribute, bound}");
            }
            if (!name.is_string()) schema_error(path + ".attribute", "expected a string");
            auto b = cell_from_json(bound, path + ".bound");
            if (!b.is_integer()) schema_error(path + ".bound", "bounds must be natural numbers");
            values.push_back({name.get<std::string>(), b.as_integer()});
        }
        dk.interesting_values = std::move(values);
    }
    return dk;
}

std::string dump_dk(const DomainKnowledge& dk) {
    json doc = json::object();
    if (!dk.columns.empty()) {
        json cols = json::object();
        for (const auto& [name, spec] : dk.columns) {
            json c = json::object();
            if (spec.kind) c["kind"] = to_string(*spec.kind);
            if (!spec.present.empty()) {
                c["present"] = json::array();
                for (const auto& v : spec.present) c["present"].push_back(cell_to_json(v));
            }
            if (!spec.absent.empty()) {
                c["absent"] = json::array();
                for (const auto& v : spec.absent) c["absent"].push_back(cell_to_json(v));
            }
            cols[name] = std::move(c);
        }
        doc["columns"] = std::move(cols);
    }
    if (dk.root) doc["root"] = *dk.root;
    if (!dk.hierarchy.empty()) doc["hierarchy"] = dk.hierarchy;
    if (!dk.attributes.empty()) {
        json attrs = json::object();
        for (const auto& [name, spec] : dk.attributes) {
            json a = json::object();
            if (spec.null_value) a["null"] = cell_to_json(*spec.null_value);
            if (spec.order) {
                a["order"] = json::array();
                for (const auto& v : *spec.order) a["order"].push_back(cell_to_json(v));
            }
            attrs[name] = std::move(a);
        }
        doc["attributes"] = std::move(attrs);
    }
    if (!dk.placements.empty()) doc["placements"] = dk.placements;
    if (!dk.groups.empty()) doc["groups"] = dk.groups;
    if (dk.interesting_values) {
        json iv = json::array();
        for (const auto& v : *dk.interesting_values) iv.push_back({{"attribute", v.attribute}, {"bound", v.bound}});
        doc["interesting_values"] = std::move(iv);
    }
    return doc.dump(2);
}

std::vector<std::uint64_t> parse_bounds(std::string_view answer) {
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= answer.size()) {
        auto end = answer.find(',', start);
        if (end == std::string_view::npos) end = answer.size();
        auto token = answer.substr(start, end - start);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        if (!token.empty()) {
            auto v = CellValue::parse_natural(token);
            if (!v) throw Error(kStage, "IllegalAnswer", "bound '" + std::string(token) + "' is not a natural number");
            out.push_back(*v);
        }
        start = end + 1;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string format_bounds(const std::vector<std::uint64_t>& bounds) {
    std::string out;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(bounds[i]);
    }
    return out;
}

ColumnKind DecisionProvider::classify_column(const std::string& column, const std::vector<CellValue>& observed) {
    Question q{QuestionKind::ClassifyColumn, column, {}, {}, {}};
    for (auto k : {ColumnKind::BooleanFeature, ColumnKind::EnumeratedFeatures, ColumnKind::Attribute,
                   ColumnKind::Identifier})
        q.candidates.push_back(to_string(k));
    for (const auto& v : observed) q.context.push_back(v.to_string());
    auto answer = decide(q);
    auto kind = parse_column_kind(answer);
    if (!kind) throw Error(kStage, "IllegalAnswer", "'" + answer + "' is not a column kind (column '" + column + "')");
    return *kind;
}

std::string DecisionProvider::choose_root(const std::vector<std::string>& core_features,
                                          const std::string& default_name) {
    Question q{QuestionKind::ChooseRoot, "root", {}, {}, {}};
    q.candidates.push_back(default_name);
    q.candidates.insert(q.candidates.end(), core_features.begin(), core_features.end());
    auto answer = decide(q);
    if (answer.empty()) throw Error(kStage, "IllegalAnswer", "empty root name");
    return answer;
}

std::string DecisionProvider::choose_parent(const std::string& feature, const std::vector<std::string>& candidates) {
    return decide(Question{QuestionKind::ChooseParent, feature, candidates, {}, {}});
}

std::string DecisionProvider::choose_place(const std::string& attribute, const std::vector<std::string>& candidates) {
    return decide(Question{QuestionKind::ChoosePlace, attribute, candidates, {}, {}});
}

std::size_t DecisionProvider::choose_group(const std::string& parent, const std::vector<std::string>& labels,
                                           const std::vector<std::vector<std::string>>& members) {
    auto answer = decide(Question{QuestionKind::ChooseGroup, parent, labels, {}, members});
    auto it = std::find(labels.begin(), labels.end(), answer);
    if (it == labels.end())
        throw Error("variability", "IllegalGroupChoice", "'" + answer + "' is not an offered group under " + parent);
    return static_cast<std::size_t>(it - labels.begin());
}

std::vector<std::uint64_t> DecisionProvider::confirm_bounds(const std::string& attribute,
                                                            const std::vector<CellValue>& domain) {
    Question q{QuestionKind::ConfirmBounds, attribute, {}, {}, {}};
    for (const auto& v : domain) {
        q.candidates.push_back(v.to_string());
        q.context.push_back(v.to_string());
    }
    auto bounds = parse_bounds(decide(q));
    std::uint64_t lo = UINT64_MAX, hi = 0;
    for (const auto& v : domain)
        if (v.is_integer()) {
            lo = std::min(lo, v.as_integer());
            hi = std::max(hi, v.as_integer());
        }
    for (auto b : bounds)
        if (b < lo || b > hi)
            throw Error(kStage, "IllegalAnswer", "bound " + std::to_string(b) + " outside the range of '" + attribute + "'");
    return bounds;
}

std::string HeuristicProvider::decide(const Question& q) {
    switch (q.kind) {
        case QuestionKind::ClassifyColumn: {
            static const std::set<std::string> id_names{"id", "identifier", "name", "product"};
            if (id_names.count(lower(q.subject))) return to_string(ColumnKind::Identifier);
            bool numeric = !q.context.empty() && std::all_of(q.context.begin(), q.context.end(), [](const auto& s) {
                return CellValue::parse_natural(s).has_value();
            });
            if (numeric) return to_string(ColumnKind::Attribute);
            bool yes_no = std::all_of(q.context.begin(), q.context.end(), [](const auto& s) {
                auto l = lower(s);
                return presence_words().count(l) || absence_words().count(l);
            });
            return to_string(yes_no && q.context.size() <= 2 ? ColumnKind::BooleanFeature
                                                             : ColumnKind::EnumeratedFeatures);
        }
        case QuestionKind::ConfirmBounds: {
            std::vector<std::uint64_t> values;
            for (const auto& s : q.context)
                if (auto v = CellValue::parse_natural(s)) values.push_back(*v);
            if (values.empty() || values.size() != q.context.size()) return "";
            std::sort(values.begin(), values.end());
            return std::to_string(values[(values.size() - 1) / 2]);
        }
        default:
            if (q.candidates.empty()) throw Error(kStage, "NoCandidates", to_string(q.kind) + " for " + q.subject);
            return q.candidates.front();
    }
}

KnowledgeProvider::KnowledgeProvider(DomainKnowledge dk, std::shared_ptr<DecisionProvider> fallback)
    : dk_(std::move(dk)), fallback_(std::move(fallback)) {}

std::string KnowledgeProvider::decide(const Question& q) {
    switch (q.kind) {
        case QuestionKind::ClassifyColumn: {
            auto it = dk_.columns.find(q.subject);
            if (it != dk_.columns.end() && it->second.kind) return to_string(*it->second.kind);
            break;
        }
        case QuestionKind::ChooseRoot:
            if (dk_.root) return *dk_.root;
            break;
        case QuestionKind::ChooseParent: {
            auto it = dk_.hierarchy.find(q.subject);
            if (it != dk_.hierarchy.end()) return it->second;
            break;
        }
        case QuestionKind::ChoosePlace: {
            auto it = dk_.placements.find(q.subject);
            if (it != dk_.placements.end()) return it->second;
            break;
        }
        case QuestionKind::ChooseGroup:
            for (const auto& preferred : dk_.groups) {
                std::set<std::string> want(preferred.begin(), preferred.end());
                for (std::size_t i = 0; i < q.group_members.size(); ++i)
                    if (std::set<std::string>(q.group_members[i].begin(), q.group_members[i].end()) == want)
                        return q.candidates[i];
            }
            break;
        case QuestionKind::ConfirmBounds:
            if (dk_.interesting_values) {
                std::vector<std::uint64_t> bounds;
                for (const auto& v : *dk_.interesting_values)
                    if (v.attribute == q.subject) bounds.push_back(v.bound);
                std::sort(bounds.begin(), bounds.end());
                return format_bounds(bounds);
            }
            break;
    }
    if (!fallback_) throw Error(kStage, "Unanswered", to_string(q.kind) + " for " + q.subject);
    return fallback_->decide(q);
}

ReplayProvider::ReplayProvider(Transcript transcript, std::shared_ptr<DecisionProvider> fallback)
    : transcript_(std::move(transcript)), fallback_(std::move(fallback)) {}

std::string ReplayProvider::decide(const Question& q) {
    if (next_ < transcript_.size()) {
        const auto& d = transcript_[next_];
        if (d.question.kind != q.kind || d.question.subject != q.subject)
            throw Error(kStage, "TranscriptMismatch",
                        "entry " + std::to_string(next_) + " answers " + to_string(d.question.kind) + " for '" +
                            d.question.subject + "' but " + to_string(q.kind) + " for '" + q.subject + "' was asked");
        ++next_;
        return d.answer;
    }
    if (!fallback_) throw Error(kStage, "Unanswered", to_string(q.kind) + " for " + q.subject);
    return fallback_->decide(q);
}

std::string PendingProvider::decide(const Question& q) { throw PendingQuestion{q}; }

std::shared_ptr<DecisionProvider> default_provider(const DomainKnowledge& dk) {
    return std::make_shared<KnowledgeProvider>(dk, std::make_shared<HeuristicProvider>());
}

}  // namespace afm
