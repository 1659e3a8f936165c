#include "afm/serialize.hpp"

#include <sstream>

#include <json.hpp>

#include "afm/error.hpp"

namespace afm {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kStage = "serialize";

json cell(const CellValue& v) {
    if (v.is_integer()) return v.as_integer();
    if (v.is_flag()) return v.as_flag();
    return v.as_text();
}

CellValue cell(const json& j) {
    if (j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0))
        return CellValue::integer(j.get<std::uint64_t>());
    if (j.is_boolean()) return CellValue::flag(j.get<bool>());
    if (j.is_string()) return CellValue::text(j.get<std::string>());
    throw Error(kStage, "SchemaError", "bad cell value " + j.dump());
}

json cells(const std::vector<CellValue>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(cell(v));
    return a;
}

std::vector<CellValue> cells(const json& j) {
    std::vector<CellValue> out;
    for (const auto& x : j) out.push_back(cell(x));
    return out;
}

json question_json(const Decision& d) {
    json q;
    q["kind"] = to_string(d.question.kind);
    q["subject"] = d.question.subject;
    q["candidates"] = d.question.candidates;
    if (!d.question.context.empty()) q["context"] = d.question.context;
    if (!d.question.group_members.empty()) q["group_members"] = d.question.group_members;
    q["answer"] = d.answer;
    return q;
}

Decision question_from(const json& q) {
    Decision d;
    auto kind = parse_question_kind(q.at("kind").get<std::string>());
    if (!kind) throw Error(kStage, "SchemaError", "unknown question kind " + q.at("kind").dump());
    d.question.kind = *kind;
    d.question.subject = q.at("subject").get<std::string>();
    if (q.contains("candidates")) d.question.candidates = q["candidates"].get<std::vector<std::string>>();
    if (q.contains("context")) d.question.context = q["context"].get<std::vector<std::string>>();
    if (q.contains("group_members"))
        d.question.group_members = q["group_members"].get<std::vector<std::vector<std::string>>>();
    d.answer = q.at("answer").get<std::string>();
    return d;
}

json group_json(const AttributedFeatureModel& m, const FeatureGroup& g) {
    json j;
    j["kind"] = to_string(g.kind);
    j["parent"] = m.features[g.parent];
    json kids = json::array();
    for (auto c : g.children) kids.push_back(m.features[c]);
    j["children"] = kids;
    return j;
}

}  // namespace

std::string transcript_to_json(const Transcript& t) {
    json a = json::array();
    for (const auto& d : t) a.push_back(question_json(d));
    return a.dump(2);
}

Transcript transcript_from_json(std::string_view text) {
    try {
        auto a = json::parse(text.begin(), text.end());
        Transcript t;
        for (const auto& q : a) t.push_back(question_from(q));
        return t;
    } catch (const json::exception& e) {
        throw Error(kStage, "SchemaError", e.what());
    }
}

std::string to_json(const AttributedFeatureModel& m) {
    json doc;
    doc["semantics"] = m.phi ? "exact" : "diagram-only, over-approximate";
    doc["root"] = m.root_name();
    doc["features"] = m.features;
    json hier = json::array(), mand = json::array();
    for (auto f : m.hierarchy.preorder()) {
        if (f == m.hierarchy.root) continue;
        json e;
        e["child"] = m.features[f];
        e["parent"] = m.features[m.hierarchy.parent[f]];
        hier.push_back(e);
        if (m.mandatory[f]) mand.push_back(e);
    }
    doc["hierarchy"] = hier;
    doc["mandatory"] = mand;
    json groups = json::array();
    for (const auto& g : m.groups) groups.push_back(group_json(m, g));
    doc["groups"] = groups;
    json attrs = json::array();
    for (const auto& a : m.attributes) {
        json j;
        j["name"] = a.name;
        j["place"] = m.features[a.host];
        j["numeric"] = a.domain.numeric;
        j["domain"] = cells(a.domain.values);
        j["null"] = cell(a.domain.null_value);
        if (a.domain.order) j["order"] = cells(*a.domain.order);
        j["bounds"] = a.bounds;
        attrs.push_back(j);
    }
    doc["attributes"] = attrs;
    json rcs = json::array();
    for (const auto& rc : m.constraints) rcs.push_back(render_constraint(rc));
    doc["constraints"] = rcs;
    if (m.phi) {
        json phi;
        phi["columns"] = m.phi->columns;
        json rows = json::array();
        for (const auto& r : m.phi->rows) rows.push_back(cells(r));
        phi["rows"] = rows;
        doc["phi"] = phi;
    }
    json cols = json::array();
    for (const auto& b : m.columns) {
        json j;
        j["column"] = b.column;
        j["kind"] = to_string(b.kind);
        j["target"] = b.target;
        if (!b.live) j["live"] = false;
        if (!b.present.empty()) j["present"] = cells(b.present);
        if (!b.absent.empty()) j["absent"] = cells(b.absent);
        if (!b.children.empty()) {
            json kids = json::array();
            for (const auto& [v, f] : b.children) kids.push_back(json{{"value", cell(v)}, {"feature", f}});
            j["children"] = kids;
        }
        cols.push_back(j);
    }
    doc["columns"] = cols;
    json prov;
    prov["or_groups"] = m.provenance.or_groups;
    prov["or_groups_timed_out"] = m.provenance.or_groups_timed_out;
    json stages = json::array();
    for (const auto& s : m.provenance.stages)
        stages.push_back(json{{"stage", s.stage}, {"input_hash", s.input_hash}, {"summary", s.summary}});
    prov["stages"] = stages;
    json decisions = json::array();
    for (const auto& d : m.provenance.decisions) decisions.push_back(question_json(d));
    prov["decisions"] = decisions;
    json discarded = json::array();
    for (const auto& d : m.provenance.discarded_groups) {
        auto j = group_json(m, d.group);
        j["reason"] = d.reason;
        discarded.push_back(j);
    }
    prov["discarded_groups"] = discarded;
    doc["provenance"] = prov;
    return doc.dump(2) + "\n";
}

AttributedFeatureModel from_json(std::string_view text) {
    AttributedFeatureModel m;
    try {
        auto doc = json::parse(text.begin(), text.end());
        m.features = doc.at("features").get<std::vector<std::string>>();
        auto feature = [&](const json& name) {
            auto f = m.find_feature(name.get<std::string>());
            if (!f) throw Error(kStage, "SchemaError", "unknown feature " + name.dump());
            return *f;
        };
        std::size_t n = m.features.size();
        m.hierarchy.parent.assign(n, kNoParent);
        m.hierarchy.root = feature(doc.at("root"));
        m.mandatory.assign(n, false);
        for (const auto& e : doc.at("hierarchy")) m.hierarchy.parent[feature(e.at("child"))] = feature(e.at("parent"));
        for (const auto& e : doc.at("mandatory")) m.mandatory[feature(e.at("child"))] = true;
        for (const auto& g : doc.at("groups")) {
            FeatureGroup fg;
            auto kind = parse_group_kind(g.at("kind").get<std::string>());
            if (!kind) throw Error(kStage, "SchemaError", "unknown group kind " + g.at("kind").dump());
            fg.kind = *kind;
            fg.parent = feature(g.at("parent"));
            for (const auto& c : g.at("children")) fg.children.push_back(feature(c));
            m.groups.push_back(fg);
        }
        for (const auto& a : doc.at("attributes")) {
            AttributeDecl d;
            d.name = a.at("name").get<std::string>();
            d.host = feature(a.at("place"));
            d.domain.numeric = a.at("numeric").get<bool>();
            d.domain.values = cells(a.at("domain"));
            d.domain.null_value = cell(a.at("null"));
            if (a.contains("order")) d.domain.order = cells(a["order"]);
            d.bounds = a.at("bounds").get<std::vector<std::uint64_t>>();
            m.attributes.push_back(std::move(d));
        }
        for (const auto& rc : doc.at("constraints")) m.constraints.push_back(parse_constraint(rc.get<std::string>()));
        if (doc.contains("phi")) {
            ResidualConstraint phi;
            phi.columns = doc["phi"].at("columns").get<std::vector<std::string>>();
            for (const auto& r : doc["phi"].at("rows")) phi.rows.push_back(cells(r));
            m.phi = std::move(phi);
        }
        for (const auto& c : doc.at("columns")) {
            ColumnBinding b;
            b.column = c.at("column").get<std::string>();
            auto kind = parse_column_kind(c.at("kind").get<std::string>());
            if (!kind) throw Error(kStage, "SchemaError", "unknown column kind " + c.at("kind").dump());
            b.kind = *kind;
            b.target = c.at("target").get<std::string>();
            b.live = c.value("live", true);
            if (c.contains("present")) b.present = cells(c["present"]);
            if (c.contains("absent")) b.absent = cells(c["absent"]);
            if (c.contains("children"))
                for (const auto& k : c["children"]) b.children.emplace_back(cell(k.at("value")), k.at("feature").get<std::string>());
            m.columns.push_back(std::move(b));
        }
        if (doc.contains("provenance")) {
            const auto& p = doc["provenance"];
            m.provenance.or_groups = p.value("or_groups", false);
            m.provenance.or_groups_timed_out = p.value("or_groups_timed_out", false);
            if (p.contains("stages"))
                for (const auto& s : p["stages"])
                    m.provenance.stages.push_back({s.at("stage").get<std::string>(), s.at("input_hash").get<std::string>(),
                                                   s.at("summary").get<std::string>()});
            if (p.contains("decisions"))
                for (const auto& q : p["decisions"]) m.provenance.decisions.push_back(question_from(q));
            if (p.contains("discarded_groups"))
                for (const auto& g : p["discarded_groups"]) {
                    DiscardedGroup d;
                    auto kind = parse_group_kind(g.at("kind").get<std::string>());
                    d.group.kind = kind.value_or(GroupKind::Mutex);
                    d.group.parent = feature(g.at("parent"));
                    for (const auto& c : g.at("children")) d.group.children.push_back(feature(c));
                    d.reason = g.value("reason", "");
                    m.provenance.discarded_groups.push_back(std::move(d));
                }
        }
    } catch (const json::exception& e) {
        throw Error(kStage, "SchemaError", e.what());
    }
    m.check_structure();
    return m;
}

std::string to_text(const AttributedFeatureModel& m) {
    std::ostringstream os;
    const auto& h = m.hierarchy;
    std::vector<std::size_t> group_of(m.features.size(), kNoParent);
    for (std::size_t g = 0; g < m.groups.size(); ++g)
        for (auto c : m.groups[g].children) group_of[c] = g;

    auto show_attributes = [&](std::size_t f, const std::string& indent) {
        for (const auto& a : m.attributes) {
            if (a.host != f) continue;
            os << indent << "@ " << a.name << " : {";
            for (std::size_t i = 0; i < a.domain.values.size(); ++i)
                os << (i ? ", " : "") << a.domain.values[i].to_string();
            os << "} null " << a.domain.null_value.to_string() << "\n";
        }
    };
    std::function<void(std::size_t, const std::string&)> show = [&](std::size_t f, const std::string& indent) {
        os << indent << m.features[f];
        if (f != h.root && group_of[f] == kNoParent) os << (m.mandatory[f] ? " (mandatory)" : " (optional)");
        os << "\n";
        auto inner = indent + "  ";
        show_attributes(f, inner);
        auto kids = h.children(f);
        for (auto c : kids)
            if (group_of[c] == kNoParent) show(c, inner);
        for (const auto& g : m.groups) {
            if (g.parent != f) continue;
            os << inner << to_string(g.kind) << " group\n";
            for (auto c : g.children) show(c, inner + "  ");
        }
    };
    show(h.root, "");
    os << "constraints:\n";
    for (const auto& rc : m.constraints) os << "  " << render_constraint(rc) << "\n";
    if (m.phi) os << "phi: " << m.phi->rows.size() << " configurations over " << m.phi->columns.size() << " columns\n";
    else os << "phi: omitted (diagram-only, over-approximate)\n";
    return os.str();
}

}  // namespace afm
