#include "afm/session.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "afm/error.hpp"
#include "afm/serialize.hpp"

namespace afm {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kStage = "session";

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}

std::optional<std::string> guessed_identifier(const ConfigurationMatrix& m) {
    if (m.column_count() < 2) return std::nullopt;
    static const std::set<std::string> names{"id", "identifier", "name", "product"};
    if (!names.count(lower(m.variables[0]))) return std::nullopt;
    std::set<std::string> seen;
    for (const auto& row : m.rows)
        if (!seen.insert(row[0].to_string()).second) return std::nullopt;
    return m.variables[0];
}

json question_json(const Question& q) {
    json j;
    j["kind"] = to_string(q.kind);
    j["subject"] = q.subject;
    j["candidates"] = q.candidates;
    j["context"] = q.context;
    if (!q.group_members.empty()) j["group_members"] = q.group_members;
    return j;
}

json decisions_json(const Transcript& t) {
    json a = json::array();
    for (const auto& d : t) {
        auto q = question_json(d.question);
        q["answer"] = d.answer;
        a.push_back(q);
    }
    return a;
}

std::string stage_of(QuestionKind k) {
    switch (k) {
        case QuestionKind::ClassifyColumn: return "variables";
        case QuestionKind::ChooseRoot:
        case QuestionKind::ChooseParent:
        case QuestionKind::ChoosePlace: return "structure";
        case QuestionKind::ChooseGroup: return "variability";
        case QuestionKind::ConfirmBounds: return "constraints";
    }
    return "";
}

class Recorder : public DecisionProvider {
public:
    explicit Recorder(DecisionProvider& inner) : inner_(inner) {}
    std::string decide(const Question& q) override {
        auto a = inner_.decide(q);
        log.push_back({q, a});
        return a;
    }
    Transcript log;

private:
    DecisionProvider& inner_;
};

}  // namespace

std::string to_string(SessionStatus s) { return s == SessionStatus::Completed ? "completed" : "pending"; }

Session::Session(std::string id, SessionRequest request) : id_(std::move(id)), request_(std::move(request)) {
    matrix_ = parse_matrix(request_.csv);
    if (request_.dk_json) dk_ = load_dk(*request_.dk_json);
    std::vector<std::string> ids;
    if (request_.identifier_columns) ids = *request_.identifier_columns;
    else if (auto g = guessed_identifier(matrix_)) ids.push_back(*g);
    for (const auto& name : ids) {
        if (!matrix_.find_column(name)) throw Error("matrix", "UnknownColumn", "identifier column '" + name + "'");
        if (!dk_) dk_ = DomainKnowledge{};
        auto& spec = dk_->columns[name];
        if (!spec.kind) spec.kind = ColumnKind::Identifier;
    }
    advance();
}

const AttributedFeatureModel& Session::model() const {
    if (!model_) throw Error(kStage, "NotCompleted", "session " + id_ + " is waiting for an answer");
    return *model_;
}

void Session::advance() {
    auto pending = std::make_shared<PendingProvider>();
    auto replay = std::make_shared<ReplayProvider>(transcript_, pending);
    std::shared_ptr<DecisionProvider> chain = replay;
    if (dk_) chain = std::make_shared<KnowledgeProvider>(*dk_, replay);
    Recorder rec(*chain);
    SynthesisOptions options;
    options.or_groups = request_.or_groups;
    options.phi = request_.phi;
    pending_.reset();
    big_edges_.clear();
    try {
        auto res = synthesize(matrix_, rec, dk_ ? *dk_ : DomainKnowledge{}, options);
        model_ = std::move(res.model);
        status_ = SessionStatus::Completed;
    } catch (const PendingQuestion& p) {
        pending_ = p.question;
        status_ = SessionStatus::Pending;
        model_.reset();
        if (p.question.kind == QuestionKind::ChooseParent)
            for (const auto& c : p.question.candidates) big_edges_.emplace_back(p.question.subject, c);
    }
    decisions_ = std::move(rec.log);
}

void Session::answer(const std::string& answer) {
    if (status_ == SessionStatus::Completed)
        throw Error(kStage, "SessionCompleted", "session " + id_ + " has no pending question");
    const auto& q = *pending_;
    switch (q.kind) {
        case QuestionKind::ChooseRoot:
            if (answer.empty()) throw Error(kStage, "IllegalAnswer", "empty root name");
            break;
        case QuestionKind::ConfirmBounds:
            try {
                parse_bounds(answer);
            } catch (const Error& e) {
                throw Error(kStage, "IllegalAnswer", e.detail());
            }
            break;
        default:
            if (std::find(q.candidates.begin(), q.candidates.end(), answer) == q.candidates.end())
                throw Error(kStage, "IllegalAnswer",
                            "'" + answer + "' is not a candidate for " + to_string(q.kind) + " of '" + q.subject + "'");
    }
    auto saved_transcript = transcript_;
    auto saved_decisions = decisions_;
    auto saved_pending = pending_;
    auto saved_edges = big_edges_;
    transcript_.push_back({q, answer});
    try {
        advance();
    } catch (const Error&) {
        transcript_ = std::move(saved_transcript);
        decisions_ = std::move(saved_decisions);
        pending_ = std::move(saved_pending);
        big_edges_ = std::move(saved_edges);
        status_ = SessionStatus::Pending;
        model_.reset();
        throw;
    }
}

std::string Session::snapshot() const {
    json j;
    j["id"] = id_;
    j["status"] = to_string(status_);
    if (pending_) {
        j["stage"] = stage_of(pending_->kind);
        j["pending"] = question_json(*pending_);
    } else {
        j["stage"] = "done";
        j["pending"] = nullptr;
    }
    j["transcript"] = decisions_json(transcript_);
    j["decisions"] = decisions_json(decisions_);
    json hier = json::array();
    for (const auto& d : decisions_)
        if (d.question.kind == QuestionKind::ChooseParent)
            hier.push_back(json{{"child", d.question.subject}, {"parent", d.answer}});
    j["hierarchy"] = hier;
    json edges = json::array();
    for (const auto& [a, b] : big_edges_) edges.push_back(json{{"from", a}, {"to", b}});
    j["big_edges"] = edges;
    return j.dump(2) + "\n";
}

std::string Session::persist() const {
    json j;
    j["id"] = id_;
    j["csv"] = request_.csv;
    if (request_.dk_json) j["dk"] = *request_.dk_json;
    if (request_.identifier_columns) j["identifier_columns"] = *request_.identifier_columns;
    j["or_groups"] = request_.or_groups;
    j["phi"] = request_.phi;
    j["transcript"] = json::parse(transcript_to_json(transcript_));
    return j.dump(2) + "\n";
}

std::unique_ptr<Session> Session::restore(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw Error(kStage, "CorruptStore", e.what());
    }
    SessionRequest r;
    r.csv = j.at("csv").get<std::string>();
    if (j.contains("dk")) r.dk_json = j["dk"].get<std::string>();
    if (j.contains("identifier_columns")) r.identifier_columns = j["identifier_columns"].get<std::vector<std::string>>();
    r.or_groups = j.value("or_groups", false);
    r.phi = j.value("phi", true);
    auto s = std::make_unique<Session>(j.at("id").get<std::string>(), std::move(r));
    for (const auto& d : transcript_from_json(j.at("transcript").dump())) s->answer(d.answer);
    return s;
}

SessionStore::SessionStore(std::optional<std::filesystem::path> directory) : directory_(std::move(directory)) {
    if (!directory_) return;
    std::filesystem::create_directories(*directory_);
    for (const auto& entry : std::filesystem::directory_iterator(*directory_)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        auto e = std::make_shared<Entry>();
        e->session = Session::restore(buf.str());
        auto id = e->session->id();
        sessions_[id] = e;
        auto n = std::strtoull(id.c_str(), nullptr, 10);
        next_id_ = std::max<std::uint64_t>(next_id_, n + 1);
    }
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
    std::lock_guard g(lock_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(kStage, "UnknownSession", "no session '" + id + "'");
    return it->second;
}

void SessionStore::save(const Session& s) const {
    if (!directory_) return;
    auto path = *directory_ / (s.id() + ".json");
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << s.persist();
    }
    std::filesystem::rename(tmp, path);
}

std::string SessionStore::create(SessionRequest request) {
    std::string id;
    {
        std::lock_guard g(lock_);
        id = std::to_string(next_id_++);
    }
    auto e = std::make_shared<Entry>();
    e->session = std::make_unique<Session>(id, std::move(request));
    save(*e->session);
    auto snap = e->session->snapshot();
    std::lock_guard g(lock_);
    sessions_[id] = e;
    return snap;
}

std::string SessionStore::snapshot(const std::string& id) const {
    auto e = find(id);
    std::shared_lock g(e->lock);
    return e->session->snapshot();
}

std::string SessionStore::answer(const std::string& id, const std::string& answer) {
    auto e = find(id);
    std::unique_lock g(e->lock);
    e->session->answer(answer);
    save(*e->session);
    return e->session->snapshot();
}

std::string SessionStore::afm_json(const std::string& id) const {
    auto e = find(id);
    std::shared_lock g(e->lock);
    return to_json(e->session->model());
}

std::string SessionStore::afm_text(const std::string& id) const {
    auto e = find(id);
    std::shared_lock g(e->lock);
    return to_text(e->session->model());
}

int http_status_for(const std::exception& ex) {
    const auto* e = dynamic_cast<const Error*>(&ex);
    if (!e) return 500;
    if (e->code() == "UnknownSession") return 404;
    if (e->stage() == kStage && e->code() == "NotCompleted") return 409;
    if (e->stage() == kStage || e->code().rfind("Illegal", 0) == 0) return 409;
    return 400;
}

std::string error_json(const std::exception& ex) {
    json j;
    j["error"] = ex.what();
    if (const auto* e = dynamic_cast<const Error*>(&ex)) {
        j["stage"] = e->stage();
        j["code"] = e->code();
    } else {
        j["stage"] = "server";
        j["code"] = "Internal";
    }
    return j.dump() + "\n";
}

}  // namespace afm
