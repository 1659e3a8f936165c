#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "afm/knowledge.hpp"
#include "afm/matrix.hpp"
#include "afm/pipeline.hpp"

namespace afm {

struct SessionRequest {
    std::string csv;
    std::optional<std::string> dk_json;
    /// Columns classified as identifiers up front. When unset, a first
    /// column named like an identifier (id, identifier, name, product) with
    /// distinct values is pre-classified.
    std::optional<std::vector<std::string>> identifier_columns;
    bool or_groups = false;
    bool phi = true;
};

enum class SessionStatus { Pending, Completed };
std::string to_string(SessionStatus s);

/// One interactive synthesis. The state is a pure function of the request
/// and the transcript of human answers: every step re-runs the synthesis
/// with the transcript replayed until the next unanswered question.
class Session {
public:
    Session(std::string id, SessionRequest request);

    const std::string& id() const noexcept { return id_; }
    SessionStatus status() const noexcept { return status_; }
    const std::optional<Question>& pending() const noexcept { return pending_; }
    const Transcript& transcript() const noexcept { return transcript_; }
    const SessionRequest& request() const noexcept { return request_; }
    /// Completed model; throws Error{"session","NotCompleted"} otherwise.
    const AttributedFeatureModel& model() const;

    /// Throws Error{"session","IllegalAnswer"} (or the stage error the answer
    /// provokes) and leaves the session unchanged when the answer is refused.
    void answer(const std::string& answer);

    /// Snapshot as JSON: status, pending question, transcript, every decision
    /// taken so far, partial hierarchy and the BIG edges behind the pending
    /// question.
    std::string snapshot() const;

    /// Request and transcript, enough to rebuild the session.
    std::string persist() const;
    static std::unique_ptr<Session> restore(std::string_view text);

private:
    void advance();

    std::string id_;
    SessionRequest request_;
    std::optional<DomainKnowledge> dk_;
    ConfigurationMatrix matrix_;
    Transcript transcript_;
    Transcript decisions_;
    SessionStatus status_ = SessionStatus::Pending;
    std::optional<Question> pending_;
    std::optional<AttributedFeatureModel> model_;
    std::vector<std::pair<std::string, std::string>> big_edges_;
};

/// Thread-safe session registry with optional file-backed persistence.
class SessionStore {
public:
    explicit SessionStore(std::optional<std::filesystem::path> directory = std::nullopt);

    /// Throws matrix/knowledge errors for a bad upload.
    std::string create(SessionRequest request);
    /// Throws Error{"session","UnknownSession"}.
    std::string snapshot(const std::string& id) const;
    std::string answer(const std::string& id, const std::string& answer);
    std::string afm_json(const std::string& id) const;
    std::string afm_text(const std::string& id) const;

private:
    struct Entry {
        mutable std::shared_mutex lock;
        std::unique_ptr<Session> session;
    };
    std::shared_ptr<Entry> find(const std::string& id) const;
    void save(const Session& s) const;

    std::optional<std::filesystem::path> directory_;
    mutable std::mutex lock_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::uint64_t next_id_ = 1;
};

/// HTTP status for an error raised by the store: 404 unknown session,
/// 409 refused answers and completed sessions, 400 otherwise.
int http_status_for(const std::exception& e);
/// {"error": message, "stage": ..., "code": ...}
std::string error_json(const std::exception& e);

}  // namespace afm
