#pragma once

#include <memory>
#include <string>

#include "afm/session.hpp"

namespace afm {

/// HTTP+JSON front of a SessionStore:
///   POST /sessions                       multipart (matrix, dk?, identifier?, or_groups?, phi?) or JSON
///   GET  /sessions/{id}                  snapshot
///   POST /sessions/{id}/answer           {"answer": "..."} or form field answer
///   GET  /sessions/{id}/afm              AFM JSON
///   GET  /sessions/{id}/export?format=   afm-json | text
class SessionServer {
public:
    explicit SessionServer(SessionStore& store);
    ~SessionServer();

    /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    bool run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace afm
