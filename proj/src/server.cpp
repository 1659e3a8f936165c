#include "afm/server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "afm/error.hpp"

namespace afm {

using json = nlohmann::json;

struct SessionServer::Impl {
    SessionStore& store;
    httplib::Server http;
    explicit Impl(SessionStore& s) : store(s) {}
};

namespace {

void send_json(httplib::Response& res, int status, const std::string& body) {
    res.status = status;
    res.set_content(body, "application/json");
}

void send_error(httplib::Response& res, const std::exception& e, int status) { send_json(res, status, error_json(e)); }

bool truthy(const std::string& s) { return s == "1" || s == "true" || s == "on" || s == "yes"; }

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

SessionRequest request_from(const httplib::Request& req) {
    SessionRequest r;
    if (req.is_multipart_form_data()) {
        if (!req.has_file("matrix")) throw Error("session", "MissingMatrix", "multipart field 'matrix' is required");
        r.csv = req.get_file_value("matrix").content;
        if (req.has_file("dk") && !req.get_file_value("dk").content.empty()) r.dk_json = req.get_file_value("dk").content;
        if (req.has_file("identifier")) r.identifier_columns = split_names(req.get_file_value("identifier").content);
        if (req.has_file("or_groups")) r.or_groups = truthy(req.get_file_value("or_groups").content);
        if (req.has_file("phi")) r.phi = truthy(req.get_file_value("phi").content);
        return r;
    }
    json j;
    try {
        j = json::parse(req.body);
    } catch (const json::exception& e) {
        throw Error("session", "BadRequest", e.what());
    }
    if (!j.is_object() || !j.contains("matrix") || !j["matrix"].is_string())
        throw Error("session", "MissingMatrix", "field 'matrix' (CSV text) is required");
    r.csv = j["matrix"].get<std::string>();
    if (j.contains("dk")) r.dk_json = j["dk"].is_string() ? j["dk"].get<std::string>() : j["dk"].dump();
    if (j.contains("identifier")) r.identifier_columns = j["identifier"].get<std::vector<std::string>>();
    r.or_groups = j.value("or_groups", false);
    r.phi = j.value("phi", true);
    return r;
}

std::string answer_from(const httplib::Request& req) {
    if (req.has_param("answer")) return req.get_param_value("answer");
    if (req.is_multipart_form_data() && req.has_file("answer")) return req.get_file_value("answer").content;
    try {
        auto j = json::parse(req.body);
        if (j.is_object() && j.contains("answer") && j["answer"].is_string()) return j["answer"].get<std::string>();
    } catch (const json::exception&) {
    }
    throw Error("session", "BadRequest", "expected {\"answer\": \"...\"}");
}

}  // namespace

SessionServer::SessionServer(SessionStore& store) : impl_(std::make_unique<Impl>(store)) {
    auto& http = impl_->http;
    auto& st = impl_->store;
    http.Post("/sessions", [&st](const httplib::Request& req, httplib::Response& res) {
        try {
            send_json(res, 201, st.create(request_from(req)));
        } catch (const std::exception& e) {
            send_error(res, e, dynamic_cast<const Error*>(&e) ? 400 : 500);
        }
    });
    http.Get(R"(/sessions/([^/]+))", [&st](const httplib::Request& req, httplib::Response& res) {
        try {
            send_json(res, 200, st.snapshot(req.matches[1]));
        } catch (const std::exception& e) {
            send_error(res, e, http_status_for(e));
        }
    });
    http.Post(R"(/sessions/([^/]+)/answer)", [&st](const httplib::Request& req, httplib::Response& res) {
        try {
            std::string id = req.matches[1];
            st.snapshot(id);
            send_json(res, 200, st.answer(id, answer_from(req)));
        } catch (const std::exception& e) {
            send_error(res, e, http_status_for(e));
        }
    });
    http.Get(R"(/sessions/([^/]+)/afm)", [&st](const httplib::Request& req, httplib::Response& res) {
        try {
            send_json(res, 200, st.afm_json(req.matches[1]));
        } catch (const std::exception& e) {
            send_error(res, e, http_status_for(e));
        }
    });
    http.Get(R"(/sessions/([^/]+)/export)", [&st](const httplib::Request& req, httplib::Response& res) {
        try {
            auto format = req.has_param("format") ? req.get_param_value("format") : "afm-json";
            if (format == "afm-json") send_json(res, 200, st.afm_json(req.matches[1]));
            else if (format == "text") {
                res.status = 200;
                res.set_content(st.afm_text(req.matches[1]), "text/plain; charset=utf-8");
            } else
                throw Error("session", "UnknownFormat", "format must be afm-json or text");
        } catch (const std::exception& e) {
            auto* err = dynamic_cast<const Error*>(&e);
            send_error(res, e, err && err->code() == "UnknownFormat" ? 400 : http_status_for(e));
        }
    });
}

SessionServer::~SessionServer() = default;

int SessionServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->http.bind_to_any_port(host);
    return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool SessionServer::run() { return impl_->http.listen_after_bind(); }

void SessionServer::stop() { impl_->http.stop(); }

}  // namespace afm
