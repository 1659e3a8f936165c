#include "doctest.h"

#include <httplib.h>

#include <json.hpp>
#include <thread>

#include "afm/error.hpp"
#include "afm/serialize.hpp"
#include "afm/semantics.hpp"
#include "afm/server.hpp"
#include "afm/session.hpp"
#include "support/testkit.hpp"

using namespace afm;
using json = nlohmann::json;

namespace {

SessionRequest wiki_request(bool with_dk) {
    SessionRequest r;
    r.csv = testkit::read_file(testkit::data_path("wiki.csv"));
    if (with_dk) r.dk_json = testkit::read_file(testkit::data_path("wiki.dk.json"));
    return r;
}

std::string batch_json() { return to_json(synthesize(testkit::wiki_matrix(), testkit::wiki_dk()).model); }

// Answers every pending question the way the wiki knowledge would.
void drive(Session& s) {
    KnowledgeProvider k(testkit::wiki_dk(), std::make_shared<HeuristicProvider>());
    while (s.status() == SessionStatus::Pending) s.answer(k.decide(*s.pending()));
}

std::string error_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("a fresh wiki session asks to classify LicenseType first") {
    Session s("s1", wiki_request(false));
    REQUIRE(s.status() == SessionStatus::Pending);
    CHECK(s.pending()->kind == QuestionKind::ClassifyColumn);
    CHECK(s.pending()->subject == "LicenseType");
    auto snap = json::parse(s.snapshot());
    CHECK(snap["stage"] == "variables");
    CHECK(snap["pending"]["subject"] == "LicenseType");
}

TEST_CASE("a session with the wiki knowledge completes and matches the batch output") {
    Session s("s2", wiki_request(true));
    CHECK(s.status() == SessionStatus::Completed);
    CHECK(to_json(s.model()) == batch_json());
}

TEST_CASE("answering step by step reaches the batch model") {
    Session s("s3", wiki_request(false));
    drive(s);
    REQUIRE(s.status() == SessionStatus::Completed);
    auto batch = synthesize(testkit::wiki_matrix(), testkit::wiki_dk()).model;
    CHECK(structurally_equal(s.model(), batch));
    CHECK(same_semantics(s.model(), batch));
    CHECK(error_code([&] { s.answer("x"); }) == "SessionCompleted");
}

TEST_CASE("illegal answers are refused and leave the session unchanged") {
    Session s("s4", wiki_request(false));
    KnowledgeProvider k(testkit::wiki_dk(), std::make_shared<HeuristicProvider>());
    while (!(s.pending()->kind == QuestionKind::ChooseParent && s.pending()->subject == "GPL"))
        s.answer(k.decide(*s.pending()));
    auto before = s.snapshot();
    CHECK(error_code([&] { s.answer("Commercial"); }) == "IllegalAnswer");
    CHECK(s.snapshot() == before);
    auto snap = json::parse(before);
    CHECK_FALSE(snap["big_edges"].empty());
    auto e = Error("session", "IllegalAnswer", "");
    CHECK(http_status_for(e) == 409);
}

TEST_CASE("persist and restore keep the state") {
    Session s("s5", wiki_request(false));
    s.answer("enumerated-features");
    s.answer("attribute");
    auto back = Session::restore(s.persist());
    CHECK(back->snapshot() == s.snapshot());
}

TEST_CASE("store errors map to http statuses") {
    SessionStore store;
    CHECK(error_code([&] { store.snapshot("nope"); }) == "UnknownSession");
    CHECK(http_status_for(Error("session", "UnknownSession", "")) == 404);
    SessionRequest empty;
    empty.csv = "a,b\n";
    try {
        store.create(empty);
        FAIL("expected EmptyMatrix");
    } catch (const Error& e) {
        CHECK(e.code() == "EmptyMatrix");
        CHECK(http_status_for(e) == 400);
        CHECK(json::parse(error_json(e))["code"] == "EmptyMatrix");
    }
    CHECK(http_status_for(std::runtime_error("boom")) == 500);
}

TEST_CASE("file-backed store survives a restart") {
    auto dir = std::filesystem::temp_directory_path() / ("afm-store-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::string id, snap;
    {
        SessionStore store(dir);
        id = json::parse(store.create(wiki_request(false)))["id"].get<std::string>();
        store.answer(id, "enumerated-features");
        snap = store.snapshot(id);
    }
    SessionStore again(dir);
    CHECK(again.snapshot(id) == snap);
    std::filesystem::remove_all(dir);
}

TEST_CASE("http front end") {
    SessionStore store;
    SessionServer server(store);
    int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread t([&] { server.run(); });
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(30, 0);

    httplib::MultipartFormDataItems items{{"matrix", testkit::read_file(testkit::data_path("wiki.csv")), "wiki.csv", "text/csv"}};
    auto created = client.Post("/sessions", items);
    REQUIRE(created);
    CHECK(created->status == 201);
    auto id = json::parse(created->body)["id"].get<std::string>();

    auto snap = client.Get("/sessions/" + id);
    REQUIRE(snap);
    CHECK(snap->status == 200);
    CHECK(json::parse(snap->body)["pending"]["subject"] == "LicenseType");

    auto answered = client.Post("/sessions/" + id + "/answer", json{{"answer", "enumerated-features"}}.dump(),
                                "application/json");
    REQUIRE(answered);
    CHECK(answered->status == 200);
    auto bad = client.Post("/sessions/" + id + "/answer", json{{"answer", "no-such-kind"}}.dump(), "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 409);

    CHECK(client.Get("/sessions/missing")->status == 404);
    CHECK(client.Get("/sessions/" + id + "/afm")->status == 409);

    httplib::MultipartFormDataItems empty{{"matrix", "a,b\n", "m.csv", "text/csv"}};
    auto rejected = client.Post("/sessions", empty);
    REQUIRE(rejected);
    CHECK(rejected->status == 400);
    CHECK(json::parse(rejected->body)["code"] == "EmptyMatrix");

    httplib::MultipartFormDataItems full{
        {"matrix", testkit::read_file(testkit::data_path("wiki.csv")), "wiki.csv", "text/csv"},
        {"dk", testkit::read_file(testkit::data_path("wiki.dk.json")), "wiki.dk.json", "application/json"}};
    auto done = client.Post("/sessions", full);
    REQUIRE(done);
    auto done_id = json::parse(done->body)["id"].get<std::string>();
    auto exported = client.Get("/sessions/" + done_id + "/export?format=afm-json");
    REQUIRE(exported);
    CHECK(exported->status == 200);
    CHECK(exported->body == batch_json());
    auto text = client.Get("/sessions/" + done_id + "/export?format=text");
    CHECK(text->body == to_text(from_json(batch_json())));
    CHECK(client.Get("/sessions/" + done_id + "/export?format=pdf")->status == 400);

    server.stop();
    t.join();
}
