#include "doctest.h"

#include <json.hpp>

#include "afm/cli.hpp"
#include "support/testkit.hpp"

using namespace afm;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args, const std::string& input = "") {
    std::ostringstream out, err;
    std::istringstream in(input);
    int code = run_cli(args, out, err, in);
    return {code, out.str(), err.str()};
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int n = 0;
        path = std::filesystem::temp_directory_path() /
               ("afm-cli-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::string kWiki = testkit::data_path("wiki.csv");
const std::string kDk = testkit::data_path("wiki.dk.json");

}  // namespace

TEST_CASE("synth writes json and text and check accepts it") {
    TempDir dir;
    auto r = cli({"synth", kWiki, "--dk", kDk, "-o", dir / "wiki.json"});
    REQUIRE(r.code == kExitOk);
    auto text = testkit::read_file(dir / "wiki.txt");
    CHECK(text.find("Wiki engine") == 0);
    auto check = cli({"check", dir / "wiki.json", kWiki});
    CHECK(check.code == kExitOk);
    CHECK(check.out.find("sound") != std::string::npos);
}

TEST_CASE("synth without output prints the text form") {
    auto r = cli({"synth", kWiki, "--dk", kDk});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("xor group") != std::string::npos);
}

TEST_CASE("diagram-only models fail the exact check") {
    TempDir dir;
    REQUIRE(cli({"synth", kWiki, "--dk", kDk, "--no-phi", "-o", dir / "d.json"}).code == kExitOk);
    CHECK(cli({"check", dir / "d.json", kWiki}).code == kExitValidation);
}

TEST_CASE("a tampered model is reported") {
    TempDir dir;
    REQUIRE(cli({"synth", kWiki, "--dk", kDk, "-o", dir / "wiki.json"}).code == kExitOk);
    auto doc = nlohmann::ordered_json::parse(testkit::read_file(dir / "wiki.json"));
    doc["mandatory"] = nlohmann::ordered_json::array();
    std::ofstream(dir / "weak.json") << doc.dump(2);
    auto r = cli({"check", dir / "weak.json", kWiki});
    CHECK(r.code != kExitOk);
    CHECK(r.out.find("mandatory") != std::string::npos);
}

TEST_CASE("enumerate lists the wiki configurations") {
    TempDir dir;
    REQUIRE(cli({"synth", kWiki, "--dk", kDk, "-o", dir / "wiki.json"}).code == kExitOk);
    auto r = cli({"enumerate", dir / "wiki.json"});
    CHECK(r.code == kExitOk);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') >= 8);
    CHECK(cli({"check", dir / "wiki.json", kWiki, "--budget", "2"}).code == kExitBudget);
}

TEST_CASE("input errors exit with 4") {
    TempDir dir;
    CHECK(cli({"synth", dir / "missing.csv"}).code == kExitInput);
    std::ofstream(dir / "dup.csv") << "a,b\n1,x\n1,x\n";
    CHECK(cli({"synth", dir / "dup.csv"}).code == kExitInput);
    CHECK(cli({"synth", dir / "dup.csv", "--dedup"}).code == kExitOk);
    std::ofstream(dir / "bad.json") << "{\"bogus\": true}";
    CHECK(cli({"synth", kWiki, "--dk", dir / "bad.json"}).code == kExitInput);
    CHECK(cli({"check", dir / "bad.json", kWiki}).code == kExitInput);
    CHECK(cli({"gen", "-v", "0", "-c", "1", "-d", "2"}).code == kExitInput);
}

TEST_CASE("transcripts replay to the same output") {
    TempDir dir;
    REQUIRE(cli({"synth", kWiki, "--dk", kDk, "-o", dir / "a.json", "--transcript", dir / "t.json"}).code == kExitOk);
    REQUIRE(cli({"synth", kWiki, "--replay", dir / "t.json", "-o", dir / "b.json"}).code == kExitOk);
    CHECK(testkit::read_file(dir / "a.json") == testkit::read_file(dir / "b.json"));
}

TEST_CASE("interactive synth reads answers from input") {
    TempDir dir;
    std::ofstream(dir / "ab.csv") << "A,B\nYes,No\nNo,Yes\n";
    std::ofstream(dir / "ab.dk.json") << R"({"columns": {"A": "boolean-feature", "B": "boolean-feature"}})";
    auto r = cli({"synth", dir / "ab.csv", "--dk", dir / "ab.dk.json", "--interactive"}, "Top\n1\n1\n1\n1\n");
    CHECK(r.code == kExitOk);
    CHECK(r.err.find("choose_root") != std::string::npos);
    CHECK(r.out.find("Top") == 0);
    CHECK(r.out.find("xor group") != std::string::npos);
    auto closed = cli({"synth", dir / "ab.csv", "--dk", dir / "ab.dk.json", "--interactive"});
    CHECK(closed.code == kExitInput);
}

TEST_CASE("gen then synth") {
    TempDir dir;
    REQUIRE(cli({"gen", "-v", "6", "-c", "30", "-d", "3", "--seed", "4", "-o", dir / "g.csv", "--dk", dir / "g.dk.json"})
                .code == kExitOk);
    CHECK(cli({"synth", dir / "g.csv", "--dk", dir / "g.dk.json", "-o", dir / "g.json"}).code == kExitOk);
    CHECK(cli({"check", dir / "g.json", dir / "g.csv"}).code != kExitInput);
}

TEST_CASE("bench writes a csv") {
    TempDir dir;
    auto r = cli({"bench", "--sweep", "c=20,40", "--v", "5", "--d", "3", "--reps", "1", "-o", dir / "b.csv"});
    CHECK(r.code == kExitOk);
    CHECK(testkit::read_file(dir / "b.csv").find("axis,v,c,d") != std::string::npos);
    CHECK(cli({"bench", "--sweep", "q=1,2"}).code == kExitInput);
}
