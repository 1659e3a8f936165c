#include "doctest.h"

#include "afm/error.hpp"
#include "afm/matrix.hpp"
#include "support/testkit.hpp"

using namespace afm;

namespace {

std::string code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("wiki matrix parses with typed columns") {
    auto m = testkit::wiki_matrix();
    CHECK(m.column_count() == 6);
    CHECK(m.row_count() == 8);
    CHECK(m.is_numeric_column(*m.find_column("LicensePrice")));
    CHECK_FALSE(m.is_numeric_column(*m.find_column("Language")));
    CHECK(m.cell(1, 2) == CellValue::integer(20));
    CHECK(m.cell(1, 4) == CellValue::text("--"));
}

TEST_CASE("identifier hints drop columns") {
    IngestionHints hints;
    hints.identifier_columns = {"Identifier"};
    auto m = parse_matrix(testkit::read_file(testkit::data_path("wiki.csv")), hints);
    CHECK(m.column_count() == 5);
    CHECK_FALSE(m.find_column("Identifier"));
    hints.identifier_columns = {"Nope"};
    CHECK(code_of([&] { parse_matrix("a,b\n1,2\n", hints); }) == "UnknownColumn");
}

TEST_CASE("quoted fields, BOM and CRLF") {
    auto m = parse_matrix("\xEF\xBB\xBFname,\"a,b\"\r\n\"x \"\"y\"\"\",\"line\nbreak\"\r\n");
    REQUIRE(m.variables == std::vector<std::string>{"name", "a,b"});
    CHECK(m.cell(0, 0).as_text() == "x \"y\"");
    CHECK(m.cell(0, 1).as_text() == "line\nbreak");
    CHECK(parse_matrix(write_csv(m)).rows == m.rows);
}

TEST_CASE("malformed input is rejected with a stable code") {
    CHECK(code_of([] { parse_matrix(""); }) == "EmptyMatrix");
    CHECK(code_of([] { parse_matrix("a,b\n"); }) == "EmptyMatrix");
    CHECK(code_of([] { parse_matrix("a,b\n1\n"); }) == "RaggedRow");
    CHECK(code_of([] { parse_matrix("a,b\n1,\n"); }) == "EmptyCell");
    CHECK(code_of([] { parse_matrix("a,a\n1,2\n"); }) == "DuplicateColumn");
    CHECK(code_of([] { parse_matrix("a,b\n1,2\n1,2\n"); }) == "DuplicateRow");
    CHECK(code_of([] { parse_matrix("a\n1\nx\n"); }) == "MixedColumn");
    CHECK(code_of([] { parse_matrix("a\n\"open\n"); }) == "MalformedCsv");
    CHECK(code_of([] { parse_matrix("a\nx\"y\n"); }) == "MalformedCsv");
}

TEST_CASE("dedup collapses repeated rows with a warning") {
    IngestionHints hints;
    hints.dedup_rows = true;
    std::vector<std::string> warnings;
    auto m = parse_matrix("a,b\n1,x\n2,y\n1,x\n", hints, &warnings);
    CHECK(m.row_count() == 2);
    CHECK(warnings.size() == 1);
}

TEST_CASE("projection collapses duplicates and keeps first occurrence order") {
    auto m = parse_matrix("a,b\n1,x\n2,x\n1,y\n");
    auto p = m.project({0});
    CHECK(p.rows == std::vector<Row>{{CellValue::integer(1)}, {CellValue::integer(2)}});
}

TEST_CASE("column domain is in first-occurrence order") {
    auto m = testkit::wiki_matrix();
    auto d = column_domain(m, *m.find_column("LicenseType"));
    CHECK(d == std::vector<CellValue>{CellValue::text("Commercial"), CellValue::text("NoLimit"), CellValue::text("GPL")});
    CHECK(code_of([&] { column_domain(m, 99); }) == "IndexOutOfRange");
}

TEST_CASE("cell ordering and typed accessors") {
    CHECK(CellValue::integer(2) < CellValue::integer(10));
    CHECK(CellValue::integer(99) < CellValue::text("0"));
    CHECK(CellValue::parse_natural("007") == 7u);
    CHECK_FALSE(CellValue::parse_natural("-1"));
    CHECK_FALSE(CellValue::parse_natural("1.5"));
    CHECK(code_of([] { (void)CellValue::text("a").as_integer(); }) == "TypeMismatch");
}

TEST_CASE("random csv round trips") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto s = testkit::random_sample(seed, 6, 12, 4);
        auto back = parse_matrix(write_csv(s.matrix));
        CHECK(back.variables == s.matrix.variables);
        CHECK(back.rows == s.matrix.rows);
    }
}
