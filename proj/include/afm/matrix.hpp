#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace afm {

/// A single cell of a configuration matrix.
///
/// Integer cells hold natural numbers, text cells hold non-empty strings.
/// Flag cells never come out of CSV ingestion; they are the interpreted
/// presence/absence of a feature in the variable table built by extraction.
class CellValue {
public:
    enum class Kind : std::uint8_t { Integer, Text, Flag };

    CellValue() = default;

    static CellValue integer(std::uint64_t v);
    static CellValue text(std::string v);
    static CellValue flag(bool present);

    /// Parses a natural number ("0", "42"); anything else is not numeric.
    static std::optional<std::uint64_t> parse_natural(std::string_view s);

    Kind kind() const noexcept { return kind_; }
    bool is_integer() const noexcept { return kind_ == Kind::Integer; }
    bool is_text() const noexcept { return kind_ == Kind::Text; }
    bool is_flag() const noexcept { return kind_ == Kind::Flag; }

    std::uint64_t as_integer() const;
    const std::string& as_text() const;
    bool as_flag() const;

    /// Plain display form: digits, the raw text, or "true"/"false".
    std::string to_string() const;

    friend bool operator==(const CellValue&, const CellValue&) = default;
    friend std::strong_ordering operator<=>(const CellValue& a, const CellValue& b);

    std::size_t hash() const noexcept;

private:
    Kind kind_ = Kind::Integer;
    std::uint64_t number_ = 0;
    std::string text_;
};

struct CellValueHash {
    std::size_t operator()(const CellValue& v) const noexcept { return v.hash(); }
};

using Row = std::vector<CellValue>;

/// M x N grid of typed cells. Rows are configurations, columns are variables.
struct ConfigurationMatrix {
    std::vector<std::string> variables;
    std::vector<Row> rows;

    std::size_t row_count() const noexcept { return rows.size(); }
    std::size_t column_count() const noexcept { return variables.size(); }
    const CellValue& cell(std::size_t row, std::size_t column) const { return rows[row][column]; }

    /// Index of the named column, or nullopt.
    std::optional<std::size_t> find_column(std::string_view name) const;
    /// True iff every cell of the column is an integer.
    bool is_numeric_column(std::size_t column) const;

    /// Checks the structural invariants (non-empty, rectangular, no duplicate rows).
    void validate() const;

    /// Copy restricted to the given columns, in the given order. Duplicate
    /// rows produced by the projection are collapsed (first occurrence kept).
    ConfigurationMatrix project(const std::vector<std::size_t>& columns) const;
};

struct IngestionHints {
    /// Columns dropped at ingestion (product identifiers and the like).
    std::vector<std::string> identifier_columns;
    /// Collapse duplicate rows instead of rejecting them.
    bool dedup_rows = false;
};

/// Parses RFC-4180 CSV text. The first record is the header. Cells that
/// parse as natural numbers become integers when the whole column does.
ConfigurationMatrix parse_matrix(std::string_view csv_text, const IngestionHints& hints = {},
                                 std::vector<std::string>* warnings = nullptr);

/// Serializes a matrix back to CSV, quoting where needed.
std::string write_csv(const ConfigurationMatrix& matrix);

/// Distinct values of column j in first-occurrence order.
std::vector<CellValue> column_domain(const ConfigurationMatrix& matrix, std::size_t column);

}  // namespace afm
