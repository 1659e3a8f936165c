#include "afm/matrix.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "afm/error.hpp"

namespace afm {

namespace {

constexpr const char* kStage = "matrix";

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::size_t row_hash(const Row& row) noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (const auto& c : row) h = (h ^ c.hash()) * 1099511628211ULL;
    return h;
}

// Set of row indices into a vector that may grow while the set is alive.
class RowIndexSet {
public:
    explicit RowIndexSet(const std::vector<Row>& rows)
        : set_(16, Hash{&rows}, Equal{&rows}) {}
    bool insert(std::size_t k) { return set_.insert(k).second; }

private:
    struct Hash {
        const std::vector<Row>* rows;
        std::size_t operator()(std::size_t k) const noexcept { return row_hash((*rows)[k]); }
    };
    struct Equal {
        const std::vector<Row>* rows;
        bool operator()(std::size_t a, std::size_t b) const { return (*rows)[a] == (*rows)[b]; }
    };
    std::unordered_set<std::size_t, Hash, Equal> set_;
};

// RFC-4180 records. Quoted fields may contain separators, quotes ("") and
// line breaks. Returns (field text, was_quoted) per field.
using Field = std::pair<std::string, bool>;

std::vector<std::vector<Field>> split_records(std::string_view text) {
    std::vector<std::vector<Field>> records;
    std::vector<Field> current;
    std::string field;
    bool quoted = false;
    bool in_quotes = false;
    bool any = false;
    std::size_t line = 1;

    auto end_field = [&] {
        current.emplace_back(quoted ? field : std::string(trim(field)), quoted);
        field.clear();
        quoted = false;
    };
    auto end_record = [&] {
        end_field();
        // Skip blank lines entirely.
        if (!(current.size() == 1 && !current[0].second && current[0].first.empty()))
            records.push_back(std::move(current));
        current.clear();
        any = false;
    };

    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF)
        text.remove_prefix(3);

    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (!trim(field).empty())
                    throw Error(kStage, "MalformedCsv", "stray quote on line " + std::to_string(line));
                field.clear();
                quoted = true;
                in_quotes = true;
                any = true;
                break;
            case ',':
                end_field();
                any = true;
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                ++line;
                break;
            default:
                if (quoted && ch != ' ' && ch != '\t')
                    throw Error(kStage, "MalformedCsv", "text after closing quote on line " + std::to_string(line));
                if (!quoted) field.push_back(ch);
                any = true;
        }
    }
    if (in_quotes) throw Error(kStage, "MalformedCsv", "unterminated quoted field");
    if (any || !field.empty()) end_record();
    return records;
}

std::string quote_csv(const std::string& s) {
    bool needs = s.find_first_of(",\"\n\r") != std::string::npos || s != std::string(trim(s));
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

}  // namespace

CellValue CellValue::integer(std::uint64_t v) {
    CellValue c;
    c.kind_ = Kind::Integer;
    c.number_ = v;
    return c;
}

CellValue CellValue::text(std::string v) {
    CellValue c;
    c.kind_ = Kind::Text;
    c.text_ = std::move(v);
    return c;
}

CellValue CellValue::flag(bool present) {
    CellValue c;
    c.kind_ = Kind::Flag;
    c.number_ = present ? 1 : 0;
    return c;
}

std::optional<std::uint64_t> CellValue::parse_natural(std::string_view s) {
    if (s.empty() || s.size() > 19) return std::nullopt;
    std::uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

std::uint64_t CellValue::as_integer() const {
    if (kind_ != Kind::Integer) throw Error(kStage, "TypeMismatch", "cell is not an integer: " + to_string());
    return number_;
}

const std::string& CellValue::as_text() const {
    if (kind_ != Kind::Text) throw Error(kStage, "TypeMismatch", "cell is not text: " + to_string());
    return text_;
}

bool CellValue::as_flag() const {
    if (kind_ != Kind::Flag) throw Error(kStage, "TypeMismatch", "cell is not a flag: " + to_string());
    return number_ != 0;
}

std::string CellValue::to_string() const {
    switch (kind_) {
        case Kind::Integer: return std::to_string(number_);
        case Kind::Text: return text_;
        case Kind::Flag: return number_ ? "true" : "false";
    }
    return {};
}

std::strong_ordering operator<=>(const CellValue& a, const CellValue& b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    if (a.kind_ == CellValue::Kind::Text) return a.text_.compare(b.text_) <=> 0;
    return a.number_ <=> b.number_;
}

std::size_t CellValue::hash() const noexcept {
    std::size_t h = kind_ == Kind::Text ? std::hash<std::string>{}(text_) : std::hash<std::uint64_t>{}(number_);
    return h ^ (static_cast<std::size_t>(kind_) * 0x9e3779b97f4a7c15ULL);
}

std::optional<std::size_t> ConfigurationMatrix::find_column(std::string_view name) const {
    auto it = std::find(variables.begin(), variables.end(), name);
    if (it == variables.end()) return std::nullopt;
    return static_cast<std::size_t>(it - variables.begin());
}

bool ConfigurationMatrix::is_numeric_column(std::size_t column) const {
    return std::all_of(rows.begin(), rows.end(), [&](const Row& r) { return r[column].is_integer(); });
}

void ConfigurationMatrix::validate() const {
    if (variables.empty()) throw Error(kStage, "EmptyMatrix", "no columns");
    if (rows.empty()) throw Error(kStage, "EmptyMatrix", "no configurations");
    RowIndexSet seen(rows);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].size() != variables.size())
            throw Error(kStage, "RaggedRow", "row " + std::to_string(k + 1) + " has " +
                                                 std::to_string(rows[k].size()) + " cells, expected " +
                                                 std::to_string(variables.size()));
        if (!seen.insert(k))
            throw Error(kStage, "DuplicateRow", "row " + std::to_string(k + 1) + " repeats an earlier configuration");
    }
}

ConfigurationMatrix ConfigurationMatrix::project(const std::vector<std::size_t>& columns) const {
    ConfigurationMatrix out;
    for (auto j : columns) out.variables.push_back(variables.at(j));
    out.rows.reserve(rows.size());
    RowIndexSet seen(out.rows);
    for (const auto& row : rows) {
        Row r;
        r.reserve(columns.size());
        for (auto j : columns) r.push_back(row[j]);
        out.rows.push_back(std::move(r));
        if (!seen.insert(out.rows.size() - 1)) out.rows.pop_back();
    }
    return out;
}

ConfigurationMatrix parse_matrix(std::string_view csv_text, const IngestionHints& hints,
                                 std::vector<std::string>* warnings) {
    auto records = split_records(csv_text);
    if (records.empty()) throw Error(kStage, "EmptyMatrix", "missing header row");

    const auto& header = records.front();
    std::vector<std::size_t> kept;
    std::unordered_set<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        const auto& name = header[j].first;
        if (name.empty()) throw Error(kStage, "EmptyCell", "header column " + std::to_string(j + 1) + " has no name");
        if (!names.insert(name).second) throw Error(kStage, "DuplicateColumn", name);
        bool is_identifier = std::find(hints.identifier_columns.begin(), hints.identifier_columns.end(), name) !=
                             hints.identifier_columns.end();
        if (!is_identifier) kept.push_back(j);
    }
    for (const auto& id : hints.identifier_columns)
        if (!names.count(id)) throw Error(kStage, "UnknownColumn", "identifier column '" + id + "' not in header");
    if (kept.empty()) throw Error(kStage, "EmptyMatrix", "no non-identifier columns");
    if (records.size() == 1) throw Error(kStage, "EmptyMatrix", "no configurations");

    // Raw text first; typing is decided per column.
    std::vector<std::vector<std::string>> raw;
    for (std::size_t k = 1; k < records.size(); ++k) {
        const auto& rec = records[k];
        if (rec.size() != header.size())
            throw Error(kStage, "RaggedRow", "row " + std::to_string(k) + " has " + std::to_string(rec.size()) +
                                                 " cells, expected " + std::to_string(header.size()));
        std::vector<std::string> r;
        for (auto j : kept) {
            if (trim(rec[j].first).empty())
                throw Error(kStage, "EmptyCell", "row " + std::to_string(k) + ", column '" + header[j].first + "'");
            r.push_back(rec[j].first);
        }
        raw.push_back(std::move(r));
    }

    ConfigurationMatrix m;
    for (auto j : kept) m.variables.push_back(header[j].first);
    m.rows.assign(raw.size(), Row(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
        std::size_t numeric = 0;
        for (const auto& r : raw)
            if (CellValue::parse_natural(r[j])) ++numeric;
        if (numeric != 0 && numeric != raw.size())
            throw Error(kStage, "MixedColumn", "column '" + m.variables[j] + "' mixes numbers and text");
        for (std::size_t k = 0; k < raw.size(); ++k)
            m.rows[k][j] = numeric ? CellValue::integer(*CellValue::parse_natural(raw[k][j])) : CellValue::text(raw[k][j]);
    }

    if (hints.dedup_rows) {
        std::vector<Row> unique;
        unique.reserve(m.rows.size());
        RowIndexSet seen(unique);
        for (std::size_t k = 0; k < m.rows.size(); ++k) {
            unique.push_back(std::move(m.rows[k]));
            if (!seen.insert(unique.size() - 1)) {
                unique.pop_back();
                if (warnings)
                    warnings->push_back("dropped duplicate configuration at row " + std::to_string(k + 1));
            }
        }
        m.rows = std::move(unique);
    }
    m.validate();
    return m;
}

std::string write_csv(const ConfigurationMatrix& matrix) {
    std::string out;
    for (std::size_t j = 0; j < matrix.variables.size(); ++j) {
        if (j) out += ',';
        out += quote_csv(matrix.variables[j]);
    }
    out += '\n';
    for (const auto& row : matrix.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += quote_csv(row[j].to_string());
        }
        out += '\n';
    }
    return out;
}

std::vector<CellValue> column_domain(const ConfigurationMatrix& matrix, std::size_t column) {
    if (column >= matrix.column_count())
        throw Error(kStage, "IndexOutOfRange", "column " + std::to_string(column) + " of " +
                                                   std::to_string(matrix.column_count()));
    std::vector<CellValue> values;
    std::unordered_set<CellValue, CellValueHash> seen;
    for (const auto& row : matrix.rows)
        if (seen.insert(row[column]).second) values.push_back(row[column]);
    return values;
}

}  // namespace afm
