#include "afm/model.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>

#include "afm/error.hpp"

namespace afm {

namespace {

bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' || c == '+' ||
           c == '#' || c == '/' || c == '\'';
}

bool bare_safe(const std::string& s) {
    if (s.empty()) return false;
    unsigned char first = static_cast<unsigned char>(s.front());
    if (!std::isalnum(first) && first != '_') return false;
    if (CellValue::parse_natural(s)) return false;
    return std::all_of(s.begin(), s.end(), name_char);
}

class ConstraintLexer {
public:
    explicit ConstraintLexer(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw Error("constraints", "ParseError", what + " at offset " + std::to_string(pos_) + " in '" +
                                                     std::string(text_) + "'");
    }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip();
        return pos_ >= text_.size();
    }
    bool accept(std::string_view tok) {
        skip();
        if (text_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    bool peek(std::string_view tok) {
        skip();
        return text_.substr(pos_, tok.size()) == tok;
    }

    // Returns (text, was_quoted).
    std::pair<std::string, bool> name() {
        skip();
        if (pos_ < text_.size() && text_[pos_] == '"') {
            ++pos_;
            std::string out;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
                out.push_back(text_[pos_++]);
            }
            if (pos_ >= text_.size()) fail("unterminated quoted name");
            ++pos_;
            if (out.empty()) fail("empty name");
            return {out, true};
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
        if (start == pos_) fail("expected a name");
        return {std::string(text_.substr(start, pos_ - start)), false};
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

BoolFactor parse_factor(ConstraintLexer& lex) {
    if (lex.accept("!")) return BoolFactor::not_feature(lex.name().first);
    auto name = lex.name().first;
    if (lex.peek("=>")) return BoolFactor::feature(name);
    std::optional<RelOp> op;
    if (lex.accept("<=")) op = RelOp::Le;
    else if (lex.accept(">=")) op = RelOp::Ge;
    else if (lex.accept("<")) op = RelOp::Lt;
    else if (lex.accept(">")) op = RelOp::Gt;
    else if (lex.accept("=")) op = RelOp::Eq;
    if (!op) return BoolFactor::feature(name);
    auto [lit, quoted] = lex.name();
    CellValue literal;
    if (!quoted && CellValue::parse_natural(lit)) literal = CellValue::integer(*CellValue::parse_natural(lit));
    else if (*op != RelOp::Eq) lex.fail("ordering comparison needs a natural number");
    else literal = CellValue::text(lit);
    return BoolFactor::relation(name, *op, literal);
}

std::string render_factor(const BoolFactor& f) {
    switch (f.kind) {
        case BoolFactor::Kind::Feature: return render_name(f.name);
        case BoolFactor::Kind::NotFeature: return "!" + render_name(f.name);
        case BoolFactor::Kind::Relation:
            return render_name(f.name) + " " + to_string(f.op) + " " +
                   (f.literal.is_integer() ? f.literal.to_string() : render_name(f.literal.to_string()));
    }
    return {};
}

}  // namespace

std::vector<std::size_t> Hierarchy::children(std::size_t f) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < parent.size(); ++c)
        if (parent[c] == f) out.push_back(c);
    return out;
}

std::size_t Hierarchy::depth(std::size_t f) const {
    std::size_t d = 0;
    while (parent[f] != kNoParent) {
        f = parent[f];
        ++d;
    }
    return d;
}

std::vector<std::size_t> Hierarchy::ancestors_or_self(std::size_t f) const {
    std::vector<std::size_t> out{f};
    while (parent[f] != kNoParent) {
        f = parent[f];
        out.push_back(f);
    }
    return out;
}

std::vector<std::size_t> Hierarchy::preorder() const {
    std::vector<std::vector<std::size_t>> kids(parent.size());
    for (std::size_t c = 0; c < parent.size(); ++c)
        if (parent[c] != kNoParent) kids[parent[c]].push_back(c);
    std::vector<std::size_t> out, stack{root};
    while (!stack.empty()) {
        auto f = stack.back();
        stack.pop_back();
        out.push_back(f);
        for (auto it = kids[f].rbegin(); it != kids[f].rend(); ++it) stack.push_back(*it);
    }
    return out;
}

std::string to_string(GroupKind kind) {
    switch (kind) {
        case GroupKind::Mutex: return "mutex";
        case GroupKind::Or: return "or";
        case GroupKind::Xor: return "xor";
    }
    return {};
}

std::optional<GroupKind> parse_group_kind(std::string_view text) {
    for (auto k : {GroupKind::Mutex, GroupKind::Or, GroupKind::Xor})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::string to_string(RelOp op) {
    switch (op) {
        case RelOp::Eq: return "=";
        case RelOp::Le: return "<=";
        case RelOp::Ge: return ">=";
        case RelOp::Lt: return "<";
        case RelOp::Gt: return ">";
    }
    return {};
}

bool rel_holds(RelOp op, std::uint64_t v, std::uint64_t k) {
    switch (op) {
        case RelOp::Eq: return v == k;
        case RelOp::Le: return v <= k;
        case RelOp::Ge: return v >= k;
        case RelOp::Lt: return v < k;
        case RelOp::Gt: return v > k;
    }
    return false;
}

std::string render_name(const std::string& name) {
    if (bare_safe(name)) return name;
    std::string out = "\"";
    for (char c : name) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out + "\"";
}

std::string constraint_category(const ReadableConstraint& rc) {
    using K = BoolFactor::Kind;
    if (rc.left.kind == K::Feature && rc.right.kind == K::Feature) return "requires";
    if (rc.left.kind == K::Feature && rc.right.kind == K::NotFeature) return "excludes";
    if (rc.left.kind == K::NotFeature && rc.right.kind == K::Feature) return "or";
    return "complex";
}

std::string render_constraint(const ReadableConstraint& rc) {
    return render_factor(rc.left) + " => " + render_factor(rc.right);
}

ReadableConstraint parse_constraint(std::string_view text) {
    ConstraintLexer lex(text);
    ReadableConstraint rc;
    rc.left = parse_factor(lex);
    if (!lex.accept("=>")) lex.fail("expected '=>'");
    rc.right = parse_factor(lex);
    if (!lex.at_end()) lex.fail("trailing text");
    return rc;
}

std::optional<std::size_t> AttributedFeatureModel::find_feature(std::string_view name) const {
    auto it = std::find(features.begin(), features.end(), name);
    if (it == features.end()) return std::nullopt;
    return static_cast<std::size_t>(it - features.begin());
}

std::optional<std::size_t> AttributedFeatureModel::find_attribute(std::string_view name) const {
    for (std::size_t a = 0; a < attributes.size(); ++a)
        if (attributes[a].name == name) return a;
    return std::nullopt;
}

std::vector<FeatureGroup> AttributedFeatureModel::groups_of(GroupKind kind) const {
    std::vector<FeatureGroup> out;
    for (const auto& g : groups)
        if (g.kind == kind) out.push_back(g);
    return out;
}

void AttributedFeatureModel::check_structure() const {
    auto fail = [](const std::string& what) { throw Error("pipeline", "InvalidModel", what); };
    std::size_t n = features.size();
    if (n == 0 || hierarchy.parent.size() != n || mandatory.size() != n) fail("feature tables disagree in size");
    if (hierarchy.root >= n || hierarchy.parent[hierarchy.root] != kNoParent) fail("bad root");
    for (std::size_t f = 0; f < n; ++f) {
        if (f == hierarchy.root) continue;
        if (hierarchy.parent[f] >= n) fail("feature '" + features[f] + "' has no parent");
        std::size_t steps = 0, g = f;
        while (g != hierarchy.root) {
            g = hierarchy.parent[g];
            if (g >= n || ++steps > n) fail("hierarchy is not a tree at '" + features[f] + "'");
        }
    }
    std::set<std::string> names(features.begin(), features.end());
    if (names.size() != n) fail("duplicate feature names");
    std::set<std::size_t> grouped;
    for (const auto& g : groups) {
        if (g.children.size() < 2) fail("group with fewer than two children");
        for (auto c : g.children) {
            if (c >= n || hierarchy.parent[c] != g.parent) fail("group child does not share the group parent");
            if (mandatory[c]) fail("mandatory feature '" + features[c] + "' inside a group");
            if (!grouped.insert(c).second) fail("overlapping groups at '" + features[c] + "'");
        }
    }
    for (const auto& a : attributes) {
        if (names.count(a.name)) fail("'" + a.name + "' is both a feature and an attribute");
        if (a.host >= n) fail("attribute '" + a.name + "' placed outside F");
    }
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace afm
