#include "afm/semantics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "afm/constraints.hpp"
#include "afm/error.hpp"

namespace afm {

namespace {

constexpr const char* kStage = "semantics";

struct Atom {
    enum class Kind { Selected, Deselected, Relation } kind = Kind::Selected;
    std::size_t var = 0;  // feature or attribute index
    RelOp op = RelOp::Eq;
    CellValue literal;

    bool eval(const Configuration& cfg) const {
        switch (kind) {
            case Kind::Selected: return cfg.selected[var];
            case Kind::Deselected: return !cfg.selected[var];
            case Kind::Relation: {
                const auto& v = cfg.values[var];
                if (op == RelOp::Eq) return same_value(v, literal);
                if (!v.is_integer() || !literal.is_integer()) return false;
                return rel_holds(op, v.as_integer(), literal.as_integer());
            }
        }
        return false;
    }
};

struct Clause {
    Atom left, right;
    bool eval(const Configuration& cfg) const { return !left.eval(cfg) || right.eval(cfg); }
};

Atom compile_factor(const AttributedFeatureModel& m, const BoolFactor& f) {
    Atom a;
    if (f.kind == BoolFactor::Kind::Relation) {
        auto idx = m.find_attribute(f.name);
        if (!idx) throw Error(kStage, "UnknownVariable", "attribute '" + f.name + "'");
        a.kind = Atom::Kind::Relation;
        a.var = *idx;
        a.op = f.op;
        a.literal = f.literal;
        return a;
    }
    auto idx = m.find_feature(f.name);
    if (!idx) throw Error(kStage, "UnknownVariable", "feature '" + f.name + "'");
    a.kind = f.kind == BoolFactor::Kind::Feature ? Atom::Kind::Selected : Atom::Kind::Deselected;
    a.var = *idx;
    return a;
}

const ColumnBinding* find_binding(const AttributedFeatureModel& m, const std::string& column) {
    for (const auto& b : m.columns)
        if (b.column == column) return &b;
    return nullptr;
}

// One Φ disjunct as required values. sel: -1 free, 0/1 required.
struct Disjunct {
    std::vector<signed char> sel;
    std::vector<std::optional<CellValue>> val;
    bool possible = true;

    bool matches(const Configuration& cfg) const {
        if (!possible) return false;
        for (std::size_t f = 0; f < sel.size(); ++f)
            if (sel[f] >= 0 && cfg.selected[f] != (sel[f] == 1)) return false;
        for (std::size_t a = 0; a < val.size(); ++a)
            if (val[a] && !same_value(*val[a], cfg.values[a])) return false;
        return true;
    }
};

std::vector<Disjunct> compile_phi(const AttributedFeatureModel& m) {
    std::vector<Disjunct> out;
    if (!m.phi) return out;
    std::vector<const ColumnBinding*> bindings;
    for (const auto& c : m.phi->columns) {
        const auto* b = find_binding(m, c);
        if (!b) throw Error(kStage, "UnknownVariable", "Φ refers to unbound column '" + c + "'");
        bindings.push_back(b);
    }
    auto need = [&](Disjunct& d, const std::string& feature, bool on) {
        auto f = m.find_feature(feature);
        if (!f) {
            if (on) d.possible = false;
            return;
        }
        if (d.sel[*f] >= 0 && d.sel[*f] != (on ? 1 : 0)) d.possible = false;
        d.sel[*f] = on ? 1 : 0;
    };
    for (const auto& row : m.phi->rows) {
        Disjunct d;
        d.sel.assign(m.features.size(), -1);
        d.val.assign(m.attributes.size(), std::nullopt);
        for (std::size_t j = 0; j < bindings.size(); ++j) {
            const auto& b = *bindings[j];
            const auto& cell = row[j];
            if (b.kind == ColumnKind::Attribute) {
                auto a = m.find_attribute(b.target);
                if (!a) throw Error(kStage, "UnknownVariable", "attribute '" + b.target + "'");
                d.val[*a] = cell;
                continue;
            }
            auto presence = binding_presence(b, cell);
            if (!presence) {
                d.possible = false;
                continue;
            }
            need(d, b.target, *presence && b.live);
            for (const auto& [value, child] : b.children) need(d, child, same_value(value, cell));
        }
        out.push_back(std::move(d));
    }
    return out;
}

struct Compiled {
    const AttributedFeatureModel* m = nullptr;
    std::vector<std::size_t> order;  // features in hierarchy preorder
    std::vector<std::size_t> pos;    // feature -> position
    std::vector<Clause> clauses;
    std::vector<std::vector<std::size_t>> clauses_at;  // by position
    std::vector<std::vector<std::size_t>> groups_at;   // by position
    std::vector<Disjunct> phi;
    bool with_phi = false;

    Compiled(const AttributedFeatureModel& model, bool use_phi) : m(&model) {
        model.check_structure();
        std::size_t nf = model.features.size(), na = model.attributes.size();
        order = model.hierarchy.preorder();
        pos.assign(nf, 0);
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
        clauses_at.resize(nf + na);
        groups_at.resize(nf + na);
        auto position = [&](const Atom& a) { return a.kind == Atom::Kind::Relation ? nf + a.var : pos[a.var]; };
        for (const auto& rc : model.constraints) {
            Clause c{compile_factor(model, rc.left), compile_factor(model, rc.right)};
            clauses_at[std::max(position(c.left), position(c.right))].push_back(clauses.size());
            clauses.push_back(c);
        }
        for (std::size_t g = 0; g < model.groups.size(); ++g) {
            std::size_t last = 0;
            for (auto c : model.groups[g].children) last = std::max(last, pos[c]);
            groups_at[last].push_back(g);
        }
        with_phi = use_phi && model.phi.has_value();
        if (with_phi) phi = compile_phi(model);
    }

    bool group_ok(const FeatureGroup& g, const Configuration& cfg) const {
        if (!cfg.selected[g.parent]) return true;
        std::size_t n = 0;
        for (auto c : g.children) n += cfg.selected[c];
        switch (g.kind) {
            case GroupKind::Mutex: return n <= 1;
            case GroupKind::Or: return n >= 1;
            case GroupKind::Xor: return n == 1;
        }
        return false;
    }

    bool checks_ok(std::size_t position, const Configuration& cfg) const {
        for (auto g : groups_at[position])
            if (!group_ok(m->groups[g], cfg)) return false;
        for (auto c : clauses_at[position])
            if (!clauses[c].eval(cfg)) return false;
        return true;
    }
};

struct Enumerator {
    const Compiled& c;
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    Configuration cfg;
    std::vector<Configuration> out;

    void tick() {
        if (++nodes > budget)
            throw Error(kStage, "BudgetExceeded", "more than " + std::to_string(budget) + " search nodes");
    }

    std::vector<std::size_t> narrow_feature(const std::vector<std::size_t>& alive, std::size_t f, bool on) const {
        std::vector<std::size_t> next;
        for (auto d : alive) {
            auto s = c.phi[d].sel[f];
            if (s < 0 || (s == 1) == on) next.push_back(d);
        }
        return next;
    }
    std::vector<std::size_t> narrow_value(const std::vector<std::size_t>& alive, std::size_t a,
                                          const CellValue& v) const {
        std::vector<std::size_t> next;
        for (auto d : alive) {
            const auto& req = c.phi[d].val[a];
            if (!req || same_value(*req, v)) next.push_back(d);
        }
        return next;
    }

    void run(std::size_t position, const std::vector<std::size_t>& alive) {
        const auto& m = *c.m;
        std::size_t nf = m.features.size();
        if (c.with_phi && alive.empty()) return;
        if (position == nf + m.attributes.size()) {
            out.push_back(cfg);
            return;
        }
        if (position < nf) {
            auto f = c.order[position];
            std::vector<bool> options;
            if (f == m.hierarchy.root) options = {true};
            else if (!cfg.selected[m.hierarchy.parent[f]]) options = {false};
            else if (m.mandatory[f]) options = {true};
            else options = {false, true};
            for (bool on : options) {
                tick();
                cfg.selected[f] = on;
                if (c.checks_ok(position, cfg)) run(position + 1, c.with_phi ? narrow_feature(alive, f, on) : alive);
            }
            cfg.selected[f] = false;
            return;
        }
        std::size_t a = position - nf;
        const auto& attr = m.attributes[a];
        auto try_value = [&](const CellValue& v) {
            tick();
            cfg.values[a] = v;
            if (c.checks_ok(position, cfg)) run(position + 1, c.with_phi ? narrow_value(alive, a, v) : alive);
        };
        if (!cfg.selected[attr.host]) try_value(attr.domain.null_value);
        else
            for (const auto& v : attr.domain.values) try_value(v);
    }
};

std::set<std::string> selected_names(const AttributedFeatureModel& m, const Configuration& cfg) {
    std::set<std::string> out;
    for (std::size_t f = 0; f < m.features.size(); ++f)
        if (cfg.selected[f] && f != m.hierarchy.root) out.insert(m.features[f]);
    return out;
}

using Canonical = std::pair<std::set<std::string>, std::map<std::string, std::string>>;

std::set<Canonical> canonical(const AttributedFeatureModel& m, const std::vector<Configuration>& cfgs) {
    std::set<Canonical> out;
    for (const auto& cfg : cfgs) {
        std::map<std::string, std::string> values;
        for (std::size_t a = 0; a < m.attributes.size(); ++a) values[m.attributes[a].name] = cfg.values[a].to_string();
        out.emplace(selected_names(m, cfg), std::move(values));
    }
    return out;
}

bool all_hold(const std::vector<Configuration>& cfgs, const Clause& c) {
    return std::all_of(cfgs.begin(), cfgs.end(), [&](const Configuration& cfg) { return c.eval(cfg); });
}

std::string member_list(const AttributedFeatureModel& m, const std::vector<std::size_t>& members) {
    std::string out = "{";
    for (std::size_t i = 0; i < members.size(); ++i) out += (i ? ", " : "") + m.features[members[i]];
    return out + "}";
}

}  // namespace

bool eval_config(const AttributedFeatureModel& model, const Configuration& cfg, bool with_phi) {
    Compiled c(model, with_phi);
    const auto& h = model.hierarchy;
    if (cfg.selected.size() != model.features.size() || cfg.values.size() != model.attributes.size())
        throw Error(kStage, "UnknownVariable", "configuration does not match the model's variables");
    if (!cfg.selected[h.root]) return false;
    for (std::size_t f = 0; f < model.features.size(); ++f) {
        if (f == h.root) continue;
        if (cfg.selected[f] && !cfg.selected[h.parent[f]]) return false;
        if (model.mandatory[f] && cfg.selected[h.parent[f]] && !cfg.selected[f]) return false;
    }
    for (const auto& g : model.groups)
        if (!c.group_ok(g, cfg)) return false;
    for (std::size_t a = 0; a < model.attributes.size(); ++a) {
        const auto& attr = model.attributes[a];
        const auto& v = cfg.values[a];
        if (!cfg.selected[attr.host]) {
            if (!same_value(v, attr.domain.null_value)) return false;
        } else if (!attr.domain.contains(v)) {
            return false;
        }
    }
    for (const auto& cl : c.clauses)
        if (!cl.eval(cfg)) return false;
    if (c.with_phi)
        return std::any_of(c.phi.begin(), c.phi.end(), [&](const Disjunct& d) { return d.matches(cfg); });
    return true;
}

std::vector<Configuration> enumerate_configurations(const AttributedFeatureModel& model, bool with_phi,
                                                    std::uint64_t budget) {
    Compiled c(model, with_phi);
    Enumerator e{c, budget, 0, {}, {}};
    e.cfg.selected.assign(model.features.size(), false);
    e.cfg.values.assign(model.attributes.size(), CellValue{});
    std::vector<std::size_t> alive(c.phi.size());
    for (std::size_t d = 0; d < alive.size(); ++d) alive[d] = d;
    e.run(0, alive);
    std::sort(e.out.begin(), e.out.end());
    return e.out;
}

Configuration configuration_of_row(const AttributedFeatureModel& model, const ConfigurationMatrix& matrix,
                                   std::size_t row) {
    Configuration cfg;
    cfg.selected.assign(model.features.size(), false);
    cfg.values.assign(model.attributes.size(), CellValue{});
    cfg.selected[model.hierarchy.root] = true;
    for (const auto& b : model.columns) {
        auto j = matrix.find_column(b.column);
        if (!j) throw Error(kStage, "UnknownVariable", "matrix has no column '" + b.column + "'");
        const auto& cell = matrix.cell(row, *j);
        if (b.kind == ColumnKind::Attribute) {
            auto a = model.find_attribute(b.target);
            if (!a) throw Error(kStage, "UnknownVariable", "attribute '" + b.target + "'");
            const auto& d = model.attributes[*a].domain;
            CellValue v = cell;
            for (const auto& x : d.values)
                if (same_value(x, cell)) v = x;
            if (same_value(d.null_value, cell)) v = d.null_value;
            cfg.values[*a] = v;
            continue;
        }
        auto presence = binding_presence(b, cell);
        if (!presence)
            throw Error(kStage, "UnknownValue", "'" + cell.to_string() + "' in column '" + b.column + "'");
        if (auto f = model.find_feature(b.target); f && b.live) cfg.selected[*f] = *presence;
        for (const auto& [value, child] : b.children)
            if (auto f = model.find_feature(child)) cfg.selected[*f] = same_value(value, cell);
    }
    return cfg;
}

std::vector<Configuration> matrix_configurations(const AttributedFeatureModel& model,
                                                 const ConfigurationMatrix& matrix) {
    std::vector<Configuration> out;
    for (std::size_t k = 0; k < matrix.row_count(); ++k) out.push_back(configuration_of_row(model, matrix, k));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SemanticsReport check_semantics(const AttributedFeatureModel& model, const ConfigurationMatrix& matrix,
                                bool with_phi, std::uint64_t budget) {
    SemanticsReport r;
    auto mine = enumerate_configurations(model, with_phi, budget);
    auto rows = matrix_configurations(model, matrix);
    r.model_count = mine.size();
    r.matrix_count = rows.size();
    std::set_difference(mine.begin(), mine.end(), rows.begin(), rows.end(), std::back_inserter(r.extra));
    std::set_difference(rows.begin(), rows.end(), mine.begin(), mine.end(), std::back_inserter(r.missing));
    r.sound = r.extra.empty();
    r.complete = r.missing.empty();
    return r;
}

std::string to_string(MutationClass c) {
    switch (c) {
        case MutationClass::Mandatory: return "mandatory";
        case MutationClass::AddGroup: return "add-group";
        case MutationClass::PromoteGroup: return "promote-group";
        case MutationClass::AddConstraint: return "add-constraint";
    }
    return {};
}

MaximalityReport audit_maximality(const AttributedFeatureModel& m, std::uint64_t budget) {
    MaximalityReport rep;
    rep.or_groups_audited = m.provenance.or_groups && !m.provenance.or_groups_timed_out;
    auto semantics = enumerate_configurations(m, true, budget);
    auto diagram = m.phi ? enumerate_configurations(m, false, budget) : semantics;
    const auto& h = m.hierarchy;
    std::size_t nf = m.features.size();
    auto flag = [&](MutationClass k, std::string detail) { rep.violations.push_back({k, std::move(detail)}); };
    auto idx = [](MutationClass k) { return static_cast<std::size_t>(k); };

    // Mandatory edges.
    for (std::size_t f = 0; f < nf; ++f) {
        if (f == h.root || m.mandatory[f]) continue;
        ++rep.examined[idx(MutationClass::Mandatory)];
        auto p = h.parent[f];
        bool kept = std::all_of(semantics.begin(), semantics.end(),
                                [&](const Configuration& c) { return !c.selected[p] || c.selected[f]; });
        if (kept) flag(MutationClass::Mandatory, m.features[f] + " -> " + m.features[p]);
    }

    auto satisfies = [&](GroupKind kind, std::size_t p, const std::vector<std::size_t>& members) {
        return std::all_of(semantics.begin(), semantics.end(), [&](const Configuration& c) {
            if (!c.selected[p]) return true;
            std::size_t n = 0;
            for (auto x : members) n += c.selected[x];
            return kind == GroupKind::Mutex ? n <= 1 : kind == GroupKind::Or ? n >= 1 : n == 1;
        });
    };

    // New groups over ungrouped, optional siblings.
    std::vector<bool> grouped(nf, false);
    for (const auto& g : m.groups)
        for (auto c : g.children) grouped[c] = true;
    for (std::size_t p = 0; p < nf; ++p) {
        std::vector<std::size_t> free;
        for (auto c : h.children(p))
            if (!m.mandatory[c] && !grouped[c]) free.push_back(c);
        if (free.size() < 2) continue;
        if (free.size() > 16)
            throw Error(kStage, "BudgetExceeded", "too many ungrouped siblings under '" + m.features[p] + "'");
        for (std::uint32_t mask = 0; mask < (1u << free.size()); ++mask) {
            if (std::popcount(mask) < 2) continue;
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < free.size(); ++i)
                if (mask & (1u << i)) members.push_back(free[i]);
            for (auto kind : {GroupKind::Mutex, GroupKind::Or, GroupKind::Xor}) {
                if (kind == GroupKind::Or && !rep.or_groups_audited) continue;
                ++rep.examined[idx(MutationClass::AddGroup)];
                if (satisfies(kind, p, members))
                    flag(MutationClass::AddGroup, to_string(kind) + " " + member_list(m, members) + " under " + m.features[p]);
            }
        }
    }

    // Promotion to xor.
    for (const auto& g : m.groups) {
        if (g.kind == GroupKind::Xor) continue;
        ++rep.examined[idx(MutationClass::PromoteGroup)];
        if (satisfies(GroupKind::Xor, g.parent, g.children))
            flag(MutationClass::PromoteGroup, to_string(g.kind) + " " + member_list(m, g.children));
    }

    // Readable constraints within the synthesis' vocabulary: feature
    // literals, and relations over the interesting bounds.
    std::vector<Clause> family;
    std::vector<ReadableConstraint> texts;
    auto add = [&](const BoolFactor& l, const BoolFactor& r) {
        texts.push_back({l, r});
        family.push_back({compile_factor(m, l), compile_factor(m, r)});
    };
    ConstraintOptions options;
    std::vector<std::vector<RelationCandidate>> rights(m.attributes.size());
    for (std::size_t a = 0; a < m.attributes.size(); ++a)
        rights[a] = relation_candidates(m.attributes[a].name, m.attributes[a].domain, m.attributes[a].bounds, options);
    for (std::size_t f = 0; f < nf; ++f) {
        if (f == h.root) continue;
        for (std::size_t g = 0; g < nf; ++g) {
            if (g == h.root || g == f) continue;
            add(BoolFactor::feature(m.features[f]), BoolFactor::feature(m.features[g]));
            if (f < g) {
                add(BoolFactor::feature(m.features[f]), BoolFactor::not_feature(m.features[g]));
                add(BoolFactor::not_feature(m.features[f]), BoolFactor::feature(m.features[g]));
            }
        }
        for (const auto& rs : rights)
            for (const auto& r : rs) add(BoolFactor::feature(m.features[f]), r.factor);
    }
    for (std::size_t ai = 0; ai < m.attributes.size(); ++ai) {
        const auto& at = m.attributes[ai];
        for (const auto& cls : left_classes(at.name, at.domain, at.bounds, options))
            for (std::size_t aj = 0; aj < m.attributes.size(); ++aj)
                if (aj != ai)
                    for (const auto& r : rights[aj]) add(cls.factor, r.factor);
    }
    std::set<std::string> present;
    for (const auto& rc : m.constraints) present.insert(render_constraint(rc));
    for (std::size_t i = 0; i < family.size(); ++i) {
        auto text = render_constraint(texts[i]);
        if (present.count(text)) continue;
        ++rep.examined[idx(MutationClass::AddConstraint)];
        if (all_hold(semantics, family[i]) && !all_hold(diagram, family[i]))
            flag(MutationClass::AddConstraint, text);
    }
    return rep;
}

bool same_semantics(const AttributedFeatureModel& a, const AttributedFeatureModel& b, std::uint64_t budget) {
    return canonical(a, enumerate_configurations(a, true, budget)) ==
           canonical(b, enumerate_configurations(b, true, budget));
}

bool structurally_equal(const AttributedFeatureModel& a, const AttributedFeatureModel& b) {
    auto shape = [](const AttributedFeatureModel& m) {
        std::set<std::string> s;
        s.insert("root " + m.root_name());
        for (std::size_t f = 0; f < m.features.size(); ++f) {
            if (f == m.hierarchy.root) continue;
            s.insert("edge " + m.features[f] + " " + m.features[m.hierarchy.parent[f]] +
                     (m.mandatory[f] ? " mandatory" : ""));
        }
        for (const auto& g : m.groups) {
            std::vector<std::string> names;
            for (auto c : g.children) names.push_back(m.features[c]);
            std::sort(names.begin(), names.end());
            s.insert("group " + to_string(g.kind) + " " + m.features[g.parent] + " " + group_label("", names));
        }
        for (const auto& at : m.attributes) s.insert("place " + at.name + " " + m.features[at.host]);
        for (const auto& rc : m.constraints) s.insert("rc " + render_constraint(rc));
        return s;
    };
    return shape(a) == shape(b);
}

std::string format_configuration(const AttributedFeatureModel& m, const Configuration& cfg) {
    std::string out = "{";
    bool first = true;
    for (std::size_t f = 0; f < m.features.size(); ++f)
        if (cfg.selected[f] && f != m.hierarchy.root) {
            out += (first ? "" : ", ") + m.features[f];
            first = false;
        }
    out += ";";
    for (std::size_t a = 0; a < m.attributes.size(); ++a)
        out += " " + m.attributes[a].name + "=" + cfg.values[a].to_string() + (a + 1 < m.attributes.size() ? "," : "");
    return out + "}";
}

std::string format_report(const AttributedFeatureModel& model, const SemanticsReport& r) {
    std::ostringstream os;
    os << "sound: " << (r.sound ? "true" : "false") << "\n";
    os << "complete: " << (r.complete ? "true" : "false") << "\n";
    os << "model-configurations: " << r.model_count << "\n";
    os << "matrix-configurations: " << r.matrix_count << "\n";
    os << "extra: " << r.extra.size() << "\n";
    for (const auto& c : r.extra) os << "  " << format_configuration(model, c) << "\n";
    os << "missing: " << r.missing.size() << "\n";
    for (const auto& c : r.missing) os << "  " << format_configuration(model, c) << "\n";
    return os.str();
}

std::string format_report(const MaximalityReport& r) {
    std::ostringstream os;
    os << "maximal: " << (r.maximal() ? "true" : "false") << "\n";
    for (auto k : {MutationClass::Mandatory, MutationClass::AddGroup, MutationClass::PromoteGroup,
                   MutationClass::AddConstraint})
        os << "examined " << to_string(k) << ": " << r.examined[static_cast<std::size_t>(k)] << "\n";
    if (!r.or_groups_audited) os << "or-group additions: skipped (model built without or-groups)\n";
    os << "violations: " << r.violations.size() << "\n";
    for (const auto& v : r.violations) os << "  " << to_string(v.mutation) << ": " << v.detail << "\n";
    return os.str();
}

}  // namespace afm
