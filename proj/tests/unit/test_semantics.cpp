#include "doctest.h"

#include "afm/error.hpp"
#include "afm/constraints.hpp"
#include "afm/semantics.hpp"
#include "support/testkit.hpp"

using namespace afm;

namespace {

AttributedFeatureModel wiki_model(bool or_groups = false, bool phi = true) {
    SynthesisOptions opt;
    opt.or_groups = or_groups;
    opt.phi = phi;
    return synthesize(testkit::wiki_matrix(), testkit::wiki_dk(), opt).model;
}

// Every assignment of features and attribute values, filtered by eval_config.
std::vector<Configuration> brute_force(const AttributedFeatureModel& m, bool with_phi) {
    std::vector<Configuration> out;
    std::size_t nf = m.features.size();
    std::vector<std::size_t> radix;
    for (const auto& a : m.attributes) {
        auto n = a.domain.values.size() + (a.domain.null_observed() ? 0 : 1);
        radix.push_back(n);
    }
    for (std::uint64_t mask = 0; mask < (1ull << nf); ++mask) {
        std::vector<std::size_t> digit(radix.size(), 0);
        while (true) {
            Configuration c;
            for (std::size_t f = 0; f < nf; ++f) c.selected.push_back((mask >> f) & 1);
            for (std::size_t a = 0; a < radix.size(); ++a) {
                const auto& d = m.attributes[a].domain;
                c.values.push_back(digit[a] < d.values.size() ? d.values[digit[a]] : d.null_value);
            }
            if (eval_config(m, c, with_phi)) out.push_back(c);
            std::size_t k = 0;
            while (k < radix.size() && ++digit[k] == radix[k]) digit[k++] = 0;
            if (k == radix.size()) break;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

TEST_CASE("wiki semantics are exactly the matrix") {
    auto m = wiki_model();
    auto rep = check_semantics(m, testkit::wiki_matrix());
    CHECK(rep.sound);
    CHECK(rep.complete);
    CHECK(rep.model_count == 8);
    CHECK(rep.matrix_count == 8);
}

TEST_CASE("without phi the diagram over-approximates") {
    auto m = wiki_model(false, false);
    auto rep = check_semantics(m, testkit::wiki_matrix(), false);
    CHECK(rep.complete);
    CHECK_FALSE(rep.sound);
    CHECK(rep.extra.size() > 0);
}

TEST_CASE("enumeration equals brute force") {
    CHECK(enumerate_configurations(wiki_model(), true) == brute_force(wiki_model(), true));
    CHECK(enumerate_configurations(wiki_model(false, false), false) == brute_force(wiki_model(false, false), false));
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        auto s = testkit::random_sample(seed, 5, 8, 3);
        auto m = synthesize(s.matrix, s.dk).model;
        if (m.features.size() > 8) continue;
        CHECK(enumerate_configurations(m, true) == brute_force(m, true));
        CHECK(enumerate_configurations(m, false) == brute_force(m, false));
    }
}

TEST_CASE("eval_config rejects broken configurations") {
    auto m = wiki_model();
    auto rows = matrix_configurations(m, testkit::wiki_matrix());
    REQUIRE(rows.size() == 8);
    for (const auto& c : rows) CHECK(eval_config(m, c));
    auto no_root = rows[0];
    no_root.selected[m.hierarchy.root] = false;
    CHECK_FALSE(eval_config(m, no_root));
    auto two_licences = rows[0];
    two_licences.selected[*m.find_feature("GPL")] = true;
    two_licences.selected[*m.find_feature("NoLimit")] = true;
    CHECK_FALSE(eval_config(m, two_licences));
}

TEST_CASE("enumeration budget") {
    try {
        enumerate_configurations(wiki_model(), true, 3);
        FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == "BudgetExceeded");
    }
}

TEST_CASE("audit finds missing mandatory edges and groups") {
    auto m = wiki_model(true);
    auto clean = audit_maximality(m);
    CHECK(clean.maximal());
    CHECK(clean.or_groups_audited);

    auto weak = m;
    weak.mandatory[*weak.find_feature("LicenseType")] = false;
    auto rep = audit_maximality(weak);
    REQUIRE_FALSE(rep.maximal());
    CHECK(std::any_of(rep.violations.begin(), rep.violations.end(),
                      [](const auto& v) { return v.mutation == MutationClass::Mandatory; }));

    auto ungrouped = m;
    ungrouped.groups.clear();
    rep = audit_maximality(ungrouped);
    CHECK(std::any_of(rep.violations.begin(), rep.violations.end(),
                      [](const auto& v) { return v.mutation == MutationClass::AddGroup; }));

    auto fewer = m;
    std::erase_if(fewer.constraints,
                  [](const auto& rc) { return render_constraint(rc) == "NoLimit => !LanguageSupport"; });
    REQUIRE(fewer.constraints.size() + 1 == m.constraints.size());
    rep = audit_maximality(fewer);
    CHECK(std::any_of(rep.violations.begin(), rep.violations.end(),
                      [](const auto& v) { return v.mutation == MutationClass::AddConstraint; }));
}

TEST_CASE("audit skips or additions without an or-group search") {
    auto rep = audit_maximality(wiki_model(false));
    CHECK_FALSE(rep.or_groups_audited);
    CHECK(rep.maximal());
}

TEST_CASE("structural and semantic equality") {
    CHECK(structurally_equal(wiki_model(), wiki_model()));
    auto alt = synthesize(testkit::wiki_matrix(), testkit::wiki_alt_dk()).model;
    CHECK_FALSE(structurally_equal(wiki_model(), alt));
    CHECK(same_semantics(wiki_model(), alt));
}
