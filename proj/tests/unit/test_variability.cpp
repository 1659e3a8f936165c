#include "doctest.h"

#include "afm/variability.hpp"
#include "support/testkit.hpp"

using namespace afm;

TEST_CASE("mandatory edges equal the presence oracle") {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        auto f = testkit::front_half(testkit::random_sample(seed, 8, 20, 4));
        for (std::size_t c = 0; c < f.h.parent.size(); ++c) {
            if (c == f.h.root) continue;
            auto p = f.h.parent[c];
            bool always = std::all_of(f.presence.rows.begin(), f.presence.rows.end(),
                                      [&](const auto& row) { return !row[p] || row[c]; });
            CHECK(f.mandatory[c] == always);
        }
    }
}

TEST_CASE("wiki groups") {
    auto f = testkit::front_half({testkit::wiki_matrix(), testkit::wiki_dk()});
    auto mutex = compute_mutex_groups(f.mutex, f.h, f.mandatory);
    auto lt = *f.vm.find_feature("LicenseType");
    std::vector<std::size_t> licences{*f.vm.find_feature("Commercial"), *f.vm.find_feature("NoLimit"),
                                      *f.vm.find_feature("GPL")};
    std::sort(licences.begin(), licences.end());
    CHECK(testkit::as_set(mutex).count({lt, licences}) == 1);
    auto ors = compute_or_groups(f.presence, f.h, f.mandatory, std::chrono::seconds(5));
    CHECK_FALSE(ors.timed_out);
    auto xa = compute_xor_groups(mutex, ors.groups, f.presence);
    auto xb = compute_xor_groups(mutex, std::nullopt, f.presence);
    CHECK(testkit::as_set(xa) == testkit::as_set(xb));
    CHECK(testkit::as_set(xa).count({lt, licences}) == 1);
}

TEST_CASE("groups equal the brute-force oracles") {
    std::size_t used = 0;
    for (std::uint64_t seed = 1; used < 150 && seed < 3000; ++seed) {
        auto f = testkit::front_half(testkit::random_sample(seed, 7, 20, 3));
        if (f.vm.features.size() > 10) continue;
        ++used;
        auto mutex = compute_mutex_groups(f.mutex, f.h, f.mandatory);
        CHECK(testkit::as_set(mutex) == testkit::oracle_mutex_groups(f));
        auto ors = compute_or_groups(f.presence, f.h, f.mandatory, std::chrono::seconds(10));
        REQUIRE_FALSE(ors.timed_out);
        CHECK(testkit::as_set(ors.groups) == testkit::oracle_or_groups(f));
        CHECK(testkit::as_set(compute_xor_groups(mutex, ors.groups, f.presence)) ==
              testkit::as_set(compute_xor_groups(mutex, std::nullopt, f.presence)));
    }
    CHECK(used == 150);
}

TEST_CASE("maximal cliques on a small graph") {
    Digraph g(5);
    auto edge = [&](std::size_t a, std::size_t b) {
        g.set(a, b);
        g.set(b, a);
    };
    edge(0, 1);
    edge(1, 2);
    edge(0, 2);
    edge(2, 3);
    auto cliques = maximal_cliques(g, {0, 1, 2, 3, 4});
    CHECK(cliques == std::vector<std::vector<std::size_t>>{{0, 1, 2}, {2, 3}});
    CHECK(maximal_cliques(g, {0, 3, 4}).empty());
}

TEST_CASE("minimal covers honour the deadline") {
    PresenceTable t;
    t.rows = {{true, true, false, false}, {true, false, true, false}, {true, false, false, true}};
    bool timed_out = false;
    auto covers = minimal_covers(t, 0, {1, 2, 3}, std::chrono::steady_clock::now() + std::chrono::seconds(5), timed_out);
    CHECK_FALSE(timed_out);
    CHECK(covers == std::vector<std::vector<std::size_t>>{{1, 2, 3}});
    minimal_covers(t, 0, {1, 2, 3}, std::chrono::steady_clock::now() - std::chrono::seconds(1), timed_out);
    CHECK(timed_out);
}

TEST_CASE("parent implies disjunction") {
    PresenceTable t;
    t.rows = {{true, true, false}, {true, false, true}, {false, false, false}};
    CHECK(parent_implies_disjunction(t, 0, {1, 2}));
    CHECK_FALSE(parent_implies_disjunction(t, 0, {1}));
}

TEST_CASE("finalized groups never overlap") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto s = testkit::random_sample(seed, 8, 20, 3);
        auto f = testkit::front_half(s);
        GroupOptions opt;
        opt.or_groups = seed % 2 == 0;
        HeuristicProvider h;
        auto sel = finalize_groups(f.presence, f.mutex, f.h, f.mandatory, f.rooted.features, opt, h);
        std::set<std::size_t> seen;
        for (const auto& g : sel.groups) {
            CHECK(g.children.size() >= 2);
            for (auto c : g.children) {
                CHECK(seen.insert(c).second);
                CHECK(f.h.parent[c] == g.parent);
                CHECK_FALSE(f.mandatory[c]);
            }
        }
    }
}
