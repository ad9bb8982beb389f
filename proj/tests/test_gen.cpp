#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "wsp/gen.hpp"
#include "wsp/instance_io.hpp"

using namespace wsp;
using namespace wsp::gen;

TEST(Generate, AuthorizationBounds) {
    EXPECT_EQ(max_auth_size(15), 8);
    EXPECT_EQ(max_auth_size(20), 10);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        GenParams p;
        p.k = 5 + static_cast<int>(seed % 20);
        p.n = 20;
        p.seed = seed;
        const auto inst = generate(p);
        for (StepSet a : inst.auth_by_user()) {
            ASSERT_GE(a.size(), 1);
            ASSERT_LE(a.size(), max_auth_size(p.k));
        }
    }
}

TEST(Generate, NotEqualsCount) {
    EXPECT_EQ(not_equals_count(20, 10), 19);
    EXPECT_EQ(not_equals_count(15, 10), 11);  // 10.5 rounds up
    EXPECT_EQ(not_equals_count(15, 30), 32);  // 31.5 rounds up
    EXPECT_EQ(not_equals_count(5, 0), 0);
    EXPECT_EQ(not_equals_count(5, 100), 10);

    for (int d : {0, 10, 20, 30, 100}) {
        GenParams p;
        p.k = 20;
        p.n = 10;
        p.d = d;
        p.seed = 4;
        std::set<std::pair<int, int>> pairs;
        int count = 0;
        const auto inst = generate(p);
        for (const auto& c : inst.constraints()) {
            if (const auto* ne = std::get_if<NotEquals>(&c)) {
                ASSERT_LT(ne->first.index, ne->second.index);
                pairs.insert({ne->first.index, ne->second.index});
                ++count;
            }
        }
        EXPECT_EQ(count, not_equals_count(20, d));
        EXPECT_EQ(pairs.size(), static_cast<std::size_t>(count));
    }
}

TEST(Generate, CountingConstraints) {
    GenParams p;
    p.k = 20;
    p.n = 200;
    p.b = 12;
    p.seed = 3;
    int at_most = 0, at_least = 0;
    const auto inst = generate(p);
    for (const auto& c : inst.constraints()) {
        if (const auto* m = std::get_if<AtMost>(&c)) {
            EXPECT_EQ(m->r, 3);
            EXPECT_EQ(m->scope.size(), 5);
            ++at_most;
        } else if (const auto* l = std::get_if<AtLeast>(&c)) {
            EXPECT_EQ(l->r, 3);
            EXPECT_EQ(l->scope.size(), 5);
            ++at_least;
        }
    }
    EXPECT_EQ(at_most, 12);
    EXPECT_EQ(at_least, 12);
}

TEST(Generate, SameSeedSameText) {
    GenParams p;
    p.k = 20;
    p.n = 200;
    p.d = 20;
    p.b = 10;
    p.seed = 123;
    EXPECT_EQ(serialize_instance(generate(p)), serialize_instance(generate(p)));
    GenParams q = p;
    q.seed = 124;
    EXPECT_NE(serialize_instance(generate(p)), serialize_instance(generate(q)));
}

TEST(Generate, InvalidParams) {
    GenParams p;
    p.b = 1;
    p.t = 3;
    p.r = 3;
    EXPECT_THROW(generate(p), std::invalid_argument);
    p.r = 2;
    p.t = 16;
    EXPECT_THROW(generate(p), std::invalid_argument);
    p = {};
    p.d = 101;
    EXPECT_THROW(generate(p), std::invalid_argument);
    p = {};
    p.b = -1;
    EXPECT_THROW(generate(p), std::invalid_argument);
}

// Each step lands in an at-most scope with probability t/k.
TEST(Generate, ScopeFrequencySmoke) {
    const int k = 10, t = 5, draws_per = 20, seeds = 500;
    std::vector<int> hits(k, 0);
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        GenParams p;
        p.k = k;
        p.n = 1;
        p.b = draws_per;
        p.t = t;
        p.seed = seed;
        const auto inst = generate(p);
        for (const auto& c : inst.constraints()) {
            if (const auto* m = std::get_if<AtMost>(&c)) {
                for (StepId s : m->scope) ++hits[s.index];
            }
        }
    }
    const double n = static_cast<double>(seeds) * draws_per;
    const double prob = static_cast<double>(t) / k;
    const double sigma = std::sqrt(n * prob * (1 - prob));
    for (int s = 0; s < k; ++s) EXPECT_NEAR(hits[s], n * prob, 3 * sigma) << "s" << s + 1;
}

TEST(Grid, Parse) {
    const Grid g = parse_grid("k=15:d=10,20,30:b=2..32..2");
    EXPECT_EQ(g.k, std::vector<int>{15});
    EXPECT_EQ(g.d, (std::vector<int>{10, 20, 30}));
    EXPECT_EQ(g.b.size(), 16U);
    EXPECT_EQ(g.b.front(), 2);
    EXPECT_EQ(g.b.back(), 32);
    EXPECT_EQ(parse_grid("k=4..6:d=0:b=1").k, (std::vector<int>{4, 5, 6}));
    EXPECT_THROW(parse_grid("k=15:d=10"), std::invalid_argument);
    EXPECT_THROW(parse_grid("k=15:d=10:b=5..2"), std::invalid_argument);
    EXPECT_THROW(parse_grid("k=15:d=10:b=2:z=1"), std::invalid_argument);
}

TEST(Suite, Sizes) {
    EXPECT_EQ(generate_suite(parse_grid("k=20:d=10,20,30:b=10..38..2"), 1).size(), 45U);
    EXPECT_EQ(generate_suite(parse_grid("k=15:d=10,20,30:b=2..32..2"), 1).size(), 48U);
    EXPECT_EQ(generate_suite(parse_grid("k=25:d=10,20,30:b=22..36..2"), 1).size(), 24U);
}

TEST(Suite, LabelsAndSeeds) {
    const auto suite = generate_suite(parse_grid("k=20:d=10,20,30:b=10..38..2"), 7);
    EXPECT_EQ(suite.front().label, "20-10.10");
    EXPECT_EQ(suite[1].label, "20-10.20");
    EXPECT_EQ(suite.back().label, "20-38.30");
    std::set<std::uint64_t> seeds;
    for (const auto& e : suite) {
        EXPECT_EQ(e.params.n, 200);
        seeds.insert(e.params.seed);
    }
    EXPECT_EQ(seeds.size(), suite.size());
    const auto again = generate_suite(parse_grid("k=20:d=10,20,30:b=10..38..2"), 7);
    EXPECT_EQ(again.back().params.seed, suite.back().params.seed);
}

TEST(Manifest, RoundTrip) {
    std::vector<ManifestRow> rows;
    for (const auto& e : generate_suite(parse_grid("k=15:d=10,20:b=2,4"), 3)) {
        rows.push_back({e.label, e.params, e.label + ".wsp"});
    }
    const std::string text = format_manifest(rows);
    EXPECT_EQ(text.substr(0, text.find('\n')), "label,k,n,b,d,seed,path");
    const auto back = parse_manifest(text);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].label, rows[i].label);
        EXPECT_EQ(back[i].params.seed, rows[i].params.seed);
        EXPECT_EQ(back[i].params.b, rows[i].params.b);
        EXPECT_EQ(back[i].path, rows[i].path);
    }
    EXPECT_THROW(parse_manifest("label,k,n,b,d,seed,path\na,1,2\n"), ParseError);
}

TEST(Small, RespectsLimits) {
    SmallParams p;
    p.allow_equals = false;
    p.max_steps = 4;
    p.max_users = 4;
    p.max_pb_variables = 24;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto inst = generate_small(p, seed);
        ASSERT_LE(inst.step_count(), 4);
        ASSERT_LE(inst.user_count(), 4);
        for (const auto& c : inst.constraints()) ASSERT_FALSE(std::holds_alternative<Equals>(c));
    }
}
