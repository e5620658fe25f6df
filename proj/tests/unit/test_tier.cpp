#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "ran/tier.hpp"

using namespace ran;

namespace {

TierRuleTable table(const std::string& fixture)
{
    auto t = load_tier_table(testing::read_fixture(fixture), fixture);
    REQUIRE(t);
    return *t;
}

TierRuleTable bundled()
{
    auto t = load_tier_table(testing::read_fixture("../../data/atlas/eu-ai-act.tiers.yaml"), "eu-ai-act.tiers.yaml");
    REQUIRE(t);
    return *t;
}

} // namespace

TEST_CASE("tier names and severity order")
{
    for (auto t : {EUTier::prohibited, EUTier::high_risk, EUTier::limited_risk, EUTier::minimal_risk,
                   EUTier::unclassified})
        CHECK(parse_tier(to_string(t)) == t);
    CHECK(severity(EUTier::prohibited) > severity(EUTier::high_risk));
    CHECK(severity(EUTier::high_risk) > severity(EUTier::limited_risk));
    CHECK(severity(EUTier::limited_risk) > severity(EUTier::minimal_risk));
    CHECK(severity(EUTier::minimal_risk) > severity(EUTier::unclassified));
}

TEST_CASE("empty attributes are unclassified")
{
    auto r = classify_eu_tier({}, bundled());
    CHECK(r.tier == EUTier::unclassified);
    CHECK(r.matched_rows.empty());
    CHECK(classify_eu_tier({}, table("bundles/small/demo.tiers.yaml")).tier == EUTier::unclassified);
}

TEST_CASE("hiring is high risk")
{
    auto r = classify_eu_tier({{"domain", "employment"}, {"purpose", "candidate-screening"}}, bundled());
    CHECK(r.tier == EUTier::high_risk);
    CHECK(r.matched_rows == std::vector<std::string>{"candidate-screening"});
}

TEST_CASE("rows need every condition")
{
    CHECK(classify_eu_tier({{"domain", "employment"}}, bundled()).tier == EUTier::unclassified);
    CHECK(classify_eu_tier({{"purpose", "candidate-screening"}}, bundled()).tier == EUTier::unclassified);
}

TEST_CASE("the most severe matching row wins and all matches are listed in table order")
{
    auto t = table("bundles/small/demo.tiers.yaml");
    auto r = classify_eu_tier({{"interaction", "chatbot"},
                               {"purpose", "video-game"},
                               {"practice", "social-scoring"},
                               {"domain", "employment"}},
                              t);
    CHECK(r.tier == EUTier::prohibited);
    CHECK(r.matched_rows == std::vector<std::string>{"chat", "ban", "games"});
    auto low = classify_eu_tier({{"interaction", "chatbot"}, {"purpose", "video-game"}}, t);
    CHECK(low.tier == EUTier::limited_risk);
}

TEST_CASE("property: adding attributes never lowers the tier")
{
    const auto t = bundled();
    std::vector<std::pair<std::string, std::string>> pool;
    for (const auto& row : t.rows)
        for (const auto& kv : row.when)
            pool.push_back(kv);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        Attributes a;
        for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) {
            const auto& kv = pool[rng() % pool.size()];
            a[kv.first] = kv.second;
        }
        auto before = classify_eu_tier(a, t);
        Attributes more = a;
        const auto& extra = pool[rng() % pool.size()];
        if (more.count(extra.first))
            continue;
        more[extra.first] = extra.second;
        auto after = classify_eu_tier(more, t);
        CHECK(severity(after.tier) >= severity(before.tier));
        for (const auto& row : before.matched_rows)
            CHECK(std::find(after.matched_rows.begin(), after.matched_rows.end(), row) != after.matched_rows.end());
    }
}

TEST_CASE("malformed tables are rejected with a line")
{
    auto t = load_tier_table("format_version: 1\nid: x\nrows:\n  - {id: r, tier: high_risk, when: {}, note: n}\n", "t.yaml");
    CHECK_FALSE(t);
    REQUIRE_FALSE(t.diagnostics.empty());
    CHECK(t.diagnostics[0].where.line == 4);
    auto bad_tier = load_tier_table("format_version: 1\nid: x\nrows:\n  - {id: r, tier: severe, when: {a: b}}\n", "t.yaml");
    CHECK_FALSE(bad_tier);
}
