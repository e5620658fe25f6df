#include <doctest.h>

#include <random>

#include "closure_oracle.hpp"
#include "fixtures.hpp"
#include "ran/graph.hpp"

using namespace ran;

TEST_CASE("oracle agrees with hand-computed cases")
{
    using oracle::Edge;
    std::vector<std::string> nodes{"t-a", "t-b", "t-c"};
    std::vector<Edge> edges{{"t-a", "narrow", "t-b", 0.5, "m", 1}, {"t-c", "narrow", "t-b", std::nullopt, "m", 2}};
    // a < b > c: narrow then broad composes to nothing.
    auto r = oracle::related(nodes, edges, "t-a", 2, 1);
    REQUIRE(r.size() == 1);
    CHECK(r[0].target == "t-b");
    CHECK(r[0].predicate == "narrow");
    auto from_b = oracle::related(nodes, edges, "t-b", 1, 1);
    REQUIRE(from_b.size() == 2);
    CHECK(from_b[0].predicate == "broad");
    CHECK(from_b[0].reversed == std::vector<bool>{true});
}

TEST_CASE("oracle breaks ties by source, line, then row index")
{
    using oracle::Edge;
    std::vector<std::string> nodes{"t-a", "t-b"};
    std::vector<Edge> edges{{"t-a", "exact", "t-b", 0.1, "b", 1},
                            {"t-a", "exact", "t-b", 0.2, "a", 3},
                            {"t-a", "exact", "t-b", 0.3, "a", 3}};
    auto r = oracle::related(nodes, edges, "t-a", 1, 1);
    REQUIRE(r.size() == 1);
    CHECK(r[0].mappings == std::vector<std::size_t>{1});
    CHECK(r[0].confidence == 0.2);
}

TEST_CASE("engine matches the oracle on random graphs")
{
    std::mt19937_64 rng(0x5eed);
    int discrepancies = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        auto c = oracle::random_case(rng);
        auto problems = oracle::compare_with_engine(c);
        if (!problems.empty()) {
            ++discrepancies;
            if (discrepancies <= 3) {
                MESSAGE(oracle::describe(c));
                for (const auto& p : problems)
                    MESSAGE(p);
            }
        }
    }
    CHECK(discrepancies == 0);
}

TEST_CASE("dense graphs with long hops")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        auto c = oracle::random_case(rng, 6, 16, 6);
        CHECK(oracle::compare_with_engine(c).empty());
    }
}

TEST_CASE("property: results never contain the start and are sorted")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        auto c = oracle::random_case(rng);
        auto g = KnowledgeGraph::build(oracle::to_knowledge_base(c));
        for (const auto& start : c.nodes) {
            auto rs = g.related_risks(RiskId(start), c.hops, c.min_strength);
            for (std::size_t i = 0; i < rs.size(); ++i) {
                CHECK(rs[i].risk.id.str() != start);
                CHECK(rs[i].strength >= c.min_strength);
                CHECK(rs[i].strength == strength(rs[i].predicate));
                CHECK(!rs[i].path.empty());
                CHECK(static_cast<int>(rs[i].path.size()) <= c.hops);
                CHECK(rs[i].path.front().mapping.subject_id.str() == start);
                CHECK(rs[i].path.back().mapping.object_id == rs[i].risk.id);
                if (i)
                    CHECK((rs[i - 1].strength > rs[i].strength ||
                           (rs[i - 1].strength == rs[i].strength && rs[i - 1].risk.id < rs[i].risk.id)));
            }
        }
    }
}

TEST_CASE("property: more hops never lose a target or weaken it")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        auto c = oracle::random_case(rng);
        auto g = KnowledgeGraph::build(oracle::to_knowledge_base(c));
        for (const auto& start : c.nodes) {
            auto fewer = g.related_risks(RiskId(start), 1, 1);
            auto more = g.related_risks(RiskId(start), 3, 1);
            for (const auto& r : fewer) {
                auto it = std::find_if(more.begin(), more.end(), [&](auto& m) { return m.risk.id == r.risk.id; });
                REQUIRE(it != more.end());
                CHECK(it->strength >= r.strength);
            }
        }
    }
}
