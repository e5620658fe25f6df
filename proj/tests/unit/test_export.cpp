#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "ran/export.hpp"
#include "ran/ingest.hpp"
#include "ran/json_codec.hpp"

using namespace ran;

namespace {

template <class T>
std::vector<T> sorted_by_id(std::vector<T> v)
{
    std::sort(v.begin(), v.end(), [](const T& a, const T& b) { return a.id < b.id; });
    if constexpr (requires(T t) { t.risk_ids; })
        for (auto& item : v)
            std::sort(item.risk_ids.begin(), item.risk_ids.end()); // link lists are unordered
    return v;
}

const KnowledgeGraph& merged()
{
    static const KnowledgeGraph g = [] {
        auto kb = load_bundle_dirs({testing::atlas_dir(), testing::source_path("data/samples")});
        REQUIRE(kb);
        return KnowledgeGraph::build(*kb);
    }();
    return g;
}

} // namespace

TEST_CASE("exports are byte-deterministic")
{
    for (auto fmt : {"json-graph", "ntriples"}) {
        auto a = export_graph(merged(), fmt);
        auto b = export_graph(merged(), fmt);
        CHECK(a == b);
        auto rebuilt = load_bundle_dirs({testing::atlas_dir(), testing::source_path("data/samples")});
        REQUIRE(rebuilt);
        CHECK(export_graph(KnowledgeGraph::build(*rebuilt), fmt) == a);
    }
}

TEST_CASE("json-graph re-imports to the same content")
{
    const auto text = export_graph(merged(), "json-graph");
    auto back = import_json_graph(text);
    REQUIRE(back);
    const auto& kb = merged().knowledge_base();
    CHECK(sorted_by_id(back->risks) == sorted_by_id(kb.risks));
    CHECK(sorted_by_id(back->taxonomies) == sorted_by_id(kb.taxonomies));
    CHECK(sorted_by_id(back->actions) == sorted_by_id(kb.actions));
    CHECK(sorted_by_id(back->detectors) == sorted_by_id(kb.detectors));
    CHECK(sorted_by_id(back->benchmarks) == sorted_by_id(kb.benchmarks));
    CHECK(back->mappings.size() == kb.mappings.size());
    CHECK(validate_knowledge_base(*back).empty());
    CHECK(export_graph(KnowledgeGraph::build(*back), "json-graph") == text);
}

TEST_CASE("n-triples lines are well formed and sorted")
{
    const auto text = export_graph(merged(), "ntriples");
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        REQUIRE(nl != std::string::npos);
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    REQUIRE(!lines.empty());
    CHECK(std::is_sorted(lines.begin(), lines.end()));
    for (const auto& l : lines) {
        CHECK(l.front() == '<');
        CHECK(l.size() > 2);
        CHECK(l.substr(l.size() - 2) == " .");
    }
    CHECK(text.find("<urn:ran:risk:atlas-prompt-injection> <http://www.w3.org/2004/02/skos/core#exactMatch> "
                    "<urn:ran:risk:owasp-llm01> .") != std::string::npos);
}

TEST_CASE("prefixes.json mirrors the exporter's prefix map")
{
    auto j = parse_json(read_text_file(testing::source_path("prefixes.json")), "prefixes.json");
    const auto& prefixes = ntriples_prefixes();
    REQUIRE(j.size() == prefixes.size());
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        CHECK(it.key() == prefixes[i].first);
        CHECK(it.value().get<std::string>() == prefixes[i].second);
    }
}

TEST_CASE("unknown formats are rejected")
{
    CHECK_THROWS_AS(export_graph(merged(), "turtle"), InvalidInput);
}

TEST_CASE("malformed json-graph input produces diagnostics")
{
    CHECK_FALSE(import_json_graph("{not json"));
    CHECK_FALSE(import_json_graph("{\"nodes\": 3}"));
}
