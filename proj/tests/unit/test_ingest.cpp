#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "ran/graph.hpp"
#include "ran/ingest.hpp"

using namespace ran;

namespace {

struct Expectation {
    std::string file;
    int line;
    std::string message;
};

std::vector<Expectation> expectations(const std::string& manifest)
{
    std::vector<Expectation> out;
    std::istringstream in(testing::read_fixture(manifest));
    std::string row;
    std::getline(in, row);
    while (std::getline(in, row)) {
        if (row.empty())
            continue;
        auto a = row.find('\t');
        auto b = row.find('\t', a + 1);
        out.push_back({row.substr(0, a), std::stoi(row.substr(a + 1, b - a - 1)), row.substr(b + 1)});
    }
    return out;
}

} // namespace

TEST_CASE("bundled atlas loads cleanly")
{
    auto kb = load_bundle_dir(testing::atlas_dir());
    REQUIRE(kb);
    CHECK(count(kb.diagnostics, Severity::error) == 0);
    CHECK(kb->risks.size() == 95);
    CHECK(kb->taxonomies.size() == 1);
    CHECK(!kb->detectors.empty());
    CHECK(!kb->actions.empty());
    CHECK(!kb->benchmarks.empty());
}

TEST_CASE("risk entries keep their source line")
{
    auto kb = load_bundle_dir(testing::atlas_dir());
    REQUIRE(kb);
    const auto& first = kb->risks.front();
    CHECK(first.origin.at.source.find("atlas.taxonomy.yaml") != std::string::npos);
    std::ifstream in(first.origin.at.source);
    std::string line;
    for (int i = 0; i < first.origin.at.line; ++i)
        std::getline(in, line);
    CHECK(line.find("id: " + first.id.str()) != std::string::npos);
}

TEST_CASE("malformed taxonomy documents point at the offending line")
{
    for (const auto& e : expectations("taxonomy/malformed/EXPECTED.tsv")) {
        CAPTURE(e.file);
        auto parsed = parse_taxonomy_document(testing::read_fixture("taxonomy/malformed/" + e.file), e.file);
        CHECK_FALSE(parsed);
        bool found = false;
        for (const auto& d : parsed.diagnostics)
            if (d.severity == Severity::error && d.where.line == e.line &&
                d.message.find(e.message) != std::string::npos)
                found = true;
        if (!found)
            for (const auto& d : parsed.diagnostics)
                MESSAGE(format_diagnostic(d));
        CHECK(found);
    }
}

TEST_CASE("unknown keys are warnings, not errors")
{
    auto parsed = parse_taxonomy_document("taxonomies:\n  - {id: x, name: X, version: '1', colour: red}\n", "w.yaml");
    REQUIRE(parsed);
    REQUIRE(parsed.diagnostics.size() == 1);
    CHECK(parsed.diagnostics[0].severity == Severity::warning);
    CHECK(parsed.diagnostics[0].where.line == 2);
}

TEST_CASE("empty document is an empty bundle")
{
    auto parsed = parse_taxonomy_document("", "empty.yaml");
    REQUIRE(parsed);
    CHECK(*parsed == TaxonomyBundle{});
}

TEST_CASE("directories merge in order and cross-file references resolve")
{
    auto kb = load_bundle_dirs({testing::atlas_dir(), testing::source_path("data/samples")});
    REQUIRE(kb);
    CHECK(kb->taxonomies.size() == 2);
    CHECK(kb->risks.size() == 105);
    CHECK(kb->mappings.size() == 14);
    CHECK(kb->risks.front().taxonomy_id == "atlas");
    CHECK(kb->risks.back().taxonomy_id == "owasp-llm");
}

TEST_CASE("a dangling reference across files fails the load")
{
    testing::TempDir dir;
    testing::write_text(dir.path() / "only.sssom.tsv",
                        "subject_id\tpredicate_id\tobject_id\natlas-hallucination\tskos:exactMatch\tnowhere-x\n");
    auto kb = load_bundle_dirs({testing::atlas_dir(), dir.str()});
    CHECK_FALSE(kb);
    bool found = false;
    for (const auto& d : kb.diagnostics)
        if (d.message.find("dangling mapping object 'nowhere-x'") != std::string::npos && d.where.line == 2)
            found = true;
    CHECK(found);
}

TEST_CASE("a missing directory is an error")
{
    auto kb = load_bundle_dir("/nonexistent/ran-data");
    CHECK_FALSE(kb);
    CHECK(has_errors(kb.diagnostics));
}

TEST_CASE("files are read in filename order")
{
    testing::TempDir dir;
    testing::write_text(dir.path() / "b.taxonomy.yaml",
                        "risks:\n  - {id: t-b, tag: b, name: B, description: Bee, taxonomy: t}\n");
    testing::write_text(dir.path() / "a.taxonomy.yaml",
                        "taxonomies:\n  - {id: t, name: T, version: '1'}\nrisks:\n"
                        "  - {id: t-a, tag: a, name: A, description: Ay, taxonomy: t}\n");
    testing::write_text(dir.path() / "notes.txt", "ignored");
    auto kb = load_bundle_dir(dir.path());
    REQUIRE(kb);
    REQUIRE(kb->risks.size() == 2);
    CHECK(kb->risks[0].id.str() == "t-a");
    CHECK(kb->risks[1].id.str() == "t-b");
}
