#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

#include "ran/ingest.hpp"

namespace testing {

std::string source_path(const std::string& relative)
{
    return std::string(RAN_SOURCE_DIR) + "/" + relative;
}

std::string fixture_path(const std::string& relative)
{
    return std::string(RAN_FIXTURES_DIR) + "/" + relative;
}

std::string read_fixture(const std::string& relative)
{
    return ran::read_text_file(fixture_path(relative));
}

std::string atlas_dir()
{
    return source_path("data/atlas");
}

const ran::DataBundle& atlas_bundle()
{
    static const ran::DataBundle bundle = [] {
        auto parsed = ran::load_data_bundle({atlas_dir()});
        if (!parsed)
            throw std::runtime_error("bundled atlas failed to load");
        return std::move(*parsed.value);
    }();
    return bundle;
}

TempDir::TempDir()
{
    std::random_device rd;
    std::mt19937_64 rng(rd());
    auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto candidate = base / ("ran-test-" + std::to_string(rng()));
        if (std::filesystem::create_directory(candidate)) {
            path_ = candidate;
            return;
        }
    }
    throw std::runtime_error("cannot create a temp directory");
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

ran::Taxonomy make_taxonomy(const std::string& id)
{
    ran::Taxonomy t;
    t.id = id;
    t.name = "Taxonomy " + id;
    t.version = "1";
    return t;
}

ran::Risk make_risk(const std::string& id, const std::string& taxonomy)
{
    ran::Risk r;
    r.id = ran::RiskId(id);
    r.tag = id;
    r.name = "Risk " + id;
    r.description = "Description of " + id;
    r.taxonomy_id = taxonomy;
    return r;
}

ran::Mapping make_mapping(const std::string& subject, ran::MappingPredicate p, const std::string& object,
                          std::optional<double> confidence, const std::string& source, int line)
{
    ran::Mapping m;
    m.subject_id = ran::RiskId(subject);
    m.predicate = p;
    m.object_id = ran::RiskId(object);
    m.confidence = confidence;
    m.source = source;
    m.origin.at = {source, line};
    return m;
}

} // namespace testing
