#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ran/bundle.hpp"
#include "ran/riskmodel.hpp"

namespace testing {

std::string source_path(const std::string& relative);
std::string fixture_path(const std::string& relative);
std::string read_fixture(const std::string& relative);
std::string atlas_dir();

/// The bundled atlas data directory, loaded once per process.
const ran::DataBundle& atlas_bundle();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

ran::Taxonomy make_taxonomy(const std::string& id = "t");
ran::Risk make_risk(const std::string& id, const std::string& taxonomy = "t");
ran::Mapping make_mapping(const std::string& subject, ran::MappingPredicate p, const std::string& object,
                          std::optional<double> confidence = std::nullopt, const std::string& source = "m.sssom.tsv",
                          int line = 1);

} // namespace testing
