#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ran/diagnostic.hpp"
#include "ran/riskmodel.hpp"

namespace ran {

/// Contents of one `*.taxonomy.yaml` document. Any section may be empty.
struct TaxonomyBundle {
    std::vector<Taxonomy> taxonomies;
    std::vector<Risk> risks;
    std::vector<MitigationAction> actions;
    std::vector<Detector> detectors;
    std::vector<BenchmarkLink> benchmarks;
    bool operator==(const TaxonomyBundle&) const = default;
};

/// Contents of one `*.sssom.tsv` file: the `#key: value` block and the rows, in file order.
struct MappingSet {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<Mapping> mappings;
    bool operator==(const MappingSet&) const = default;
};

Parsed<TaxonomyBundle> parse_taxonomy_document(std::string_view text, const std::string& source_name);

Parsed<MappingSet> parse_sssom_tsv(std::string_view text, const std::string& source_name);

/// Metadata block, canonical seven-column header, then rows in stored order.
/// parse_sssom_tsv(serialize_sssom_tsv(s), name) == s for sets whose mappings were sourced from `name`.
std::string serialize_sssom_tsv(const MappingSet& set);

/// Shortest decimal text that reads back as the same double.
std::string format_decimal(double value);

void merge_into(KnowledgeBase& kb, TaxonomyBundle bundle);
void merge_into(KnowledgeBase& kb, MappingSet set);

inline constexpr std::string_view taxonomy_suffix = ".taxonomy.yaml";
inline constexpr std::string_view sssom_suffix = ".sssom.tsv";

/// Loads `*.taxonomy.yaml` and `*.sssom.tsv` in lexicographic filename order, merges and validates.
/// A value is returned only when no error diagnostic was produced.
Parsed<KnowledgeBase> load_bundle_dir(const std::filesystem::path& dir);

/// Same as load_bundle_dir over several directories, merged in the given order.
Parsed<KnowledgeBase> load_bundle_dirs(const std::vector<std::filesystem::path>& dirs);

/// Files in `dir` ending in `suffix`, sorted by filename.
std::vector<std::filesystem::path> files_with_suffix(const std::filesystem::path& dir, std::string_view suffix);

/// Whole-file read; throws ran::Error("io_error") on failure.
std::string read_text_file(const std::filesystem::path& path);

} // namespace ran
