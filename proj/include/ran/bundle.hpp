#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ran/assess.hpp"
#include "ran/graph.hpp"
#include "ran/tier.hpp"

namespace ran {

inline constexpr std::string_view questionnaire_suffix = ".questionnaire.yaml";
inline constexpr std::string_view tier_table_suffix = ".tiers.yaml";

/// Everything a data directory can hold, loaded and cross-checked.
struct DataBundle {
    KnowledgeGraph graph;
    std::map<std::string, Questionnaire> questionnaires; // by id
    std::vector<TierRuleTable> tier_tables;               // filename order
};

/// Taxonomies and mappings (see load_bundle_dirs), then `*.questionnaire.yaml` and `*.tiers.yaml`.
/// Questionnaire rules are checked against the merged graph. A value is returned only without errors.
Parsed<DataBundle> load_data_bundle(const std::vector<std::filesystem::path>& dirs);

} // namespace ran
