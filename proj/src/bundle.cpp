#include "ran/bundle.hpp"

#include "ran/ingest.hpp"

namespace ran {

Parsed<DataBundle> load_data_bundle(const std::vector<std::filesystem::path>& dirs)
{
    Parsed<DataBundle> result;
    auto& diags = result.diagnostics;

    auto kb = load_bundle_dirs(dirs);
    diags = kb.diagnostics;

    std::vector<std::pair<std::string, Questionnaire>> questionnaires;
    std::vector<TierRuleTable> tables;
    for (const auto& dir : dirs) {
        std::error_code ec;
        if (!std::filesystem::is_directory(dir, ec))
            continue; // already reported by load_bundle_dirs
        for (const auto& file : files_with_suffix(dir, questionnaire_suffix)) {
            try {
                auto parsed = load_questionnaire(read_text_file(file), file.string());
                diags.insert(diags.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
                if (parsed)
                    questionnaires.emplace_back(file.string(), std::move(*parsed));
            } catch (const Error& e) {
                diags.push_back(make_error({file.string(), 0}, e.what()));
            }
        }
        for (const auto& file : files_with_suffix(dir, tier_table_suffix)) {
            try {
                auto parsed = load_tier_table(read_text_file(file), file.string());
                diags.insert(diags.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
                if (parsed)
                    tables.push_back(std::move(*parsed));
            } catch (const Error& e) {
                diags.push_back(make_error({file.string(), 0}, e.what()));
            }
        }
    }

    std::optional<KnowledgeGraph> graph;
    if (kb) {
        try {
            graph = KnowledgeGraph::build(std::move(*kb.value));
        } catch (const Error& e) {
            diags.push_back(make_error({"bundle", 0}, e.what()));
        }
    }

    DataBundle bundle;
    for (auto& [file, q] : questionnaires) {
        if (graph) {
            auto target_diags = check_rule_targets(q, *graph, file);
            diags.insert(diags.end(), target_diags.begin(), target_diags.end());
        }
        if (bundle.questionnaires.count(q.id)) {
            diags.push_back(make_error({file, 0}, "duplicate questionnaire id '" + q.id + "'"));
            continue;
        }
        bundle.questionnaires.emplace(q.id, std::move(q));
    }
    bundle.tier_tables = std::move(tables);

    sort_diagnostics(diags);
    if (graph && !has_errors(diags)) {
        bundle.graph = std::move(*graph);
        result.value = std::move(bundle);
    }
    return result;
}

} // namespace ran
