#include "ran/tier.hpp"

#include <set>

#include "yaml_support.hpp"

namespace ran {

std::string_view to_string(EUTier t)
{
    switch (t) {
    case EUTier::prohibited: return "prohibited";
    case EUTier::high_risk: return "high_risk";
    case EUTier::limited_risk: return "limited_risk";
    case EUTier::minimal_risk: return "minimal_risk";
    case EUTier::unclassified: return "unclassified";
    }
    return "";
}

std::optional<EUTier> parse_tier(std::string_view text)
{
    for (auto t : {EUTier::prohibited, EUTier::high_risk, EUTier::limited_risk, EUTier::minimal_risk,
                   EUTier::unclassified})
        if (to_string(t) == text)
            return t;
    return std::nullopt;
}

int severity(EUTier t)
{
    switch (t) {
    case EUTier::prohibited: return 4;
    case EUTier::high_risk: return 3;
    case EUTier::limited_risk: return 2;
    case EUTier::minimal_risk: return 1;
    case EUTier::unclassified: return 0;
    }
    return 0;
}

Parsed<TierRuleTable> load_tier_table(std::string_view text, const std::string& source_name)
{
    Parsed<TierRuleTable> result;
    detail::YamlReader y(source_name, result.diagnostics);
    auto root = y.load(text);
    if (!root)
        return result;
    if (!y.expect_map(*root, "tier table"))
        return result;
    y.check_keys(*root, {"format_version", "id", "authoritative", "rows"}, "top-level");

    auto version = y.required_string(*root, "format_version");
    if (version && *version != "1")
        y.error(detail::YamlReader::child(*root, "format_version"),
                "unsupported format_version '" + *version + "' (expected 1)");

    TierRuleTable table;
    table.id = y.optional_string(*root, "id").value_or("");
    if (auto a = y.optional_string(*root, "authoritative")) {
        if (*a != "true" && *a != "false")
            y.error(detail::YamlReader::child(*root, "authoritative"), "authoritative must be true or false");
        table.authoritative = *a == "true";
    }

    auto rows = detail::YamlReader::child(*root, "rows");
    if (!rows.IsDefined()) {
        y.error(*root, "missing required field 'rows'");
    } else if (y.expect_sequence_or_null(rows, "rows")) {
        std::set<std::string> ids;
        for (const auto& node : rows) {
            if (!y.expect_map(node, "tier row"))
                continue;
            y.check_keys(node, {"id", "tier", "when", "note"}, "tier row");
            TierRow row;
            auto id = y.required_string(node, "id");
            auto tier = y.required_string(node, "tier");
            row.note = y.optional_string(node, "note").value_or("");
            if (id && !ids.insert(*id).second)
                y.error(node, "duplicate tier row id '" + *id + "'");
            if (tier) {
                auto parsed = parse_tier(*tier);
                if (!parsed || *parsed == EUTier::unclassified)
                    y.error(detail::YamlReader::child(node, "tier"), "unknown tier '" + *tier + "'");
                else
                    row.tier = *parsed;
            }
            auto when = detail::YamlReader::child(node, "when");
            if (!when.IsDefined() || !when.IsMap() || when.size() == 0) {
                y.error(when.IsDefined() ? when : YAML::Node(node), "tier row 'when' must be a non-empty mapping");
            } else {
                for (auto it = when.begin(); it != when.end(); ++it) {
                    if (!it->first.IsScalar() || !it->second.IsScalar()) {
                        y.error(it->first, "tier row conditions must map attribute names to strings");
                        continue;
                    }
                    row.when[it->first.Scalar()] = it->second.Scalar();
                }
            }
            if (id)
                row.id = *id;
            table.rows.push_back(std::move(row));
        }
    }
    sort_diagnostics(result.diagnostics);
    if (!y.failed())
        result.value = std::move(table);
    return result;
}

TierResult classify_eu_tier(const Attributes& attrs, const TierRuleTable& table)
{
    TierResult result;
    for (const auto& row : table.rows) {
        if (row.when.empty())
            continue;
        bool match = true;
        for (const auto& [key, value] : row.when) {
            auto it = attrs.find(key);
            if (it == attrs.end() || it->second != value) {
                match = false;
                break;
            }
        }
        if (!match)
            continue;
        result.matched_rows.push_back(row.id);
        if (severity(row.tier) > severity(result.tier))
            result.tier = row.tier;
    }
    return result;
}

} // namespace ran
