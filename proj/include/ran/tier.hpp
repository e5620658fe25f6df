#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ran/diagnostic.hpp"

namespace ran {

enum class EUTier { prohibited, high_risk, limited_risk, minimal_risk, unclassified };

std::string_view to_string(EUTier t);
std::optional<EUTier> parse_tier(std::string_view text);

/// prohibited=4 > high_risk=3 > limited_risk=2 > minimal_risk=1 > unclassified=0.
int severity(EUTier t);

struct TierRow {
    std::string id;
    std::map<std::string, std::string> when; // all must equal; never empty
    EUTier tier = EUTier::unclassified;
    std::string note;
    bool operator==(const TierRow&) const = default;
};

struct TierRuleTable {
    std::string id;
    bool authoritative = false;
    std::vector<TierRow> rows;
    bool operator==(const TierRuleTable&) const = default;
};

struct TierResult {
    EUTier tier = EUTier::unclassified;
    std::vector<std::string> matched_rows; // table order
    bool operator==(const TierResult&) const = default;
};

using Attributes = std::map<std::string, std::string>;

Parsed<TierRuleTable> load_tier_table(std::string_view text, const std::string& source_name = "tier-table");

/// Most severe tier among matching rows; unclassified when nothing matches.
TierResult classify_eu_tier(const Attributes& attrs, const TierRuleTable& table);

} // namespace ran
