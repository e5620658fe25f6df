#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ran/diagnostic.hpp"
#include "ran/rank.hpp"

namespace ran {

/// Values of the TOML subset we read: strings, integers, booleans and arrays of strings.
using TomlValue = std::variant<std::string, long long, bool, std::vector<std::string>>;

/// Flat table keyed "section.key" (top-level keys have no prefix).
using TomlTable = std::map<std::string, TomlValue>;

/// Parses `key = value` lines, `[section]` headers, and `#` comments. Inline tables,
/// multi-line strings and dates are rejected with a diagnostic.
Parsed<TomlTable> parse_toml_subset(std::string_view text, const std::string& source_name = "config");

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::vector<std::string> data_dirs;
    std::string store_dir = "assessments";
    std::optional<std::string> tier_table;
    JudgeConfig judge;
};

/// Applies recognised keys on top of `base`; unknown keys produce warnings.
Parsed<ServiceConfig> config_from_toml(std::string_view text, ServiceConfig base = {},
                                       const std::string& source_name = "config");

/// RAN_PORT, RAN_DATA_DIR (colon-separated), RAN_STORE_DIR, RAN_JUDGE_URL, RAN_JUDGE_TOKEN.
/// Throws InvalidInput on a malformed RAN_PORT.
void apply_env_overrides(ServiceConfig& config);

} // namespace ran
