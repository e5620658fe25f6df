#pragma once

// Positioned field extraction over yaml-cpp nodes. Internal to ran_core.

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "ran/diagnostic.hpp"

namespace ran::detail {

class YamlReader {
public:
    YamlReader(std::string source, std::vector<Diagnostic>& sink)
        : source_(std::move(source)), diags_(sink) {}

    /// Parses a whole document. Returns a Null node for an empty document and
    /// nullopt (with a diagnostic) on a syntax error.
    std::optional<YAML::Node> load(std::string_view text);

    SourceLocation where(const YAML::Node& node) const;
    const std::string& source() const { return source_; }

    void error(const YAML::Node& node, std::string message);
    void warning(const YAML::Node& node, std::string message);

    /// Warns about keys outside `allowed`. `what` names the entry kind.
    void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                    std::string_view what);

    bool expect_map(const YAML::Node& node, std::string_view what);
    /// A sequence, or a null node (treated as empty). Reports other kinds.
    bool expect_sequence_or_null(const YAML::Node& node, std::string_view what);

    std::optional<std::string> required_string(const YAML::Node& map, const char* key);
    /// Absent and null fields yield nullopt; non-scalars are reported.
    std::optional<std::string> optional_string(const YAML::Node& map, const char* key);
    std::optional<std::vector<std::string>> string_list(const YAML::Node& map, const char* key,
                                                        bool required);

    /// Node for `key` if present (for positioned diagnostics on values).
    static YAML::Node child(const YAML::Node& map, const char* key);

    bool failed() const;

private:
    std::string source_;
    std::vector<Diagnostic>& diags_;
    std::size_t first_ = diags_.size();
};

} // namespace ran::detail
