#include "yaml_support.hpp"

#include <algorithm>

namespace ran::detail {

std::optional<YAML::Node> YamlReader::load(std::string_view text)
{
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        diags_.push_back(make_error({source_, e.mark.line >= 0 ? e.mark.line + 1 : 1},
                                    "syntax error: " + e.msg));
    } catch (const YAML::Exception& e) {
        diags_.push_back(make_error({source_, 1}, std::string("syntax error: ") + e.what()));
    }
    return std::nullopt;
}

SourceLocation YamlReader::where(const YAML::Node& node) const
{
    int line = 1;
    if (node.IsDefined()) {
        auto mark = node.Mark();
        if (mark.line >= 0)
            line = mark.line + 1;
    }
    return {source_, line};
}

void YamlReader::error(const YAML::Node& node, std::string message)
{
    diags_.push_back(make_error(where(node), std::move(message)));
}

void YamlReader::warning(const YAML::Node& node, std::string message)
{
    diags_.push_back(make_warning(where(node), std::move(message)));
}

void YamlReader::check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                            std::string_view what)
{
    for (auto it = map.begin(); it != map.end(); ++it) {
        if (!it->first.IsScalar()) {
            error(it->first, "non-scalar key in " + std::string(what));
            continue;
        }
        const auto key = it->first.Scalar();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            warning(it->first, "unknown " + std::string(what) + " key '" + key + "'");
    }
}

bool YamlReader::expect_map(const YAML::Node& node, std::string_view what)
{
    if (node.IsMap())
        return true;
    error(node, std::string(what) + " must be a mapping");
    return false;
}

bool YamlReader::expect_sequence_or_null(const YAML::Node& node, std::string_view what)
{
    if (node.IsSequence() || node.IsNull())
        return true;
    error(node, std::string(what) + " must be a list");
    return false;
}

YAML::Node YamlReader::child(const YAML::Node& map, const char* key)
{
    for (auto it = map.begin(); it != map.end(); ++it)
        if (it->first.IsScalar() && it->first.Scalar() == key)
            return it->second;
    return YAML::Node(YAML::NodeType::Undefined);
}

std::optional<std::string> YamlReader::required_string(const YAML::Node& map, const char* key)
{
    auto node = child(map, key);
    if (!node.IsDefined() || node.IsNull()) {
        error(map, std::string("missing required field '") + key + "'");
        return std::nullopt;
    }
    if (!node.IsScalar()) {
        error(node, std::string("field '") + key + "' must be a string");
        return std::nullopt;
    }
    return node.Scalar();
}

std::optional<std::string> YamlReader::optional_string(const YAML::Node& map, const char* key)
{
    auto node = child(map, key);
    if (!node.IsDefined() || node.IsNull())
        return std::nullopt;
    if (!node.IsScalar()) {
        error(node, std::string("field '") + key + "' must be a string");
        return std::nullopt;
    }
    return node.Scalar();
}

std::optional<std::vector<std::string>> YamlReader::string_list(const YAML::Node& map, const char* key,
                                                                bool required)
{
    auto node = child(map, key);
    if (!node.IsDefined() || node.IsNull()) {
        if (required) {
            error(map, std::string("missing required field '") + key + "'");
            return std::nullopt;
        }
        return std::vector<std::string>{};
    }
    if (!node.IsSequence()) {
        error(node, std::string("field '") + key + "' must be a list of strings");
        return std::nullopt;
    }
    std::vector<std::string> out;
    for (const auto& item : node) {
        if (!item.IsScalar()) {
            error(item, std::string("entries of '") + key + "' must be strings");
            return std::nullopt;
        }
        out.push_back(item.Scalar());
    }
    return out;
}

bool YamlReader::failed() const
{
    return std::any_of(diags_.begin() + static_cast<std::ptrdiff_t>(first_), diags_.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

} // namespace ran::detail
