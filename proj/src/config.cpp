#include "ran/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace ran {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool bare_key(std::string_view k)
{
    if (k.empty())
        return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
            return false;
    return true;
}

// Reads a basic "..." or literal '...' string starting at s[0]; returns the remainder after the closing quote.
std::optional<std::string> read_string(std::string_view s, std::string_view& rest, std::string& error)
{
    const char quote = s[0];
    std::string out;
    for (std::size_t i = 1; i < s.size(); ++i) {
        char c = s[i];
        if (c == quote) {
            rest = s.substr(i + 1);
            return out;
        }
        if (c == '\\' && quote == '"') {
            if (++i >= s.size())
                break;
            switch (s[i]) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            default:
                error = std::string("unsupported escape '\\") + s[i] + "'";
                return std::nullopt;
            }
            continue;
        }
        out += c;
    }
    error = "unterminated string";
    return std::nullopt;
}

std::string_view strip_comment(std::string_view rest)
{
    rest = trim(rest);
    if (!rest.empty() && rest[0] == '#')
        return {};
    return rest;
}

std::optional<TomlValue> read_value(std::string_view v, std::string& error)
{
    if (v.empty()) {
        error = "missing value";
        return std::nullopt;
    }
    std::string_view rest;
    if (v[0] == '"' || v[0] == '\'') {
        if (v.substr(0, 3) == "\"\"\"" || v.substr(0, 3) == "'''") {
            error = "multi-line strings are not supported";
            return std::nullopt;
        }
        auto s = read_string(v, rest, error);
        if (!s)
            return std::nullopt;
        if (!strip_comment(rest).empty()) {
            error = "unexpected text after value";
            return std::nullopt;
        }
        return TomlValue{*s};
    }
    if (v[0] == '[') {
        std::vector<std::string> items;
        v.remove_prefix(1);
        while (true) {
            v = trim(v);
            if (v.empty()) {
                error = "arrays must close on the same line";
                return std::nullopt;
            }
            if (v[0] == ']') {
                rest = v.substr(1);
                break;
            }
            if (v[0] != '"' && v[0] != '\'') {
                error = "only arrays of strings are supported";
                return std::nullopt;
            }
            auto s = read_string(v, rest, error);
            if (!s)
                return std::nullopt;
            items.push_back(*s);
            v = trim(rest);
            if (!v.empty() && v[0] == ',')
                v.remove_prefix(1);
        }
        if (!strip_comment(rest).empty()) {
            error = "unexpected text after value";
            return std::nullopt;
        }
        return TomlValue{std::move(items)};
    }
    if (v[0] == '{') {
        error = "inline tables are not supported";
        return std::nullopt;
    }
    auto end = v.find('#');
    auto token = trim(v.substr(0, end));
    if (token == "true")
        return TomlValue{true};
    if (token == "false")
        return TomlValue{false};
    long long n = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), n);
    if (ec == std::errc{} && ptr == token.data() + token.size())
        return TomlValue{n};
    error = "unsupported value '" + std::string(token) + "'";
    return std::nullopt;
}

} // namespace

Parsed<TomlTable> parse_toml_subset(std::string_view text, const std::string& source_name)
{
    Parsed<TomlTable> result;
    TomlTable table;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const SourceLocation at{source_name, line_no};
        auto line = trim(raw);
        if (line.empty() || line[0] == '#')
            continue;
        if (line[0] == '[') {
            auto close = line.find(']');
            auto name = close == std::string_view::npos ? std::string_view{} : trim(line.substr(1, close - 1));
            if (close == std::string_view::npos || !bare_key(name) || !strip_comment(line.substr(close + 1)).empty()) {
                result.diagnostics.push_back(make_error(at, "malformed table header"));
                continue;
            }
            section = std::string(name);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            result.diagnostics.push_back(make_error(at, "expected 'key = value'"));
            continue;
        }
        auto key = trim(line.substr(0, eq));
        if (!bare_key(key)) {
            result.diagnostics.push_back(make_error(at, "malformed key '" + std::string(key) + "'"));
            continue;
        }
        std::string error;
        auto value = read_value(trim(line.substr(eq + 1)), error);
        if (!value) {
            result.diagnostics.push_back(make_error(at, error));
            continue;
        }
        std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        if (!table.emplace(full, std::move(*value)).second)
            result.diagnostics.push_back(make_error(at, "duplicate key '" + full + "'"));
    }
    if (!has_errors(result.diagnostics))
        result.value = std::move(table);
    return result;
}

Parsed<ServiceConfig> config_from_toml(std::string_view text, ServiceConfig base, const std::string& source_name)
{
    Parsed<ServiceConfig> result;
    auto table = parse_toml_subset(text, source_name);
    result.diagnostics = table.diagnostics;
    if (!table)
        return result;

    const SourceLocation at{source_name, 0};
    auto wrong_type = [&](const std::string& key, const char* expected) {
        result.diagnostics.push_back(make_error(at, "config key '" + key + "' must be " + expected));
    };
    for (const auto& [key, value] : *table) {
        const auto* s = std::get_if<std::string>(&value);
        const auto* n = std::get_if<long long>(&value);
        const auto* list = std::get_if<std::vector<std::string>>(&value);
        if (key == "host") {
            s ? void(base.host = *s) : wrong_type(key, "a string");
        } else if (key == "port") {
            if (n && *n > 0 && *n < 65536)
                base.port = static_cast<int>(*n);
            else
                wrong_type(key, "an integer in 1..65535");
        } else if (key == "data_dir") {
            if (s)
                base.data_dirs = {*s};
            else if (list)
                base.data_dirs = *list;
            else
                wrong_type(key, "a string or array of strings");
        } else if (key == "store_dir") {
            s ? void(base.store_dir = *s) : wrong_type(key, "a string");
        } else if (key == "tier_table") {
            s ? void(base.tier_table = *s) : wrong_type(key, "a string");
        } else if (key == "judge.url") {
            s ? void(base.judge.url = *s) : wrong_type(key, "a string");
        } else if (key == "judge.timeout_seconds") {
            if (n && *n > 0)
                base.judge.timeout = std::chrono::seconds(*n);
            else
                wrong_type(key, "a positive integer");
        } else {
            result.diagnostics.push_back(make_warning(at, "unknown config key '" + key + "'"));
        }
    }
    if (!has_errors(result.diagnostics))
        result.value = std::move(base);
    return result;
}

void apply_env_overrides(ServiceConfig& config)
{
    if (const char* port = std::getenv("RAN_PORT")) {
        std::string_view text(port);
        int n = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
        if (ec != std::errc{} || ptr != text.data() + text.size() || n <= 0 || n > 65535)
            throw InvalidInput("invalid_argument", "RAN_PORT must be an integer in 1..65535");
        config.port = n;
    }
    if (const char* dirs = std::getenv("RAN_DATA_DIR")) {
        config.data_dirs.clear();
        std::string_view rest(dirs);
        while (!rest.empty()) {
            auto colon = rest.find(':');
            auto part = rest.substr(0, colon);
            if (!part.empty())
                config.data_dirs.emplace_back(part);
            if (colon == std::string_view::npos)
                break;
            rest.remove_prefix(colon + 1);
        }
    }
    if (const char* store = std::getenv("RAN_STORE_DIR"))
        config.store_dir = store;
    if (const char* url = std::getenv("RAN_JUDGE_URL"))
        config.judge.url = url;
    if (const char* token = std::getenv("RAN_JUDGE_TOKEN"))
        config.judge.token = token;
}

} // namespace ran
