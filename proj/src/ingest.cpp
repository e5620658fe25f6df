#include "ran/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "yaml_support.hpp"

namespace ran {

namespace {

using detail::YamlReader;

std::vector<RiskId> to_ids(const std::vector<std::string>& raw)
{
    std::vector<RiskId> out;
    out.reserve(raw.size());
    for (const auto& s : raw)
        out.emplace_back(s);
    return out;
}

std::optional<Taxonomy> read_taxonomy(YamlReader& y, const YAML::Node& node)
{
    if (!y.expect_map(node, "taxonomy entry"))
        return std::nullopt;
    y.check_keys(node, {"id", "name", "version", "source_url", "dimensions"}, "taxonomy");
    Taxonomy t;
    t.origin.at = y.where(node);
    auto id = y.required_string(node, "id");
    auto name = y.required_string(node, "name");
    t.version = y.optional_string(node, "version").value_or("");
    t.source_url = y.optional_string(node, "source_url");
    auto dims = YamlReader::child(node, "dimensions");
    bool ok = id && name;
    if (dims.IsDefined() && y.expect_sequence_or_null(dims, "dimensions")) {
        for (const auto& d : dims) {
            if (!y.expect_map(d, "dimension entry")) {
                ok = false;
                continue;
            }
            y.check_keys(d, {"name", "category"}, "dimension");
            auto dname = y.required_string(d, "name");
            auto dcat = y.required_string(d, "category");
            if (!dname || !dcat) {
                ok = false;
                continue;
            }
            auto cat = parse_category(*dcat);
            if (!cat) {
                y.error(YamlReader::child(d, "category"), "unknown category '" + *dcat + "'");
                ok = false;
                continue;
            }
            t.dimensions.push_back({*dname, *cat});
        }
    } else if (dims.IsDefined()) {
        ok = false;
    }
    if (!ok)
        return std::nullopt;
    t.id = *id;
    t.name = *name;
    return t;
}

std::optional<Risk> read_risk(YamlReader& y, const YAML::Node& node)
{
    if (!y.expect_map(node, "risk entry"))
        return std::nullopt;
    y.check_keys(node,
                 {"id", "tag", "name", "description", "concern", "category", "descriptor", "dimension",
                  "taxonomy", "uri", "provenance"},
                 "risk");
    Risk r;
    r.origin.at = y.where(node);
    auto id = y.required_string(node, "id");
    auto tag = y.required_string(node, "tag");
    auto name = y.required_string(node, "name");
    auto description = y.required_string(node, "description");
    auto taxonomy = y.required_string(node, "taxonomy");
    bool ok = id && tag && name && description && taxonomy;

    r.concern = y.optional_string(node, "concern").value_or("");
    if (auto cat = y.optional_string(node, "category")) {
        r.category = parse_category(*cat);
        if (!r.category) {
            y.error(YamlReader::child(node, "category"), "unknown category '" + *cat + "'");
            ok = false;
        }
    }
    if (auto desc = y.optional_string(node, "descriptor")) {
        r.descriptor = parse_descriptor(*desc);
        if (!r.descriptor) {
            y.error(YamlReader::child(node, "descriptor"), "unknown descriptor '" + *desc + "'");
            ok = false;
        }
    }
    r.dimension = y.optional_string(node, "dimension");
    r.uri = y.optional_string(node, "uri");
    r.provenance = y.optional_string(node, "provenance");
    if (!ok)
        return std::nullopt;
    r.id = RiskId(*id);
    r.tag = *tag;
    r.name = *name;
    r.description = *description;
    r.taxonomy_id = *taxonomy;
    return r;
}

std::optional<MitigationAction> read_action(YamlReader& y, const YAML::Node& node)
{
    if (!y.expect_map(node, "action entry"))
        return std::nullopt;
    y.check_keys(node, {"id", "name", "description", "source", "risk_ids"}, "action");
    MitigationAction a;
    a.origin.at = y.where(node);
    auto id = y.required_string(node, "id");
    auto name = y.required_string(node, "name");
    a.description = y.optional_string(node, "description").value_or("");
    a.source = y.optional_string(node, "source").value_or("");
    auto risks = y.string_list(node, "risk_ids", true);
    if (!id || !name || !risks)
        return std::nullopt;
    a.id = *id;
    a.name = *name;
    a.risk_ids = to_ids(*risks);
    return a;
}

std::optional<Detector> read_detector(YamlReader& y, const YAML::Node& node)
{
    if (!y.expect_map(node, "detector entry"))
        return std::nullopt;
    y.check_keys(node, {"id", "name", "detector_dimension", "risk_ids"}, "detector");
    Detector d;
    d.origin.at = y.where(node);
    auto id = y.required_string(node, "id");
    auto name = y.required_string(node, "name");
    d.detector_dimension = y.optional_string(node, "detector_dimension").value_or("");
    auto risks = y.string_list(node, "risk_ids", true);
    if (!id || !name || !risks)
        return std::nullopt;
    d.id = *id;
    d.name = *name;
    d.risk_ids = to_ids(*risks);
    return d;
}

std::optional<BenchmarkLink> read_benchmark(YamlReader& y, const YAML::Node& node)
{
    if (!y.expect_map(node, "benchmark entry"))
        return std::nullopt;
    y.check_keys(node, {"id", "name", "description", "url", "risk_ids"}, "benchmark");
    BenchmarkLink b;
    b.origin.at = y.where(node);
    auto id = y.required_string(node, "id");
    auto name = y.required_string(node, "name");
    b.description = y.optional_string(node, "description").value_or("");
    b.url = y.optional_string(node, "url");
    auto risks = y.string_list(node, "risk_ids", true);
    if (!id || !name || !risks)
        return std::nullopt;
    b.id = *id;
    b.name = *name;
    b.risk_ids = to_ids(*risks);
    return b;
}

template <class T, class Reader>
void read_section(YamlReader& y, const YAML::Node& root, const char* key, std::vector<T>& out, Reader read)
{
    auto section = YamlReader::child(root, key);
    if (!section.IsDefined() || !y.expect_sequence_or_null(section, key))
        return;
    for (const auto& entry : section)
        if (auto v = read(y, entry))
            out.push_back(std::move(*v));
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        auto end = nl == std::string_view::npos ? text.size() : nl;
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos)
            break;
        start = nl + 1;
    }
    if (!lines.empty() && lines.back().empty())
        lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_tabs(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

enum class Column { subject_id, subject_label, predicate_id, object_id, object_label, justification, confidence };

constexpr std::array<std::pair<std::string_view, Column>, 7> sssom_columns{{
    {"subject_id", Column::subject_id},
    {"subject_label", Column::subject_label},
    {"predicate_id", Column::predicate_id},
    {"object_id", Column::object_id},
    {"object_label", Column::object_label},
    {"mapping_justification", Column::justification},
    {"confidence", Column::confidence},
}};

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

} // namespace

Parsed<TaxonomyBundle> parse_taxonomy_document(std::string_view text, const std::string& source_name)
{
    Parsed<TaxonomyBundle> result;
    YamlReader y(source_name, result.diagnostics);
    auto root = y.load(text);
    if (!root)
        return result;
    TaxonomyBundle bundle;
    if (root->IsNull()) {
        result.value = std::move(bundle);
        return result;
    }
    if (!y.expect_map(*root, "document root"))
        return result;
    y.check_keys(*root, {"taxonomies", "risks", "actions", "detectors", "benchmarks"}, "top-level");
    read_section(y, *root, "taxonomies", bundle.taxonomies, read_taxonomy);
    read_section(y, *root, "risks", bundle.risks, read_risk);
    read_section(y, *root, "actions", bundle.actions, read_action);
    read_section(y, *root, "detectors", bundle.detectors, read_detector);
    read_section(y, *root, "benchmarks", bundle.benchmarks, read_benchmark);
    sort_diagnostics(result.diagnostics);
    if (!y.failed())
        result.value = std::move(bundle);
    return result;
}

Parsed<MappingSet> parse_sssom_tsv(std::string_view text, const std::string& source_name)
{
    Parsed<MappingSet> result;
    auto& diags = result.diagnostics;
    auto error = [&](int line, std::string msg) { diags.push_back(make_error({source_name, line}, std::move(msg))); };

    MappingSet set;
    const auto lines = split_lines(text);
    std::size_t i = 0;
    std::string parent_key;
    for (; i < lines.size() && !lines[i].empty() && lines[i].front() == '#'; ++i) {
        const int lineno = static_cast<int>(i) + 1;
        auto body = lines[i].substr(1);
        if (trim(body).empty())
            continue;
        bool nested = body.front() == ' ' || body.front() == '\t';
        auto colon = body.find(':');
        if (colon == std::string_view::npos || trim(body.substr(0, colon)).empty()) {
            error(lineno, "malformed metadata line (expected '#key: value')");
            continue;
        }
        std::string key(trim(body.substr(0, colon)));
        std::string value(trim(body.substr(colon + 1)));
        if (nested && !parent_key.empty())
            key = parent_key + "." + key;
        else
            parent_key = value.empty() ? key : std::string{};
        set.metadata.emplace_back(std::move(key), std::move(value));
    }

    while (i < lines.size() && trim(lines[i]).empty())
        ++i;
    if (i == lines.size()) {
        error(std::max(1, static_cast<int>(lines.size())), "missing header line");
        return result;
    }

    const int header_line = static_cast<int>(i) + 1;
    std::vector<std::optional<Column>> layout;
    std::set<std::string_view> seen;
    for (auto name : split_tabs(lines[i])) {
        if (!seen.insert(name).second)
            error(header_line, "duplicate column '" + std::string(name) + "'");
        auto known = std::find_if(sssom_columns.begin(), sssom_columns.end(),
                                  [&](const auto& c) { return c.first == name; });
        if (known == sssom_columns.end()) {
            diags.push_back(make_warning({source_name, header_line},
                                         "ignoring unknown column '" + std::string(name) + "'"));
            layout.emplace_back(std::nullopt);
        } else {
            layout.emplace_back(known->second);
        }
    }
    for (auto required : {"subject_id", "predicate_id", "object_id"})
        if (!seen.count(required))
            error(header_line, std::string("missing required column '") + required + "'");
    if (has_errors(diags)) {
        sort_diagnostics(diags);
        return result;
    }

    for (++i; i < lines.size(); ++i) {
        const int lineno = static_cast<int>(i) + 1;
        if (trim(lines[i]).empty() || lines[i].front() == '#')
            continue;
        auto fields = split_tabs(lines[i]);
        if (fields.size() != layout.size()) {
            error(lineno, "expected " + std::to_string(layout.size()) + " fields but found " +
                              std::to_string(fields.size()));
            continue;
        }
        Mapping m;
        m.source = source_name;
        m.origin.at = {source_name, lineno};
        bool ok = true;
        bool have_predicate = false;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!layout[c])
                continue;
            const std::string cell(fields[c]);
            auto optional_cell = [&]() -> std::optional<std::string> {
                if (cell.empty())
                    return std::nullopt;
                return cell;
            };
            switch (*layout[c]) {
            case Column::subject_id:
            case Column::object_id: {
                const char* label = *layout[c] == Column::subject_id ? "subject_id" : "object_id";
                if (cell.empty()) {
                    error(lineno, std::string("empty ") + label);
                    ok = false;
                } else if (!RiskId::well_formed(cell)) {
                    error(lineno, std::string("malformed ") + label + " '" + cell + "'");
                    ok = false;
                }
                (*layout[c] == Column::subject_id ? m.subject_id : m.object_id) = RiskId(cell);
                break;
            }
            case Column::predicate_id:
                if (auto p = cell.rfind("skos:", 0) == 0 ? parse_predicate(cell) : std::nullopt) {
                    m.predicate = *p;
                    have_predicate = true;
                } else {
                    error(lineno, "unknown predicate '" + cell + "'");
                    ok = false;
                }
                break;
            case Column::subject_label: m.subject_label = optional_cell(); break;
            case Column::object_label: m.object_label = optional_cell(); break;
            case Column::justification: m.justification = optional_cell(); break;
            case Column::confidence: {
                if (cell.empty())
                    break;
                double v = 0;
                auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                    error(lineno, "confidence '" + cell + "' is not a number");
                    ok = false;
                } else if (v < 0.0 || v > 1.0) {
                    error(lineno, "confidence out of range [0,1]");
                    ok = false;
                } else {
                    m.confidence = v;
                }
                break;
            }
            }
        }
        if (ok && have_predicate)
            set.mappings.push_back(std::move(m));
    }

    sort_diagnostics(diags);
    if (!has_errors(diags))
        result.value = std::move(set);
    return result;
}

std::string format_decimal(double value)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{})
        return std::to_string(value);
    return std::string(buf.data(), ptr);
}

std::string serialize_sssom_tsv(const MappingSet& set)
{
    std::string out;
    for (const auto& [key, value] : set.metadata) {
        out += '#';
        out += key;
        out += ':';
        if (!value.empty()) {
            out += ' ';
            out += value;
        }
        out += '\n';
    }
    for (std::size_t c = 0; c < sssom_columns.size(); ++c) {
        if (c)
            out += '\t';
        out += sssom_columns[c].first;
    }
    out += '\n';
    for (const auto& m : set.mappings) {
        out += m.subject_id.str();
        out += '\t';
        out += m.subject_label.value_or("");
        out += '\t';
        out += to_skos(m.predicate);
        out += '\t';
        out += m.object_id.str();
        out += '\t';
        out += m.object_label.value_or("");
        out += '\t';
        out += m.justification.value_or("");
        out += '\t';
        if (m.confidence)
            out += format_decimal(*m.confidence);
        out += '\n';
    }
    return out;
}

void merge_into(KnowledgeBase& kb, TaxonomyBundle bundle)
{
    auto append = [](auto& dst, auto& src) {
        dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
    };
    append(kb.taxonomies, bundle.taxonomies);
    append(kb.risks, bundle.risks);
    append(kb.actions, bundle.actions);
    append(kb.detectors, bundle.detectors);
    append(kb.benchmarks, bundle.benchmarks);
}

void merge_into(KnowledgeBase& kb, MappingSet set)
{
    kb.mappings.insert(kb.mappings.end(), std::make_move_iterator(set.mappings.begin()),
                       std::make_move_iterator(set.mappings.end()));
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("io_error", "cannot read file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw Error("io_error", "cannot read file '" + path.string() + "'");
    return ss.str();
}

std::vector<std::filesystem::path> files_with_suffix(const std::filesystem::path& dir, std::string_view suffix)
{
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        if (ends_with(entry.path().filename().string(), suffix))
            out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    return out;
}

Parsed<KnowledgeBase> load_bundle_dirs(const std::vector<std::filesystem::path>& dirs)
{
    Parsed<KnowledgeBase> result;
    auto& diags = result.diagnostics;
    KnowledgeBase kb;
    bool failed = false;

    for (const auto& dir : dirs) {
        std::error_code ec;
        if (!std::filesystem::is_directory(dir, ec)) {
            diags.push_back(make_error({dir.string(), 0}, "not a readable directory"));
            failed = true;
            continue;
        }
        std::vector<std::filesystem::path> files;
        try {
            for (auto& p : files_with_suffix(dir, taxonomy_suffix))
                files.push_back(std::move(p));
            for (auto& p : files_with_suffix(dir, sssom_suffix))
                files.push_back(std::move(p));
        } catch (const std::filesystem::filesystem_error& e) {
            diags.push_back(make_error({dir.string(), 0}, std::string("cannot list directory: ") + e.what()));
            failed = true;
            continue;
        }
        std::sort(files.begin(), files.end(),
                  [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });

        for (const auto& file : files) {
            const auto name = file.string();
            std::string text;
            try {
                text = read_text_file(file);
            } catch (const Error& e) {
                diags.push_back(make_error({name, 0}, e.what()));
                failed = true;
                continue;
            }
            if (ends_with(file.filename().string(), taxonomy_suffix)) {
                auto parsed = parse_taxonomy_document(text, name);
                diags.insert(diags.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
                if (parsed)
                    merge_into(kb, std::move(*parsed.value));
                else
                    failed = true;
            } else {
                auto parsed = parse_sssom_tsv(text, name);
                diags.insert(diags.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
                if (parsed)
                    merge_into(kb, std::move(*parsed.value));
                else
                    failed = true;
            }
        }
    }

    // Referential checks are only meaningful over the complete set of documents.
    if (!failed) {
        auto v = validate_knowledge_base(kb);
        diags.insert(diags.end(), v.begin(), v.end());
    }
    sort_diagnostics(diags);
    if (!failed && !has_errors(diags))
        result.value = std::move(kb);
    return result;
}

Parsed<KnowledgeBase> load_bundle_dir(const std::filesystem::path& dir)
{
    return load_bundle_dirs({dir});
}

} // namespace ran
