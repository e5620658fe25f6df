#include "ran/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "ran/bundle.hpp"
#include "ran/config.hpp"
#include "ran/export.hpp"
#include "ran/ingest.hpp"
#include "ran/json_codec.hpp"
#include "ran/rank.hpp"
#include "ran/service.hpp"
#include "ran/store.hpp"

#ifndef RAN_DEFAULT_DATA_DIR
#define RAN_DEFAULT_DATA_DIR "data/atlas"
#endif

namespace ran {

namespace {

/// Wrong arguments detected after parsing; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> data_dirs;
    std::string format = "table";

    bool json() const { return format == "json"; }
};

std::vector<std::string> resolve_data_dirs(const std::vector<std::string>& flags)
{
    if (!flags.empty())
        return flags;
    std::vector<std::string> dirs;
    if (const char* env = std::getenv("RAN_DATA_DIR")) {
        std::string_view rest(env);
        while (!rest.empty()) {
            auto colon = rest.find(':');
            if (auto part = rest.substr(0, colon); !part.empty())
                dirs.emplace_back(part);
            if (colon == std::string_view::npos)
                break;
            rest.remove_prefix(colon + 1);
        }
    }
    if (dirs.empty())
        dirs.emplace_back(RAN_DEFAULT_DATA_DIR);
    return dirs;
}

DataBundle load_bundle_or_throw(const Context& ctx, const std::vector<std::string>& dirs)
{
    std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
    auto bundle = load_data_bundle(paths);
    for (const auto& d : bundle.diagnostics)
        if (d.severity == Severity::error)
            ctx.err << format_diagnostic(d) << '\n';
    if (!bundle)
        throw InvalidInput("invalid_knowledge_base", "the data bundle has errors");
    return std::move(*bundle.value);
}

std::string read_input(const Context& ctx, const std::string& source)
{
    if (source == "-") {
        std::stringstream ss;
        ss << ctx.in.rdbuf();
        return ss.str();
    }
    return read_text_file(source);
}

void write_file(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f << content;
        if (!f)
            throw Error("io_error", "cannot write '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error("io_error", "cannot write '" + path + "'");
}

std::string pretty(const Json& j)
{
    return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c)
        width[c] = header[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size() && c < width.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    auto emit = [&](const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            line += row[c];
            if (c + 1 < row.size())
                line += std::string(width[c] - row[c].size() + 2, ' ');
        }
        out << line << '\n';
    };
    emit(header);
    for (const auto& row : rows)
        emit(row);
}

std::string opt_text(const std::optional<std::string>& v)
{
    return v.value_or("-");
}

std::string category_text(const Risk& r)
{
    return r.category ? std::string(to_string(*r.category)) : "-";
}

std::string fixed(double v, int digits = 4)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

RiskFilter build_filter(const std::optional<std::string>& taxonomy, const std::optional<std::string>& category,
                        const std::optional<std::string>& dimension, const std::optional<std::string>& descriptor,
                        const std::optional<std::string>& text)
{
    RiskFilter f;
    f.taxonomy = taxonomy;
    f.dimension = dimension;
    f.text = text;
    if (category) {
        f.category = parse_category(*category);
        if (!f.category)
            throw UsageError("unknown category '" + *category + "'");
    }
    if (descriptor) {
        f.descriptor = parse_descriptor(*descriptor);
        if (!f.descriptor)
            throw UsageError("unknown descriptor '" + *descriptor + "'");
    }
    return f;
}

int strength_arg(const std::string& text)
{
    if (auto p = parse_predicate(text))
        return strength(*p);
    if (text.size() == 1 && text[0] >= '1' && text[0] <= '4')
        return text[0] - '0';
    throw UsageError("--min-strength must be 1..4 or a predicate name");
}

// ---- subcommands ----

int cmd_validate(Context& ctx, const std::vector<std::string>& dirs)
{
    std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
    auto bundle = load_data_bundle(paths);
    const auto errors = count(bundle.diagnostics, Severity::error);
    const auto warnings = count(bundle.diagnostics, Severity::warning);
    if (ctx.json()) {
        Json j;
        j["errors"] = errors;
        j["warnings"] = warnings;
        j["risks"] = bundle ? bundle->graph.risk_count() : 0;
        Json diags = Json::array();
        for (const auto& d : bundle.diagnostics)
            diags.push_back(to_json(d));
        j["diagnostics"] = std::move(diags);
        ctx.out << pretty(j);
    } else {
        for (const auto& d : bundle.diagnostics)
            ctx.out << format_diagnostic(d) << '\n';
        ctx.out << errors << (errors == 1 ? " error, " : " errors, ") << warnings
                << (warnings == 1 ? " warning" : " warnings");
        if (bundle)
            ctx.out << "; " << bundle->graph.risk_count() << " risks";
        ctx.out << '\n';
    }
    return errors ? 1 : 0;
}

int cmd_risks_list(Context& ctx, const RiskFilter& filter)
{
    auto bundle = load_bundle_or_throw(ctx, ctx.data_dirs);
    auto risks = bundle.graph.list_risks(filter);
    if (ctx.json()) {
        Json arr = Json::array();
        for (const auto& r : risks)
            arr.push_back(to_json(r));
        Json body;
        body["count"] = arr.size();
        body["risks"] = std::move(arr);
        ctx.out << pretty(body);
        return 0;
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : risks)
        rows.push_back({r.id.str(), category_text(r), opt_text(r.dimension), r.name});
    print_table(ctx.out, {"ID", "CATEGORY", "DIMENSION", "NAME"}, rows);
    ctx.out << risks.size() << (risks.size() == 1 ? " risk\n" : " risks\n");
    return 0;
}

int cmd_risk_show(Context& ctx, const std::string& key)
{
    auto bundle = load_bundle_or_throw(ctx, ctx.data_dirs);
    const Risk& r = bundle.graph.get_risk(key);
    if (ctx.json()) {
        ctx.out << pretty(to_json(r));
        return 0;
    }
    auto line = [&](const char* k, const std::string& v) { ctx.out << k << ": " << v << '\n'; };
    line("id", r.id.str());
    line("tag", r.tag);
    line("name", r.name);
    line("taxonomy", r.taxonomy_id);
    line("category", category_text(r));
    line("descriptor", r.descriptor ? std::string(to_string(*r.descriptor)) : "-");
    line("dimension", opt_text(r.dimension));
    line("uri", opt_text(r.uri));
    line("description", r.description);
    line("concern", r.concern.empty() ? "-" : r.concern);
    return 0;
}

int cmd_related(Context& ctx, const std::string& key, int hops, const std::string& min_strength)
{
    if (hops < 1 || hops > 6)
        throw UsageError("--hops must be in 1..6");
    const int min = strength_arg(min_strength);
    auto bundle = load_bundle_or_throw(ctx, ctx.data_dirs);
    const Risk& r = bundle.graph.get_risk(key);
    auto related = bundle.graph.related_risks(r.id, hops, min);
    if (ctx.json()) {
        Json j;
        j["risk"] = r.id.str();
        j["hops"] = hops;
        j["min_strength"] = min;
        Json arr = Json::array();
        for (const auto& rel : related)
            arr.push_back(to_json(rel));
        j["related"] = std::move(arr);
        ctx.out << pretty(j);
        return 0;
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& rel : related)
        rows.push_back({rel.risk.id.str(), std::string(to_string(rel.predicate)), std::to_string(rel.path.size()),
                        fixed(rel.confidence, 2), rel.risk.name});
    print_table(ctx.out, {"ID", "PREDICATE", "HOPS", "CONFIDENCE", "NAME"}, rows);
    return 0;
}

template <class T>
std::string via_text(const Linked<T>& l)
{
    return l.via ? l.via->str() : "-";
}

int cmd_mitigations(Context& ctx, const std::string& key, bool include_related)
{
    auto bundle = load_bundle_or_throw(ctx, ctx.data_dirs);
    const Risk& r = bundle.graph.get_risk(key);
    auto m = bundle.graph.mitigations_for(r.id, include_related);
    if (ctx.json()) {
        Json j;
        j["risk"] = r.id.str();
        Json body = to_json(m);
        j["detectors"] = std::move(body["detectors"]);
        j["actions"] = std::move(body["actions"]);
        ctx.out << pretty(j);
        return 0;
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& d : m.detectors)
        rows.push_back({"detector", d.item.id, d.item.name, via_text(d)});
    for (const auto& a : m.actions)
        rows.push_back({"action", a.item.id, a.item.name, via_text(a)});
    print_table(ctx.out, {"KIND", "ID", "NAME", "VIA"}, rows);
    return 0;
}

int cmd_evidence(Context& ctx, const std::string& key, bool include_related)
{
    auto bundle = load_bundle_or_throw(ctx, ctx.data_dirs);
    const Risk& r = bundle.graph.get_risk(key);
    auto evidence = bundle.graph.evidence_for(r.id, include_related);
    if (ctx.json()) {
        Json j;
        j["risk"] = r.id.str();
        j["benchmarks"] = to_json(evidence);
        ctx.out << pretty(j);
        return 0;
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& b : evidence)
        rows.push_back({b.item.id, b.item.name, opt_text(b.item.url), via_text(b)});
    print_table(ctx.out, {"ID", "NAME", "URL", "VIA"}, rows);
    return 0;
}

int print_ranked(Context& ctx, const KnowledgeGraph& g, const PrioritizeResult& result)
{
    for (const auto& w : result.warnings)
        ctx.err << "warning: " << w << '\n';
    if (ctx.json()) {
        Json arr = Json::array();
        for (const auto& r : result.ranked) {
            Json j = to_json(r);
            if (const Risk* risk = g.find(r.risk_id))
                j["name"] = risk->name;
            arr.push_back(std::move(j));
        }
        Json body;
        body["ranked"] = std::move(arr);
        body["warnings"] = result.warnings;
        ctx.out << pretty(body);
        return 0;
    }
    std::vector<std::vector<std::string>> rows;
    std::size_t rank = 0;
    for (const auto& r : result.ranked) {
        const Risk* risk = g.find(r.risk_id);
        rows.push_back({std::to_string(++rank), fixed(r.score), r.risk_id.str(), std::string(to_string(r.method)),
                        risk ? risk->name : ""});
    }
    print_table(ctx.out, {"RANK", "SCORE", "ID", "METHOD", "NAME"}, rows);
    return 0;
}

int cmd_prioritize(Context& ctx, const std::string& source, std::size_t top, bool use_judge, const RiskFilter& scope,
                   bool scoped)
{
    if (top < 1)
        throw UsageError("--top must be at least 1");
    const std::string text = read_input(ctx, source);
    auto bundle = load_bundle_or_throw(ctx, ctx.data_dirs);
    LexicalIndex index(bundle.graph);
    PrioritizeOptions opts;
    opts.top_k = top;
    if (scoped)
        opts.scope = scope;
    std::unique_ptr<HttpJudge> judge;
    if (use_judge) {
        auto config = judge_config_from_env();
        if (config.url.empty())
            throw UsageError("--judge needs RAN_JUDGE_URL to be set");
        judge = std::make_unique<HttpJudge>(config);
        opts.judge = judge.get();
    }
    return print_ranked(ctx, bundle.graph, prioritize(bundle.graph, index, text, opts));
}

// Interactive answer parsing. Returns nullopt when the text is not acceptable for the question.
std::optional<std::vector<std::string>> parse_reply(const Question& q, const std::string& reply)
{
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    auto option_for = [&](const std::string& token) -> std::optional<std::string> {
        for (const auto& o : q.options)
            if (o.value == token)
                return o.value;
        if (!token.empty() && std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            auto n = std::stoul(token);
            if (n >= 1 && n <= q.options.size())
                return q.options[n - 1].value;
        }
        return std::nullopt;
    };
    const std::string text = trim(reply);
    switch (q.kind) {
    case QuestionKind::boolean: {
        std::string lower = text;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        if (lower == "y" || lower == "yes")
            return std::vector<std::string>{"yes"};
        if (lower == "n" || lower == "no")
            return std::vector<std::string>{"no"};
        return std::nullopt;
    }
    case QuestionKind::single_choice:
        if (auto v = option_for(text))
            return std::vector<std::string>{*v};
        return std::nullopt;
    case QuestionKind::multi_choice: {
        std::vector<std::string> values;
        if (text == "none")
            return values;
        std::stringstream ss(text);
        std::string token;
        while (std::getline(ss, token, ',')) {
            auto v = option_for(trim(token));
            if (!v)
                return std::nullopt;
            if (std::find(values.begin(), values.end(), *v) == values.end())
                values.push_back(*v);
        }
        return values;
    }
    case QuestionKind::free_text:
        return std::vector<std::string>{text};
    }
    return std::nullopt;
}

// Asks visible questions a batch at a time, saving after every batch. A blank reply ends the session.
void interview(Context& ctx, const Questionnaire& q, AnswerSet& answers,
               const std::function<void(const AnswerSet&)>& save)
{
    while (true) {
        auto batch = next_questions(q, answers);
        if (batch.empty())
            return;
        ctx.err << "-- " << batch.size() << " question(s); blank line to stop and save --\n";
        for (const auto& question : batch) {
            while (true) {
                ctx.err << question.text;
                if (question.kind == QuestionKind::boolean)
                    ctx.err << " [yes/no]";
                ctx.err << '\n';
                for (std::size_t i = 0; i < question.options.size(); ++i)
                    ctx.err << "  " << (i + 1) << ") " << question.options[i].label << " [" << question.options[i].value
                            << "]\n";
                if (question.kind == QuestionKind::multi_choice)
                    ctx.err << "  (comma-separated, or 'none')\n";
                ctx.err << "> " << std::flush;
                std::string reply;
                if (!std::getline(ctx.in, reply) || reply.find_first_not_of(" \t\r") == std::string::npos) {
                    save(answers);
                    return;
                }
                if (auto values = parse_reply(question, reply)) {
                    answers[question.id] = *values;
                    break;
                }
                ctx.err << "not a valid answer, try again\n";
            }
        }
        save(answers);
    }
}

struct AssessArgs {
    std::string questionnaire;
    std::optional<std::string> answers_path;
    bool interactive = false;
    std::optional<std::string> out_path;
    std::vector<std::string> attrs;
    std::optional<std::string> tiers_path;
    bool timestamp = false;
};

int cmd_assess(Context& ctx, const AssessArgs& args)
{
    Attributes attrs;
    for (const auto& kv : args.attrs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("--attr expects key=value, got '" + kv + "'");
        attrs[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    auto bundle = load_bundle_or_throw(ctx, ctx.data_dirs);

    Questionnaire q;
    if (std::filesystem::is_regular_file(args.questionnaire)) {
        auto parsed = load_questionnaire(read_text_file(args.questionnaire), args.questionnaire);
        for (const auto& d : parsed.diagnostics)
            ctx.err << format_diagnostic(d) << '\n';
        if (!parsed)
            throw InvalidInput("invalid_questionnaire", "questionnaire '" + args.questionnaire + "' has errors");
        auto targets = check_rule_targets(*parsed, bundle.graph, args.questionnaire);
        for (const auto& d : targets)
            ctx.err << format_diagnostic(d) << '\n';
        if (has_errors(targets))
            throw NotFound("rule_target_not_found", "questionnaire rules name unknown risks");
        q = std::move(*parsed.value);
    } else if (auto it = bundle.questionnaires.find(args.questionnaire); it != bundle.questionnaires.end()) {
        q = it->second;
    } else {
        throw NotFound("questionnaire_not_found", "no questionnaire file or id '" + args.questionnaire + "'");
    }

    AnswerSet answers;
    if (args.answers_path && std::filesystem::exists(*args.answers_path)) {
        auto doc = parse_answers_document(read_text_file(*args.answers_path));
        if (doc.questionnaire_id && *doc.questionnaire_id != q.id)
            throw InvalidInput("invalid_answers", "answers file is for questionnaire '" + *doc.questionnaire_id +
                                                      "', not '" + q.id + "'");
        answers = std::move(doc.answers);
    } else if (args.answers_path && !args.interactive) {
        throw Error("io_error", "cannot read '" + *args.answers_path + "'");
    }

    if (args.interactive) {
        const std::string save_path =
            args.answers_path ? *args.answers_path : args.out_path.value_or("assessment") + ".answers.json";
        interview(ctx, q, answers, [&](const AnswerSet& a) {
            write_file(save_path, pretty(to_json(AnswersDocument{q.id, a})));
        });
        ctx.err << "answers saved to " << save_path << '\n';
    }

    auto issues = check_answers(q, answers);
    if (!issues.empty()) {
        for (const auto& i : issues)
            ctx.err << "error: " << i.question_id << ": " << i.message << '\n';
        throw InvalidInput("invalid_answers", std::to_string(issues.size()) + " answer(s) failed validation");
    }

    std::optional<TierRuleTable> tiers;
    if (args.tiers_path) {
        auto parsed = load_tier_table(read_text_file(*args.tiers_path), *args.tiers_path);
        for (const auto& d : parsed.diagnostics)
            ctx.err << format_diagnostic(d) << '\n';
        if (!parsed)
            throw InvalidInput("invalid_tier_table", "tier table '" + *args.tiers_path + "' has errors");
        tiers = std::move(*parsed.value);
    } else if (!bundle.tier_tables.empty()) {
        tiers = bundle.tier_tables.front();
    }
    TierResult tier = tiers ? classify_eu_tier(attrs, *tiers) : TierResult{};
    auto profile = evaluate_applicability(q, answers, bundle.graph, std::move(tier),
                                          args.timestamp ? utc_timestamp() : std::string{});
    const std::string rendered = pretty(to_json(profile));

    if (args.out_path)
        write_file(*args.out_path, rendered);
    if (ctx.json() || !args.out_path) {
        ctx.out << rendered;
        return 0;
    }
    ctx.out << "questionnaire " << profile.questionnaire_id << " " << profile.questionnaire_version
            << (profile.partial ? " (partial)" : "") << '\n';
    ctx.out << "eu ai act tier: " << to_string(profile.tier.tier) << '\n';
    ctx.out << profile.count(RiskStatus::flagged) << " flagged, " << profile.count(RiskStatus::excluded)
            << " excluded, " << profile.count(RiskStatus::undetermined) << " undetermined\n";
    ctx.out << "profile written to " << *args.out_path << '\n';
    return 0;
}

int cmd_export(Context& ctx, const std::string& format)
{
    if (format != "json-graph" && format != "ntriples")
        throw UsageError("--format must be json-graph or ntriples");
    auto bundle = load_bundle_or_throw(ctx, ctx.data_dirs);
    ctx.out << export_graph(bundle.graph, format);
    return 0;
}

struct ServeArgs {
    std::optional<std::string> config_path;
    std::optional<std::string> host;
    std::optional<int> port;
    std::optional<std::string> store;
    std::optional<std::string> tiers;
};

int cmd_serve(Context& ctx, const ServeArgs& args, bool data_given)
{
    ServiceConfig config;
    if (args.config_path) {
        auto parsed = config_from_toml(read_text_file(*args.config_path), config, *args.config_path);
        for (const auto& d : parsed.diagnostics)
            ctx.err << format_diagnostic(d) << '\n';
        if (!parsed)
            throw InvalidInput("invalid_config", "config '" + *args.config_path + "' has errors");
        config = std::move(*parsed.value);
    }
    apply_env_overrides(config);
    if (data_given || config.data_dirs.empty())
        config.data_dirs = ctx.data_dirs;
    if (args.host)
        config.host = *args.host;
    if (args.port)
        config.port = *args.port;
    if (args.store)
        config.store_dir = *args.store;
    if (args.tiers)
        config.tier_table = *args.tiers;
    return serve(config, ctx.out, ctx.err);
}

} // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Query AI risk taxonomies, rank risks for a use case, and run applicability assessments.", "ran"};
    app.require_subcommand(1);
    app.fallthrough();

    std::vector<std::string> data_flags;
    std::string format = "table";
    app.add_option("--data", data_flags, "Data directory (repeatable); defaults to RAN_DATA_DIR or the bundled atlas");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "json"}));

    std::vector<std::string> validate_dirs;
    auto* validate = app.add_subcommand("validate", "Check a data directory and report diagnostics");
    validate->add_option("dirs", validate_dirs, "Directories to validate")->required();

    std::optional<std::string> f_taxonomy, f_category, f_dimension, f_descriptor, f_text;
    auto add_filters = [&](CLI::App* sub) {
        sub->add_option("--taxonomy", f_taxonomy, "Taxonomy id");
        sub->add_option("--category", f_category, "Risk category");
        sub->add_option("--dimension", f_dimension, "Dimension name");
        sub->add_option("--descriptor", f_descriptor, "Descriptor");
    };
    auto* risks = app.add_subcommand("risks", "Risk catalog queries");
    risks->require_subcommand(1);
    auto* risks_list = risks->add_subcommand("list", "List risks matching all given filters");
    add_filters(risks_list);
    risks_list->add_option("--text", f_text, "Case-insensitive substring of name or description");

    std::string key;
    auto* risk = app.add_subcommand("risk", "Single-risk queries");
    risk->require_subcommand(1);
    auto* risk_show = risk->add_subcommand("show", "Show one risk by id or tag");
    risk_show->add_option("key", key, "Risk id or tag")->required();

    int hops = default_max_hops;
    std::string min_strength = "1";
    auto* related = app.add_subcommand("related", "Risks related through taxonomy mappings");
    related->add_option("key", key, "Risk id or tag")->required();
    related->add_option("--hops", hops, "Maximum mapping hops");
    related->add_option("--min-strength", min_strength, "Minimum strength (1-4 or a predicate name)");

    bool include_related = false;
    auto* mitigations = app.add_subcommand("mitigations", "Detectors and actions linked to a risk");
    mitigations->add_option("key", key, "Risk id or tag")->required();
    mitigations->add_flag("--include-related", include_related, "Also follow exact mappings");
    auto* evidence = app.add_subcommand("evidence", "Benchmarks linked to a risk");
    evidence->add_option("key", key, "Risk id or tag")->required();
    evidence->add_flag("--include-related", include_related, "Also follow exact mappings");

    std::string use_case;
    std::size_t top = 10;
    bool use_judge = false;
    auto* prioritize_cmd = app.add_subcommand("prioritize", "Rank risks by relevance to a use case");
    prioritize_cmd->add_option("--use-case", use_case, "Use-case text file, or - for stdin")->required();
    prioritize_cmd->add_option("--top", top, "Number of results");
    prioritize_cmd->add_flag("--judge", use_judge, "Score with the judge at RAN_JUDGE_URL");
    add_filters(prioritize_cmd);

    std::string tag_text;
    std::size_t tag_top = 5;
    auto* tag = app.add_subcommand("tag", "Suggest risk tags for a resource description");
    tag->add_option("--text", tag_text, "Text file, or - for stdin")->required();
    tag->add_option("--top", tag_top, "Number of tags");
    tag->add_flag("--judge", use_judge, "Score with the judge at RAN_JUDGE_URL");

    AssessArgs assess_args;
    auto* assess = app.add_subcommand("assess", "Evaluate a questionnaire into a risk profile");
    assess->add_option("--questionnaire", assess_args.questionnaire, "Questionnaire file or id")->required();
    assess->add_option("--answers", assess_args.answers_path, "Answers file (read, and written when interactive)");
    assess->add_flag("--interactive", assess_args.interactive, "Ask unanswered questions on the terminal");
    assess->add_option("--out", assess_args.out_path, "Write the profile here");
    assess->add_option("--attr", assess_args.attrs, "Use-case attribute key=value for tier classification");
    assess->add_option("--tiers", assess_args.tiers_path, "Tier rule table file");
    assess->add_flag("--timestamp", assess_args.timestamp, "Stamp generated_at with the current UTC time");

    std::string export_format = "json-graph";
    auto* export_cmd = app.add_subcommand("export", "Export the knowledge graph");
    export_cmd->add_option("--format", export_format, "json-graph or ntriples");

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    serve_cmd->add_option("--config", serve_args.config_path, "TOML config file");
    serve_cmd->add_option("--host", serve_args.host, "Bind address");
    serve_cmd->add_option("--port", serve_args.port, "Port")->check(CLI::Range(1, 65535));
    serve_cmd->add_option("--store", serve_args.store, "Assessment store directory");
    serve_cmd->add_option("--tiers", serve_args.tiers, "Tier rule table file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    Context ctx{in, out, err, resolve_data_dirs(data_flags), format};
    try {
        if (validate->parsed())
            return cmd_validate(ctx, validate_dirs);
        if (risks_list->parsed())
            return cmd_risks_list(ctx, build_filter(f_taxonomy, f_category, f_dimension, f_descriptor, f_text));
        if (risk_show->parsed())
            return cmd_risk_show(ctx, key);
        if (related->parsed())
            return cmd_related(ctx, key, hops, min_strength);
        if (mitigations->parsed())
            return cmd_mitigations(ctx, key, include_related);
        if (evidence->parsed())
            return cmd_evidence(ctx, key, include_related);
        if (prioritize_cmd->parsed()) {
            const bool scoped = f_taxonomy || f_category || f_dimension || f_descriptor;
            return cmd_prioritize(ctx, use_case, top, use_judge,
                                  build_filter(f_taxonomy, f_category, f_dimension, f_descriptor, std::nullopt), scoped);
        }
        if (tag->parsed())
            return cmd_prioritize(ctx, tag_text, tag_top, use_judge, RiskFilter{}, false);
        if (assess->parsed())
            return cmd_assess(ctx, assess_args);
        if (export_cmd->parsed())
            return cmd_export(ctx, export_format);
        if (serve_cmd->parsed())
            return cmd_serve(ctx, serve_args, !data_flags.empty());
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << " [" << e.code() << "]\n";
        for (const auto& d : e.details())
            err << "  " << d << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    err << app.help();
    return 2;
}

} // namespace ran
