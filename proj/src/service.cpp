#include "ran/service.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>

#include <httplib.h>

#include "ran/export.hpp"
#include "ran/ingest.hpp"
#include "ran/json_codec.hpp"

namespace ran {

std::optional<std::string> Request::header(std::string_view name) const
{
    std::string key(name);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    auto it = headers.find(key);
    if (it == headers.end())
        return std::nullopt;
    return it->second;
}

std::string error_body(const std::string& code, const std::string& message, const std::vector<std::string>& details)
{
    Json j;
    j["code"] = code;
    j["message"] = message;
    j["details"] = details;
    return dump(j);
}

namespace {

/// Thrown by handlers to produce a specific status with the error envelope.
struct HttpError {
    int status;
    std::string code;
    std::string message;
    std::vector<std::string> details;
};

Response json_response(const Json& j, int status = 200)
{
    Response r;
    r.status = status;
    r.body = dump(j);
    return r;
}

Response error_response(int status, const std::string& code, const std::string& message,
                        const std::vector<std::string>& details = {})
{
    Response r;
    r.status = status;
    r.body = error_body(code, message, details);
    return r;
}

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos < path.size()) {
        auto slash = path.find('/', pos);
        if (slash == std::string::npos)
            slash = path.size();
        if (slash > pos)
            parts.push_back(path.substr(pos, slash - pos));
        pos = slash + 1;
    }
    return parts;
}

std::optional<std::string> query_param(const Request& req, const char* name)
{
    auto it = req.query.find(name);
    if (it == req.query.end())
        return std::nullopt;
    return it->second;
}

int int_param(const Request& req, const char* name, int fallback, int lo, int hi)
{
    auto v = query_param(req, name);
    if (!v)
        return fallback;
    int n = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), n);
    if (ec != std::errc{} || ptr != v->data() + v->size() || n < lo || n > hi)
        throw HttpError{400, "invalid_argument",
                        std::string("query parameter '") + name + "' must be an integer in " + std::to_string(lo) +
                            ".." + std::to_string(hi),
                        {}};
    return n;
}

bool bool_param(const Request& req, const char* name)
{
    auto v = query_param(req, name);
    if (!v)
        return false;
    if (*v == "true" || *v == "1" || v->empty())
        return true;
    if (*v == "false" || *v == "0")
        return false;
    throw HttpError{400, "invalid_argument", std::string("query parameter '") + name + "' must be true or false", {}};
}

int min_strength_param(const Request& req)
{
    auto v = query_param(req, "min_strength");
    if (!v)
        return 1;
    if (auto p = parse_predicate(*v))
        return strength(*p);
    return int_param(req, "min_strength", 1, 1, 4);
}

RiskFilter filter_from_strings(const std::map<std::string, std::string>& fields)
{
    RiskFilter f;
    for (const auto& [key, value] : fields) {
        if (key == "taxonomy") {
            f.taxonomy = value;
        } else if (key == "category") {
            f.category = parse_category(value);
            if (!f.category)
                throw HttpError{400, "invalid_argument", "unknown category '" + value + "'", {}};
        } else if (key == "dimension") {
            f.dimension = value;
        } else if (key == "descriptor") {
            f.descriptor = parse_descriptor(value);
            if (!f.descriptor)
                throw HttpError{400, "invalid_argument", "unknown descriptor '" + value + "'", {}};
        } else if (key == "text") {
            f.text = value;
        }
    }
    return f;
}

RiskFilter filter_from_json(const Json& j)
{
    if (!j.is_object())
        throw HttpError{400, "invalid_argument", "'scope' must be an object", {}};
    std::map<std::string, std::string> fields;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it->is_string())
            throw HttpError{400, "invalid_argument", "scope field '" + it.key() + "' must be a string", {}};
        fields[it.key()] = it->get<std::string>();
    }
    return filter_from_strings(fields);
}

Json parse_body(const Request& req)
{
    if (req.body.empty())
        return Json::object();
    Json j = parse_json(req.body);
    if (!j.is_object())
        throw HttpError{400, "invalid_json", "request body must be a JSON object", {}};
    return j;
}

long long required_revision(const Request& req)
{
    auto h = req.header("if-match");
    if (!h)
        throw HttpError{428, "if_match_required", "mutations require an If-Match header carrying the revision", {}};
    std::string_view v = *h;
    if (v.substr(0, 2) == "W/")
        v.remove_prefix(2);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        v = v.substr(1, v.size() - 2);
    long long n = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw HttpError{400, "invalid_argument", "If-Match must be a revision number", {}};
    return n;
}

std::string etag(long long revision)
{
    return "\"" + std::to_string(revision) + "\"";
}

Json ranked_json(const KnowledgeGraph& g, const PrioritizeResult& result)
{
    Json ranked = Json::array();
    for (const auto& r : result.ranked) {
        Json j = to_json(r);
        if (const Risk* risk = g.find(r.risk_id)) {
            Json out;
            out["id"] = j["id"];
            out["name"] = risk->name;
            out["category"] = risk->category ? Json(std::string(to_string(*risk->category))) : Json();
            out["score"] = j["score"];
            out["method"] = j["method"];
            out["rationale"] = j["rationale"];
            j = std::move(out);
        }
        ranked.push_back(std::move(j));
    }
    Json body;
    body["ranked"] = std::move(ranked);
    body["warnings"] = result.warnings;
    return body;
}

std::vector<std::string> issue_details(const std::vector<AnswerIssue>& issues)
{
    std::vector<std::string> out;
    for (const auto& i : issues)
        out.push_back(i.question_id + ": " + i.message);
    return out;
}

Json issues_json(const std::vector<AnswerIssue>& issues)
{
    Json arr = Json::array();
    for (const auto& i : issues)
        arr.push_back({{"question", i.question_id}, {"message", i.message}});
    return arr;
}

Response unprocessable(const std::vector<AnswerIssue>& issues)
{
    Json j;
    j["code"] = "invalid_answers";
    j["message"] = std::to_string(issues.size()) + " answer(s) failed validation";
    j["details"] = issue_details(issues);
    j["issues"] = issues_json(issues);
    return json_response(j, 422);
}

std::string read_string_field(const Json& body, const char* key, bool required)
{
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
        if (required)
            throw HttpError{400, "invalid_argument", std::string("missing string field '") + key + "'", {}};
        return {};
    }
    if (!it->is_string())
        throw HttpError{400, "invalid_argument", std::string("field '") + key + "' must be a string", {}};
    return it->get<std::string>();
}

std::size_t top_k_field(const Json& body, std::size_t fallback)
{
    auto it = body.find("top_k");
    if (it == body.end())
        return fallback;
    if (!it->is_number_integer() || it->get<long long>() < 1 || it->get<long long>() > 10000)
        throw HttpError{400, "invalid_argument", "'top_k' must be a positive integer", {}};
    return it->get<std::size_t>();
}

} // namespace

Api::Api(DataBundle bundle, AssessmentStore& store, ApiOptions options)
    : bundle_(std::move(bundle)), index_(bundle_.graph), store_(store), options_(std::move(options))
{
    if (options_.tier_table)
        tiers_ = &*options_.tier_table;
    else if (!bundle_.tier_tables.empty())
        tiers_ = &bundle_.tier_tables.front();
}

Response Api::handle(const Request& request) const
{
    try {
        return route(request);
    } catch (const HttpError& e) {
        return error_response(e.status, e.code, e.message, e.details);
    } catch (const RevisionConflict& e) {
        auto r = error_response(409, e.code(), e.what(), {"current revision " + std::to_string(e.actual())});
        r.headers["ETag"] = etag(e.actual());
        return r;
    } catch (const NotFound& e) {
        return error_response(404, e.code(), e.what(), e.details());
    } catch (const AmbiguousTag& e) {
        return error_response(409, e.code(), e.what(), e.details());
    } catch (const InvalidInput& e) {
        return error_response(400, e.code(), e.what(), e.details());
    } catch (const Error& e) {
        return error_response(500, e.code(), e.what(), e.details());
    } catch (const std::exception& e) {
        return error_response(500, "internal_error", e.what());
    }
}

Response Api::route(const Request& req) const
{
    const auto parts = split_path(req.path);
    const auto& g = bundle_.graph;
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";
    auto method_not_allowed = [&] {
        return error_response(405, "method_not_allowed", req.method + " is not supported on " + req.path);
    };

    if (parts.size() == 1 && parts[0] == "health") {
        if (!get)
            return method_not_allowed();
        return json_response({{"status", "ok"}, {"risks", g.risk_count()}});
    }

    if (!parts.empty() && parts[0] == "risks") {
        if (!get)
            return method_not_allowed();
        if (parts.size() == 1) {
            std::map<std::string, std::string> fields(req.query.begin(), req.query.end());
            Json risks = Json::array();
            for (const auto& r : g.list_risks(filter_from_strings(fields)))
                risks.push_back(to_json(r));
            Json body;
            body["count"] = risks.size();
            body["risks"] = std::move(risks);
            return json_response(body);
        }
        const Risk& risk = g.get_risk(parts[1]);
        if (parts.size() == 2)
            return json_response(to_json(risk));
        if (parts.size() == 3 && parts[2] == "related") {
            const int hops = int_param(req, "hops", default_max_hops, 1, 6);
            const int min_strength = min_strength_param(req);
            Json related = Json::array();
            for (const auto& r : g.related_risks(risk.id, hops, min_strength))
                related.push_back(to_json(r));
            Json body;
            body["risk"] = risk.id.str();
            body["hops"] = hops;
            body["min_strength"] = min_strength;
            body["related"] = std::move(related);
            return json_response(body);
        }
        if (parts.size() == 3 && parts[2] == "mitigations") {
            Json body;
            body["risk"] = risk.id.str();
            Json m = to_json(g.mitigations_for(risk.id, bool_param(req, "include_related")));
            body["detectors"] = std::move(m["detectors"]);
            body["actions"] = std::move(m["actions"]);
            return json_response(body);
        }
        if (parts.size() == 3 && parts[2] == "evidence") {
            Json body;
            body["risk"] = risk.id.str();
            body["benchmarks"] = to_json(g.evidence_for(risk.id, bool_param(req, "include_related")));
            return json_response(body);
        }
    }

    if (parts.size() == 1 && (parts[0] == "prioritize" || parts[0] == "tag")) {
        if (!post)
            return method_not_allowed();
        const bool is_tag = parts[0] == "tag";
        Json body = parse_body(req);
        PrioritizeOptions opts;
        opts.top_k = top_k_field(body, is_tag ? 5 : 10);
        std::string text = read_string_field(body, is_tag ? "text" : "use_case", true);
        if (auto it = body.find("scope"); it != body.end() && !it->is_null())
            opts.scope = filter_from_json(*it);
        std::vector<std::string> extra;
        if (auto it = body.find("judge"); it != body.end() && it->is_boolean() && it->get<bool>()) {
            if (options_.judge)
                opts.judge = options_.judge;
            else
                extra.push_back("no judge is configured; lexical scores used");
        }
        auto result = prioritize(g, index_, text, opts);
        result.warnings.insert(result.warnings.begin(), extra.begin(), extra.end());
        return json_response(ranked_json(g, result));
    }

    if (!parts.empty() && parts[0] == "questionnaires") {
        if (!get)
            return method_not_allowed();
        if (parts.size() == 1) {
            Json list = Json::array();
            for (const auto& [id, q] : bundle_.questionnaires)
                list.push_back({{"id", q.id}, {"name", q.name}, {"version", q.version},
                                {"questions", q.questions.size()}, {"rules", q.rules.size()}});
            return json_response({{"questionnaires", std::move(list)}});
        }
        if (parts.size() == 2) {
            auto it = bundle_.questionnaires.find(parts[1]);
            if (it == bundle_.questionnaires.end())
                throw NotFound("questionnaire_not_found", "no questionnaire '" + parts[1] + "'");
            return json_response(to_json(it->second));
        }
    }

    if (!parts.empty() && parts[0] == "assessments") {
        auto questionnaire_for = [&](const std::string& id) -> const Questionnaire& {
            auto it = bundle_.questionnaires.find(id);
            if (it == bundle_.questionnaires.end())
                throw NotFound("questionnaire_not_found", "no questionnaire '" + id + "'");
            return it->second;
        };
        auto view = [&](const AssessmentRecord& r, int status = 200) {
            Json j = to_json(r);
            Json next = Json::array();
            if (auto it = bundle_.questionnaires.find(r.questionnaire_id); it != bundle_.questionnaires.end())
                for (const auto& q : next_questions(it->second, r.answers))
                    next.push_back(to_json(q));
            j["complete"] = next.empty();
            j["next_questions"] = std::move(next);
            auto resp = json_response(j, status);
            resp.headers["ETag"] = etag(r.revision);
            return resp;
        };
        auto load = [&](const std::string& id) {
            auto r = store_.get(id);
            if (!r)
                throw NotFound("assessment_not_found", "no assessment '" + id + "'");
            return *r;
        };

        if (parts.size() == 1) {
            if (!post)
                return method_not_allowed();
            Json body = parse_body(req);
            std::string qid = read_string_field(body, "questionnaire", false);
            if (qid.empty()) {
                if (bundle_.questionnaires.size() != 1)
                    throw HttpError{400, "invalid_argument",
                                    "field 'questionnaire' is required when several questionnaires are loaded",
                                    {}};
                qid = bundle_.questionnaires.begin()->first;
            }
            const Questionnaire& q = questionnaire_for(qid);
            AssessmentRecord draft;
            draft.use_case_text = read_string_field(body, "use_case_text", false);
            draft.questionnaire_id = q.id;
            draft.questionnaire_version = q.version;
            if (auto it = body.find("attrs"); it != body.end() && !it->is_null()) {
                if (!it->is_object())
                    throw HttpError{400, "invalid_argument", "'attrs' must be an object of strings", {}};
                for (auto a = it->begin(); a != it->end(); ++a) {
                    if (!a->is_string())
                        throw HttpError{400, "invalid_argument", "attr '" + a.key() + "' must be a string", {}};
                    draft.attrs[a.key()] = a->get<std::string>();
                }
            }
            if (auto it = body.find("answers"); it != body.end() && !it->is_null()) {
                draft.answers = answers_from_json(*it);
                if (auto issues = check_answers(q, draft.answers); !issues.empty())
                    return unprocessable(issues);
            }
            return view(store_.create(std::move(draft)), 201);
        }

        const std::string& id = parts[1];
        if (parts.size() == 2) {
            if (!get)
                return method_not_allowed();
            return view(load(id));
        }
        if (parts.size() == 3 && parts[2] == "profile") {
            if (!get)
                return method_not_allowed();
            auto r = load(id);
            if (!r.profile)
                throw NotFound("profile_not_found", "assessment '" + id + "' has not been evaluated");
            auto resp = json_response(to_json(*r.profile));
            resp.headers["ETag"] = etag(r.revision);
            return resp;
        }
        if (parts.size() == 3 && parts[2] == "answers") {
            if (!post)
                return method_not_allowed();
            const long long expected = required_revision(req);
            Json body = parse_body(req);
            auto it = body.find("answers");
            if (it == body.end() || !it->is_object())
                throw HttpError{400, "invalid_argument", "body must contain an 'answers' object", {}};
            // A null value withdraws an earlier answer.
            Json submitted = Json::object();
            std::vector<std::string> withdrawn;
            for (auto a = it->begin(); a != it->end(); ++a) {
                if (a->is_null())
                    withdrawn.push_back(a.key());
                else
                    submitted[a.key()] = *a;
            }
            AnswerSet incoming = answers_from_json(submitted);
            auto current = load(id);
            const Questionnaire& q = questionnaire_for(current.questionnaire_id);
            std::vector<AnswerIssue> issues;
            std::optional<AssessmentRecord> updated;
            try {
                updated = store_.update(id, expected, [&](AssessmentRecord& r) {
                    for (const auto& w : withdrawn)
                        r.answers.erase(w);
                    for (auto& [qid, values] : incoming)
                        r.answers[qid] = values;
                    issues = check_answers(q, r.answers);
                    if (!issues.empty())
                        throw HttpError{422, "invalid_answers", "", {}};
                });
            } catch (const HttpError& e) {
                if (e.status == 422)
                    return unprocessable(issues);
                throw;
            }
            return view(*updated);
        }
        if (parts.size() == 3 && parts[2] == "evaluate") {
            if (!post)
                return method_not_allowed();
            const long long expected = required_revision(req);
            auto current = load(id);
            const Questionnaire& q = questionnaire_for(current.questionnaire_id);
            auto updated = store_.update(id, expected, [&](AssessmentRecord& r) {
                TierResult tier = tiers_ ? classify_eu_tier(r.attrs, *tiers_) : TierResult{};
                r.profile = evaluate_applicability(q, r.answers, g, std::move(tier), options_.clock());
            });
            auto resp = json_response(to_json(*updated.profile));
            resp.headers["ETag"] = etag(updated.revision);
            return resp;
        }
    }

    if (parts.size() == 1 && parts[0] == "export") {
        if (!get)
            return method_not_allowed();
        const std::string format = query_param(req, "format").value_or("json-graph");
        Response r;
        r.body = export_graph(g, format);
        r.content_type = format == "ntriples" ? "application/n-triples" : "application/json";
        return r;
    }

    return error_response(404, "not_found", "no route for " + req.method + " " + req.path);
}

struct HttpServer::Impl {
    Impl(const Api& a, std::ostream* l) : api(a), log(l) {}
    const Api& api;
    std::ostream* log;
    std::mutex log_mutex;
    httplib::Server server;
};

HttpServer::HttpServer(const Api& api, std::ostream* log) : impl_(std::make_unique<Impl>(api, log))
{
    auto handler = [this](const httplib::Request& in, httplib::Response& out) {
        const auto start = std::chrono::steady_clock::now();
        Request req;
        req.method = in.method;
        req.path = in.path;
        for (const auto& [k, v] : in.params)
            req.query.emplace(k, v);
        for (const auto& [k, v] : in.headers) {
            std::string key = k;
            std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
            req.headers.emplace(std::move(key), v);
        }
        req.body = in.body;

        Response resp = impl_->api.handle(req);
        out.status = resp.status;
        for (const auto& [k, v] : resp.headers)
            out.set_header(k, v);
        out.set_content(resp.body, resp.content_type);

        if (impl_->log) {
            const auto micros =
                std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
            Json line;
            line["ts"] = utc_timestamp();
            line["method"] = req.method;
            line["path"] = req.path;
            line["status"] = resp.status;
            line["duration_ms"] = static_cast<double>(micros.count()) / 1000.0;
            line["remote"] = in.remote_addr;
            std::lock_guard guard(impl_->log_mutex);
            *impl_->log << dump(line) << '\n' << std::flush;
        }
    };
    const std::string any = ".*";
    impl_->server.Get(any, handler);
    impl_->server.Post(any, handler);
    impl_->server.Put(any, handler);
    impl_->server.Delete(any, handler);
    impl_->server.Patch(any, handler);
}

HttpServer::~HttpServer()
{
    stop();
}

int HttpServer::bind(const std::string& host, int port)
{
    if (port == 0)
        return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen()
{
    return impl_->server.listen_after_bind();
}

void HttpServer::stop()
{
    if (impl_)
        impl_->server.stop();
}

int serve(const ServiceConfig& config, std::ostream& out, std::ostream& err)
{
    std::vector<std::filesystem::path> dirs(config.data_dirs.begin(), config.data_dirs.end());
    auto bundle = load_data_bundle(dirs);
    for (const auto& d : bundle.diagnostics)
        err << format_diagnostic(d) << '\n';
    if (!bundle) {
        err << "refusing to start: the data bundle has errors\n";
        return 1;
    }

    ApiOptions options;
    if (config.tier_table) {
        auto table = load_tier_table(read_text_file(*config.tier_table), *config.tier_table);
        for (const auto& d : table.diagnostics)
            err << format_diagnostic(d) << '\n';
        if (!table) {
            err << "refusing to start: the tier table has errors\n";
            return 1;
        }
        options.tier_table = std::move(*table);
    }
    std::unique_ptr<HttpJudge> judge;
    if (!config.judge.url.empty()) {
        judge = std::make_unique<HttpJudge>(config.judge);
        options.judge = judge.get();
    }

    AssessmentStore store(config.store_dir);
    const std::size_t risk_count = bundle->graph.risk_count();
    Api api(std::move(*bundle.value), store, std::move(options));
    HttpServer server(api, &out);
    const int port = server.bind(config.host, config.port);
    if (port <= 0) {
        err << "cannot bind " << config.host << ":" << config.port << '\n';
        return 1;
    }
    Json hello;
    hello["ts"] = utc_timestamp();
    hello["event"] = "listening";
    hello["host"] = config.host;
    hello["port"] = port;
    hello["risks"] = risk_count;
    hello["store"] = config.store_dir;
    out << dump(hello) << '\n' << std::flush;
    return server.listen() ? 0 : 1;
}

} // namespace ran
