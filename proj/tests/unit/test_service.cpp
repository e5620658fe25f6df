#include <doctest.h>

#include <httplib.h>

#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "ran/export.hpp"
#include "ran/json_codec.hpp"
#include "ran/service.hpp"

using namespace ran;

namespace {

DataBundle load(const std::vector<std::string>& dirs)
{
    std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
    auto b = load_data_bundle(paths);
    REQUIRE(b);
    return *b;
}

ApiOptions fixed_clock()
{
    ApiOptions o;
    o.clock = [] { return std::string("2024-05-01T12:00:00Z"); };
    return o;
}

Request make(const std::string& method, const std::string& path, const std::string& body = {},
             std::map<std::string, std::string> headers = {})
{
    Request r;
    r.method = method;
    auto q = path.find('?');
    r.path = path.substr(0, q);
    if (q != std::string::npos) {
        std::istringstream in(path.substr(q + 1));
        std::string kv;
        while (std::getline(in, kv, '&')) {
            auto eq = kv.find('=');
            r.query[kv.substr(0, eq)] = eq == std::string::npos ? "" : kv.substr(eq + 1);
        }
    }
    r.headers = std::move(headers);
    r.body = body;
    return r;
}

Json body_of(const Response& r) { return parse_json(r.body, "response"); }

struct AtlasApi {
    testing::TempDir dir;
    AssessmentStore store{dir.path()};
    Api api{testing::atlas_bundle(), store, fixed_clock()};
    Response get(const std::string& path) const { return api.handle(make("GET", path)); }
    Response post(const std::string& path, const std::string& body,
                  std::map<std::string, std::string> headers = {}) const
    {
        return api.handle(make("POST", path, body, std::move(headers)));
    }
};

struct SmallApi {
    testing::TempDir dir;
    AssessmentStore store{dir.path()};
    Api api{load({testing::fixture_path("bundles/small")}), store, fixed_clock()};
    Response get(const std::string& path) const { return api.handle(make("GET", path)); }
    Response post(const std::string& path, const std::string& body,
                  std::map<std::string, std::string> headers = {}) const
    {
        return api.handle(make("POST", path, body, std::move(headers)));
    }
    std::string create(const std::string& body = R"({"use_case_text":"demo","attrs":{"interaction":"chatbot"}})")
    {
        auto r = post("/assessments", body);
        REQUIRE(r.status == 201);
        return body_of(r)["id"].get<std::string>();
    }
};

std::map<std::string, std::string> if_match(const std::string& v) { return {{"if-match", v}}; }

} // namespace

TEST_CASE("health and risk listing")
{
    AtlasApi a;
    auto h = a.get("/health");
    CHECK(h.status == 200);
    CHECK(h.content_type == "application/json");
    CHECK(h.body == R"({"status":"ok","risks":95})");
    auto all = body_of(a.get("/risks"));
    CHECK(all["count"] == 95);
    auto pa = body_of(a.get("/risks?category=inference&dimension=Prompt attacks"));
    CHECK(pa["count"] == 9);
    CHECK(a.get("/risks?category=bogus").status == 400);
}

TEST_CASE("single risk by id or tag")
{
    AtlasApi a;
    auto r = body_of(a.get("/risks/hallucination"));
    CHECK(r["id"] == "atlas-hallucination");
    CHECK(r["category"] == "output");
    auto missing = a.get("/risks/nope");
    CHECK(missing.status == 404);
    auto e = body_of(missing);
    CHECK(e["code"] == "risk_not_found");
    CHECK(e.contains("message"));
    CHECK(e["details"].is_array());
}

TEST_CASE("an ambiguous tag is a conflict")
{
    testing::TempDir dir;
    AssessmentStore store(dir.path());
    Api api(load({testing::atlas_dir(), testing::source_path("data/samples")}), store);
    auto r = api.handle(make("GET", "/risks/prompt-injection"));
    CHECK(r.status == 409);
    auto e = body_of(r);
    CHECK(e["code"] == "ambiguous_tag");
    CHECK(e["details"].size() == 2);
    auto rel = body_of(api.handle(make("GET", "/risks/atlas-prompt-injection/related?min_strength=exact")));
    REQUIRE(rel["related"].size() == 1);
    CHECK(rel["related"][0]["id"] == "owasp-llm01");
}

TEST_CASE("related, mitigations and evidence")
{
    AtlasApi a;
    auto rel = a.get("/risks/atlas-hallucination/related?hops=3&min_strength=2");
    CHECK(rel.status == 200);
    auto j = body_of(rel);
    CHECK(j["hops"] == 3);
    CHECK(j["min_strength"] == 2);
    CHECK(a.get("/risks/atlas-hallucination/related?hops=9").status == 400);
    CHECK(a.get("/risks/atlas-hallucination/related?min_strength=strong").status == 400);
    auto m = body_of(a.get("/risks/atlas-hallucination/mitigations"));
    CHECK(m["detectors"].size() == 2);
    CHECK(m["actions"].is_array());
    auto ev = body_of(a.get("/risks/atlas-hallucination/evidence?include_related=true"));
    CHECK(ev["benchmarks"][0]["id"] == "truthfulqa");
    CHECK(a.get("/risks/atlas-hallucination/evidence?include_related=maybe").status == 400);
    CHECK(a.get("/risks/atlas-hallucination/unknown").status == 404);
}

TEST_CASE("prioritize and tag")
{
    AtlasApi a;
    auto r = a.post("/prioritize", R"({"use_case":"Customer chatbot answering with our documents","top_k":3})");
    CHECK(r.status == 200);
    auto j = body_of(r);
    REQUIRE(j["ranked"].size() == 3);
    CHECK(j["ranked"][0].contains("score"));
    CHECK(j["ranked"][0]["method"] == "lexical");
    CHECK(j["warnings"].empty());
    auto scoped = body_of(a.post("/prioritize", R"({"use_case":"agents","top_k":50,"scope":{"category":"agentic"}})"));
    CHECK(scoped["ranked"].size() == 22);
    auto judged = body_of(a.post("/prioritize", R"({"use_case":"x","judge":true})"));
    CHECK(judged["warnings"][0] == "no judge is configured; lexical scores used");
    auto tag = body_of(a.post("/tag", R"({"text":"toxicity benchmark"})"));
    CHECK(tag["ranked"].size() == 5);
    CHECK(a.post("/prioritize", R"({"top_k":3})").status == 400);
    CHECK(a.post("/prioritize", R"({"use_case":"x","top_k":0})").status == 400);
    CHECK(a.post("/prioritize", "{oops").status == 400);
    CHECK(body_of(a.post("/prioritize", "{oops"))["code"] == "invalid_json");
    CHECK(a.get("/prioritize").status == 405);
}

TEST_CASE("export route")
{
    AtlasApi a;
    auto j = a.get("/export");
    CHECK(j.status == 200);
    CHECK(j.body == export_graph(a.api.graph(), "json-graph"));
    auto nt = a.get("/export?format=ntriples");
    CHECK(nt.content_type == "application/n-triples");
    CHECK(a.get("/export?format=turtle").status == 400);
}

TEST_CASE("unknown routes")
{
    AtlasApi a;
    CHECK(a.get("/nowhere").status == 404);
    CHECK(body_of(a.get("/nowhere"))["code"] == "not_found");
    CHECK(a.post("/health", "").status == 405);
}

TEST_CASE("questionnaires")
{
    SmallApi s;
    auto list = body_of(s.get("/questionnaires"));
    REQUIRE(list["questionnaires"].size() == 1);
    CHECK(list["questionnaires"][0]["id"] == "branching");
    auto q = body_of(s.get("/questionnaires/branching"));
    CHECK(q["questions"].size() == 6);
    CHECK(s.get("/questionnaires/nope").status == 404);
}

TEST_CASE("assessment lifecycle")
{
    SmallApi s;
    auto created = s.post("/assessments", R"({"use_case_text":"demo","attrs":{"interaction":"chatbot"}})");
    REQUIRE(created.status == 201);
    auto c = body_of(created);
    const std::string id = c["id"];
    CHECK(c["revision"] == 1);
    CHECK(created.headers.at("ETag") == "\"1\"");
    CHECK(c["complete"] == false);
    CHECK(c["next_questions"][0]["id"] == "generates");

    CHECK(s.get("/assessments/" + id + "/profile").status == 404);
    CHECK(body_of(s.get("/assessments/" + id + "/profile"))["code"] == "profile_not_found");

    auto missing_header = s.post("/assessments/" + id + "/answers", R"({"answers":{"generates":"yes"}})");
    CHECK(missing_header.status == 428);
    CHECK(s.post("/assessments/" + id + "/answers", R"({"answers":{}})", if_match("abc")).status == 400);

    auto answered = s.post("/assessments/" + id + "/answers", R"({"answers":{"generates":"yes","trains":false}})",
                           if_match("\"1\""));
    REQUIRE(answered.status == 200);
    auto a = body_of(answered);
    CHECK(a["revision"] == 2);
    CHECK(a["answers"]["trains"] == "no");
    CHECK(a["next_questions"][0]["id"] == "audience");

    auto stale = s.post("/assessments/" + id + "/answers", R"({"answers":{"notes":"late"}})", if_match("1"));
    CHECK(stale.status == 409);
    CHECK(body_of(stale)["code"] == "revision_conflict");
    CHECK(stale.headers.at("ETag") == "\"2\"");

    auto invalid = s.post("/assessments/" + id + "/answers", R"({"answers":{"audience":"martians"}})",
                          if_match("W/\"2\""));
    CHECK(invalid.status == 422);
    auto inv = body_of(invalid);
    CHECK(inv["code"] == "invalid_answers");
    CHECK(inv["issues"][0]["question"] == "audience");
    CHECK(body_of(s.get("/assessments/" + id))["revision"] == 2);

    auto withdrawn = s.post("/assessments/" + id + "/answers", R"({"answers":{"trains":null,"notes":"n"}})",
                            if_match("2"));
    REQUIRE(withdrawn.status == 200);
    CHECK_FALSE(body_of(withdrawn)["answers"].contains("trains"));

    auto eval = s.post("/assessments/" + id + "/evaluate", "", if_match("3"));
    REQUIRE(eval.status == 200);
    auto p = body_of(eval);
    CHECK(p["partial"] == true);
    CHECK(p["eu_ai_act"]["tier"] == "limited_risk");
    CHECK(p["generated_at"] == "2024-05-01T12:00:00Z");
    CHECK(eval.headers.at("ETag") == "\"4\"");
    auto profile = s.get("/assessments/" + id + "/profile");
    CHECK(profile.status == 200);
    CHECK(profile.body == eval.body);
    CHECK(s.post("/assessments/" + id + "/evaluate", "", if_match("3")).status == 409);
    CHECK(s.get("/assessments/0123456789abcdef0123456789abcdef").status == 404);
}

TEST_CASE("creating with invalid input")
{
    SmallApi s;
    CHECK(s.post("/assessments", R"({"questionnaire":"nope"})").status == 404);
    CHECK(s.post("/assessments", R"({"attrs":{"a":1}})").status == 400);
    CHECK(s.post("/assessments", R"({"answers":{"generates":"perhaps"}})").status == 422);
    auto with_answers = s.post("/assessments", R"({"answers":{"generates":"no"}})");
    CHECK(with_answers.status == 201);
}

TEST_CASE("repeated reads are byte-identical")
{
    SmallApi s;
    auto id = s.create();
    s.post("/assessments/" + id + "/evaluate", "", if_match("1"));
    for (auto path : {"/assessments/" + id, "/assessments/" + id + "/profile", std::string("/risks"),
                      std::string("/questionnaires/branching")}) {
        auto first = s.get(path);
        CHECK(s.get(path).body == first.body);
    }
}

TEST_CASE("a restarted service returns the same bytes")
{
    testing::TempDir dir;
    std::string id, profile_before, record_before;
    {
        AssessmentStore store(dir.path());
        Api api(load({testing::fixture_path("bundles/small")}), store);
        auto created = api.handle(make("POST", "/assessments", R"({"attrs":{"purpose":"video-game"}})"));
        id = body_of(created)["id"];
        api.handle(make("POST", "/assessments/" + id + "/answers",
                        testing::read_fixture("answers/branching-full.json"), if_match("1")));
        auto eval = api.handle(make("POST", "/assessments/" + id + "/evaluate", "", if_match("2")));
        REQUIRE(eval.status == 200);
        profile_before = api.handle(make("GET", "/assessments/" + id + "/profile")).body;
        record_before = api.handle(make("GET", "/assessments/" + id)).body;
        CHECK(profile_before == eval.body);
    }
    AssessmentStore store(dir.path());
    Api api(load({testing::fixture_path("bundles/small")}), store);
    CHECK(api.handle(make("GET", "/assessments/" + id + "/profile")).body == profile_before);
    CHECK(api.handle(make("GET", "/assessments/" + id)).body == record_before);
}

TEST_CASE("over a real socket, concurrent submits against one revision give one 200 and one 409")
{
    testing::TempDir dir;
    AssessmentStore store(dir.path());
    Api api(load({testing::fixture_path("bundles/small")}), store);
    std::ostringstream log;
    HttpServer server(api, &log);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread loop([&] { server.listen(); });

    httplib::Client client("127.0.0.1", port);
    auto created = client.Post("/assessments", R"({"use_case_text":"race"})", "application/json");
    REQUIRE(created);
    REQUIRE(created->status == 201);
    const std::string id = body_of(Response{201, "", {}, created->body})["id"];

    for (int round = 0; round < 5; ++round) {
        const std::string rev = std::to_string(round + 1);
        std::vector<int> statuses(2, 0);
        std::vector<std::thread> racers;
        for (int i = 0; i < 2; ++i)
            racers.emplace_back([&, i] {
                httplib::Client c("127.0.0.1", port);
                httplib::Headers h{{"If-Match", "\"" + rev + "\""}};
                auto r = c.Post(("/assessments/" + id + "/answers").c_str(), h,
                                i == 0 ? R"({"answers":{"notes":"first"}})" : R"({"answers":{"notes":"second"}})",
                                "application/json");
                statuses[i] = r ? r->status : -1;
            });
        for (auto& t : racers)
            t.join();
        std::sort(statuses.begin(), statuses.end());
        CHECK(statuses == std::vector<int>{200, 409});
    }

    auto got = client.Get(("/assessments/" + id).c_str());
    REQUIRE(got);
    CHECK(got->get_header_value("ETag") == "\"6\"");
    auto health = client.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    server.stop();
    loop.join();

    std::istringstream lines(log.str());
    std::string first;
    std::getline(lines, first);
    auto entry = parse_json(first, "log line");
    CHECK(entry["method"] == "POST");
    CHECK(entry["path"] == "/assessments");
    CHECK(entry["status"] == 201);
    CHECK(entry.contains("duration_ms"));
}
