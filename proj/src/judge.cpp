#include <cstdlib>
#include <limits>

#include <httplib.h>

#include "ran/json_codec.hpp"
#include "ran/rank.hpp"

namespace ran {

JudgeConfig judge_config_from_env()
{
    JudgeConfig c;
    if (const char* url = std::getenv("RAN_JUDGE_URL"))
        c.url = url;
    if (const char* token = std::getenv("RAN_JUDGE_TOKEN"))
        c.token = token;
    return c;
}

std::string judge_request_json(const JudgeRequest& r)
{
    Json candidates = Json::array();
    for (const auto& c : r.candidates)
        candidates.push_back(
            {{"id", c.id}, {"name", c.name}, {"description", c.description}, {"concern", c.concern}});
    Json j = {{"instructions", r.instructions}, {"use_case", r.use_case}, {"candidates", std::move(candidates)}};
    return dump(j);
}

JudgeResponse parse_judge_response(std::string_view body)
{
    Json j = Json::parse(body.begin(), body.end(), nullptr, false);
    if (j.is_discarded())
        throw InvalidInput("invalid_json", "judge response is not valid JSON");
    if (!j.is_object() || !j.contains("scores") || !j["scores"].is_array())
        throw InvalidInput("invalid_json", "judge response lacks a 'scores' array");
    JudgeResponse out;
    for (const auto& s : j["scores"]) {
        if (!s.is_object() || !s.contains("id") || !s["id"].is_string())
            throw InvalidInput("invalid_json", "judge score entry lacks a string 'id'");
        JudgeScore score;
        score.id = s["id"].get<std::string>();
        if (s.contains("score") && s["score"].is_number())
            score.score = s["score"].get<double>();
        else
            score.score = std::numeric_limits<double>::quiet_NaN();
        if (s.contains("rationale") && s["rationale"].is_string())
            score.rationale = s["rationale"].get<std::string>();
        out.scores.push_back(std::move(score));
    }
    return out;
}

HttpJudge::HttpJudge(JudgeConfig config) : config_(std::move(config)) {}

JudgeResponse HttpJudge::score(const JudgeRequest& request)
{
    const std::string& url = config_.url;
    if (url.rfind("http://", 0) != 0)
        throw Error("invalid_argument", "judge url must start with http:// (got '" + url + "')");
    auto path_start = url.find('/', 7);
    std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    const auto secs = static_cast<time_t>(config_.timeout.count());
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_write_timeout(secs, 0);

    httplib::Headers headers;
    if (!config_.token.empty())
        headers.emplace("Authorization", "Bearer " + config_.token);

    auto res = client.Post(path, headers, judge_request_json(request), "application/json");
    if (!res)
        throw Error("judge_unavailable", "judge request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error("judge_unavailable", "judge returned HTTP " + std::to_string(res->status));
    return parse_judge_response(res->body);
}

} // namespace ran
