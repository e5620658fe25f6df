#include "ran/json_codec.hpp"

namespace ran {

namespace {

Json condition_json(const Condition& c)
{
    Json arr = Json::array();
    for (const auto& a : c.atoms) {
        Json j;
        j["question"] = a.question_id;
        j["op"] = std::string(to_string(a.op));
        if (a.value)
            j["value"] = *a.value;
        arr.push_back(std::move(j));
    }
    return arr;
}

const Json& require(const Json& j, const char* key, bool (Json::*check)() const noexcept, const char* type)
{
    auto it = j.find(key);
    if (it == j.end() || !((*it).*check)())
        throw InvalidInput("invalid_json", std::string("field '") + key + "' must be " + type);
    return *it;
}

} // namespace

Json to_json(const Question& q)
{
    Json j;
    j["id"] = q.id;
    j["text"] = q.text;
    j["kind"] = std::string(to_string(q.kind));
    if (!q.options.empty()) {
        Json opts = Json::array();
        for (const auto& o : q.options)
            opts.push_back({{"value", o.value}, {"label", o.label}});
        j["options"] = std::move(opts);
    }
    if (q.visible_if)
        j["visible_if"] = condition_json(*q.visible_if);
    if (!q.tags.empty())
        j["tags"] = q.tags;
    return j;
}

Json to_json(const ApplicabilityRule& r)
{
    Json j;
    j["id"] = r.id;
    j["when"] = condition_json(r.when);
    j["effect"] = std::string(to_string(r.effect));
    if (r.risk_ids) {
        Json ids = Json::array();
        for (const auto& id : *r.risk_ids)
            ids.push_back(id.str());
        j["risk_ids"] = std::move(ids);
    }
    if (r.selector) {
        Json sel = Json::object();
        if (r.selector->category)
            sel["category"] = std::string(to_string(*r.selector->category));
        if (r.selector->dimension)
            sel["dimension"] = *r.selector->dimension;
        if (r.selector->taxonomy)
            sel["taxonomy"] = *r.selector->taxonomy;
        j["select"] = std::move(sel);
    }
    j["rationale"] = r.rationale;
    return j;
}

Json to_json(const Questionnaire& q)
{
    Json j;
    j["id"] = q.id;
    j["name"] = q.name;
    j["version"] = q.version;
    Json questions = Json::array();
    for (const auto& question : q.questions)
        questions.push_back(to_json(question));
    j["questions"] = std::move(questions);
    Json rules = Json::array();
    for (const auto& rule : q.rules)
        rules.push_back(to_json(rule));
    j["rules"] = std::move(rules);
    return j;
}

Json to_json(const TierResult& t)
{
    Json j;
    j["tier"] = std::string(to_string(t.tier));
    j["matched_rows"] = t.matched_rows;
    return j;
}

Json to_json(const RiskProfile& p)
{
    Json j;
    j["questionnaire"] = {{"id", p.questionnaire_id}, {"version", p.questionnaire_version}};
    if (!p.generated_at.empty())
        j["generated_at"] = p.generated_at;
    j["partial"] = p.partial;
    j["eu_ai_act"] = to_json(p.tier);
    j["summary"] = {{"flagged", p.count(RiskStatus::flagged)},
                    {"excluded", p.count(RiskStatus::excluded)},
                    {"undetermined", p.count(RiskStatus::undetermined)}};
    Json risks = Json::array();
    for (const auto& v : p.risks) {
        Json r;
        r["id"] = v.risk_id.str();
        r["status"] = std::string(to_string(v.status));
        if (v.conflict)
            r["conflict"] = true;
        Json hits = Json::array();
        for (const auto& h : v.hits)
            hits.push_back({{"rule", h.rule_id}, {"effect", std::string(to_string(h.effect))},
                            {"rationale", h.rationale}});
        r["hits"] = std::move(hits);
        risks.push_back(std::move(r));
    }
    j["risks"] = std::move(risks);
    j["conflicts"] = p.conflicts;
    return j;
}

Json to_json(const RankedRisk& r)
{
    Json j;
    j["id"] = r.risk_id.str();
    j["score"] = r.score;
    j["method"] = std::string(to_string(r.method));
    j["rationale"] = r.rationale;
    return j;
}

RiskProfile profile_from_json(const Json& j)
{
    if (!j.is_object())
        throw InvalidInput("invalid_json", "profile must be an object");
    RiskProfile p;
    const auto& q = require(j, "questionnaire", &Json::is_object, "an object");
    p.questionnaire_id = require(q, "id", &Json::is_string, "a string").get<std::string>();
    p.questionnaire_version = require(q, "version", &Json::is_string, "a string").get<std::string>();
    if (auto it = j.find("generated_at"); it != j.end())
        p.generated_at = it->get<std::string>();
    p.partial = require(j, "partial", &Json::is_boolean, "a boolean").get<bool>();

    const auto& tier = require(j, "eu_ai_act", &Json::is_object, "an object");
    auto tier_text = require(tier, "tier", &Json::is_string, "a string").get<std::string>();
    auto parsed_tier = parse_tier(tier_text);
    if (!parsed_tier)
        throw InvalidInput("invalid_json", "unknown tier '" + tier_text + "'");
    p.tier.tier = *parsed_tier;
    p.tier.matched_rows = require(tier, "matched_rows", &Json::is_array, "an array").get<std::vector<std::string>>();

    for (const auto& r : require(j, "risks", &Json::is_array, "an array")) {
        RiskVerdict v;
        v.risk_id = RiskId(require(r, "id", &Json::is_string, "a string").get<std::string>());
        auto status = require(r, "status", &Json::is_string, "a string").get<std::string>();
        if (status == "flagged")
            v.status = RiskStatus::flagged;
        else if (status == "excluded")
            v.status = RiskStatus::excluded;
        else if (status == "undetermined")
            v.status = RiskStatus::undetermined;
        else
            throw InvalidInput("invalid_json", "unknown risk status '" + status + "'");
        v.conflict = r.value("conflict", false);
        for (const auto& h : require(r, "hits", &Json::is_array, "an array")) {
            RuleHit hit;
            hit.rule_id = require(h, "rule", &Json::is_string, "a string").get<std::string>();
            auto effect = require(h, "effect", &Json::is_string, "a string").get<std::string>();
            if (effect != "flag" && effect != "exclude")
                throw InvalidInput("invalid_json", "unknown rule effect '" + effect + "'");
            hit.effect = effect == "flag" ? RuleEffect::flag : RuleEffect::exclude;
            hit.rationale = require(h, "rationale", &Json::is_string, "a string").get<std::string>();
            v.hits.push_back(std::move(hit));
        }
        p.risks.push_back(std::move(v));
    }
    p.conflicts = require(j, "conflicts", &Json::is_array, "an array").get<std::vector<std::string>>();
    return p;
}

Json answers_to_json(const AnswerSet& answers)
{
    Json j = Json::object();
    for (const auto& [qid, values] : answers) {
        if (values.size() == 1)
            j[qid] = values.front();
        else
            j[qid] = values;
    }
    return j;
}

AnswerSet answers_from_json(const Json& j)
{
    if (!j.is_object())
        throw InvalidInput("invalid_json", "answers must be an object keyed by question id");
    AnswerSet out;
    std::vector<std::string> problems;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& v = it.value();
        if (v.is_string()) {
            out[it.key()] = {v.get<std::string>()};
        } else if (v.is_boolean()) {
            out[it.key()] = {v.get<bool>() ? "yes" : "no"};
        } else if (v.is_array()) {
            std::vector<std::string> values;
            bool ok = true;
            for (const auto& e : v) {
                if (!e.is_string()) {
                    ok = false;
                    break;
                }
                values.push_back(e.get<std::string>());
            }
            if (ok)
                out[it.key()] = std::move(values);
            else
                problems.push_back(it.key() + ": array answers must contain only strings");
        } else {
            problems.push_back(it.key() + ": answer must be a string, boolean or array of strings");
        }
    }
    if (!problems.empty())
        throw InvalidInput("invalid_json", "malformed answers", problems);
    return out;
}

AnswersDocument parse_answers_document(std::string_view text)
{
    Json j = parse_json(text, "answers document");
    if (!j.is_object())
        throw InvalidInput("invalid_json", "answers document must be a JSON object");
    if (auto it = j.find("format_version"); it != j.end() && !(it->is_number_integer() && *it == 1))
        throw InvalidInput("invalid_json", "unsupported answers format_version (expected 1)");
    AnswersDocument doc;
    if (auto it = j.find("questionnaire"); it != j.end()) {
        if (!it->is_string())
            throw InvalidInput("invalid_json", "field 'questionnaire' must be a string");
        doc.questionnaire_id = it->get<std::string>();
    }
    auto it = j.find("answers");
    if (it == j.end())
        throw InvalidInput("invalid_json", "answers document lacks an 'answers' object");
    doc.answers = answers_from_json(*it);
    return doc;
}

Json to_json(const AnswersDocument& doc)
{
    Json j;
    j["format_version"] = 1;
    if (doc.questionnaire_id)
        j["questionnaire"] = *doc.questionnaire_id;
    j["answers"] = answers_to_json(doc.answers);
    return j;
}

Json parse_json(std::string_view text, std::string_view what)
{
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw InvalidInput("invalid_json", std::string(what) + " is not valid JSON", {e.what()});
    }
}

} // namespace ran
