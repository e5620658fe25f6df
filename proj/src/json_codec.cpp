#include "ran/json_codec.hpp"

namespace ran {

namespace {

template <class T>
void put_opt(Json& j, const char* key, const std::optional<T>& v)
{
    if (v)
        j[key] = *v;
}

Json id_list(const std::vector<RiskId>& ids)
{
    Json arr = Json::array();
    for (const auto& id : ids)
        arr.push_back(id.str());
    return arr;
}

std::string req_string(const Json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw InvalidInput("invalid_json", std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

std::optional<std::string> opt_string(const Json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null())
        return std::nullopt;
    if (!it->is_string())
        throw InvalidInput("invalid_json", std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

template <class T>
Json linked_list(const std::vector<Linked<T>>& items)
{
    Json arr = Json::array();
    for (const auto& l : items) {
        Json j = to_json(l.item);
        if (l.via)
            j["via"] = l.via->str();
        arr.push_back(std::move(j));
    }
    return arr;
}

} // namespace

Json to_json(const Risk& r)
{
    Json j;
    j["id"] = r.id.str();
    j["tag"] = r.tag;
    j["name"] = r.name;
    j["description"] = r.description;
    j["concern"] = r.concern;
    if (r.category)
        j["category"] = std::string(to_string(*r.category));
    if (r.descriptor)
        j["descriptor"] = std::string(to_string(*r.descriptor));
    put_opt(j, "dimension", r.dimension);
    j["taxonomy"] = r.taxonomy_id;
    put_opt(j, "uri", r.uri);
    put_opt(j, "provenance", r.provenance);
    return j;
}

Json to_json(const Taxonomy& t)
{
    Json j;
    j["id"] = t.id;
    j["name"] = t.name;
    j["version"] = t.version;
    put_opt(j, "source_url", t.source_url);
    Json dims = Json::array();
    for (const auto& d : t.dimensions)
        dims.push_back(Json{{"name", d.name}, {"category", std::string(to_string(d.category))}});
    j["dimensions"] = std::move(dims);
    return j;
}

Json to_json(const Mapping& m)
{
    Json j;
    j["subject_id"] = m.subject_id.str();
    put_opt(j, "subject_label", m.subject_label);
    j["predicate"] = std::string(to_skos(m.predicate));
    j["object_id"] = m.object_id.str();
    put_opt(j, "object_label", m.object_label);
    put_opt(j, "justification", m.justification);
    put_opt(j, "confidence", m.confidence);
    j["source"] = m.source;
    if (m.origin.at.line > 0)
        j["line"] = m.origin.at.line;
    return j;
}

Json to_json(const MitigationAction& a)
{
    Json j;
    j["id"] = a.id;
    j["name"] = a.name;
    j["description"] = a.description;
    j["source"] = a.source;
    j["risk_ids"] = id_list(a.risk_ids);
    return j;
}

Json to_json(const Detector& d)
{
    Json j;
    j["id"] = d.id;
    j["name"] = d.name;
    j["detector_dimension"] = d.detector_dimension;
    j["risk_ids"] = id_list(d.risk_ids);
    return j;
}

Json to_json(const BenchmarkLink& b)
{
    Json j;
    j["id"] = b.id;
    j["name"] = b.name;
    j["description"] = b.description;
    put_opt(j, "url", b.url);
    j["risk_ids"] = id_list(b.risk_ids);
    return j;
}

Json to_json(const RelatedRisk& r)
{
    Json j;
    j["id"] = r.risk.id.str();
    j["name"] = r.risk.name;
    j["taxonomy"] = r.risk.taxonomy_id;
    j["predicate"] = std::string(to_string(r.predicate));
    j["strength"] = r.strength;
    j["confidence"] = r.confidence;
    j["hops"] = r.path.size();
    Json path = Json::array();
    for (const auto& h : r.path) {
        Json step = to_json(h.mapping);
        step["reversed"] = h.reversed;
        path.push_back(std::move(step));
    }
    j["path"] = std::move(path);
    return j;
}

Json to_json(const Mitigations& m)
{
    Json j;
    j["detectors"] = linked_list(m.detectors);
    j["actions"] = linked_list(m.actions);
    return j;
}

Json to_json(const std::vector<Linked<BenchmarkLink>>& evidence)
{
    return linked_list(evidence);
}

Json to_json(const Diagnostic& d)
{
    Json j;
    j["severity"] = to_string(d.severity);
    j["source"] = d.where.source;
    j["line"] = d.where.line;
    j["message"] = d.message;
    return j;
}

Risk risk_from_json(const Json& j)
{
    if (!j.is_object())
        throw InvalidInput("invalid_json", "risk must be an object");
    Risk r;
    r.id = RiskId(req_string(j, "id"));
    r.tag = req_string(j, "tag");
    r.name = req_string(j, "name");
    r.description = req_string(j, "description");
    r.concern = opt_string(j, "concern").value_or("");
    if (auto c = opt_string(j, "category")) {
        r.category = parse_category(*c);
        if (!r.category)
            throw InvalidInput("invalid_json", "unknown category '" + *c + "'");
    }
    if (auto d = opt_string(j, "descriptor")) {
        r.descriptor = parse_descriptor(*d);
        if (!r.descriptor)
            throw InvalidInput("invalid_json", "unknown descriptor '" + *d + "'");
    }
    r.dimension = opt_string(j, "dimension");
    r.taxonomy_id = req_string(j, "taxonomy");
    r.uri = opt_string(j, "uri");
    r.provenance = opt_string(j, "provenance");
    return r;
}

Taxonomy taxonomy_from_json(const Json& j)
{
    if (!j.is_object())
        throw InvalidInput("invalid_json", "taxonomy must be an object");
    Taxonomy t;
    t.id = req_string(j, "id");
    t.name = req_string(j, "name");
    t.version = opt_string(j, "version").value_or("");
    t.source_url = opt_string(j, "source_url");
    if (auto it = j.find("dimensions"); it != j.end() && it->is_array()) {
        for (const auto& d : *it) {
            auto cat_text = req_string(d, "category");
            auto cat = parse_category(cat_text);
            if (!cat)
                throw InvalidInput("invalid_json", "unknown category '" + cat_text + "'");
            t.dimensions.push_back({req_string(d, "name"), *cat});
        }
    }
    return t;
}

std::string dump(const Json& j)
{
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

} // namespace ran
