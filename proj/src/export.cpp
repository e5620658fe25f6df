#include "ran/export.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "ran/json_codec.hpp"

namespace ran {

const std::vector<std::pair<std::string, std::string>>& ntriples_prefixes()
{
    static const std::vector<std::pair<std::string, std::string>> prefixes{
        {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
        {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
        {"skos", "http://www.w3.org/2004/02/skos/core#"},
        {"dcterms", "http://purl.org/dc/terms/"},
        {"ran", "urn:ran:vocab:"},
        {"taxonomy", "urn:ran:taxonomy:"},
        {"risk", "urn:ran:risk:"},
        {"action", "urn:ran:action:"},
        {"detector", "urn:ran:detector:"},
        {"benchmark", "urn:ran:benchmark:"},
    };
    return prefixes;
}

namespace {

const std::string& expand(std::string_view prefix)
{
    for (const auto& [p, iri] : ntriples_prefixes())
        if (p == prefix)
            return iri;
    throw std::logic_error("unknown prefix");
}

// Percent-encodes characters that may not appear inside an N-Triples IRIREF.
std::string iri_escape(std::string_view s)
{
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
            c == '`' || c == '\\' || c == 0x7f) {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xf];
        } else {
            out += static_cast<char>(c);
        }
    }
    return out;
}

std::string iri(std::string_view prefix, std::string_view local)
{
    return "<" + expand(prefix) + iri_escape(local) + ">";
}

std::string literal(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

std::string export_ntriples(const KnowledgeGraph& g)
{
    const auto& kb = g.knowledge_base();
    std::set<std::string> lines;
    auto emit = [&](const std::string& s, const std::string& p, const std::string& o) {
        lines.insert(s + " " + p + " " + o + " .");
    };
    const auto type = iri("rdf", "type");
    const auto label = iri("skos", "prefLabel");
    const auto description = iri("dcterms", "description");

    for (const auto& t : kb.taxonomies) {
        auto s = iri("taxonomy", t.id);
        emit(s, type, iri("ran", "Taxonomy"));
        emit(s, label, literal(t.name));
        emit(s, iri("ran", "version"), literal(t.version));
        if (t.source_url)
            emit(s, iri("rdfs", "seeAlso"), "<" + iri_escape(*t.source_url) + ">");
    }
    for (const auto& r : kb.risks) {
        auto s = iri("risk", r.id.str());
        emit(s, type, iri("ran", "Risk"));
        emit(s, label, literal(r.name));
        emit(s, iri("ran", "tag"), literal(r.tag));
        emit(s, description, literal(r.description));
        if (!r.concern.empty())
            emit(s, iri("ran", "concern"), literal(r.concern));
        if (r.category)
            emit(s, iri("ran", "category"), literal(to_string(*r.category)));
        if (r.descriptor)
            emit(s, iri("ran", "descriptor"), literal(to_string(*r.descriptor)));
        if (r.dimension)
            emit(s, iri("ran", "dimension"), literal(*r.dimension));
        emit(s, iri("ran", "inTaxonomy"), iri("taxonomy", r.taxonomy_id));
        if (r.uri)
            emit(s, iri("rdfs", "seeAlso"), "<" + iri_escape(*r.uri) + ">");
    }
    for (const auto& m : kb.mappings) {
        auto skos = std::string(to_skos(m.predicate)).substr(5);
        emit(iri("risk", m.subject_id.str()), iri("skos", skos), iri("risk", m.object_id.str()));
    }
    for (const auto& d : kb.detectors) {
        auto s = iri("detector", d.id);
        emit(s, type, iri("ran", "Detector"));
        emit(s, label, literal(d.name));
        if (!d.detector_dimension.empty())
            emit(s, iri("ran", "detectorDimension"), literal(d.detector_dimension));
        for (const auto& rid : d.risk_ids)
            emit(s, iri("ran", "detects"), iri("risk", rid.str()));
    }
    for (const auto& a : kb.actions) {
        auto s = iri("action", a.id);
        emit(s, type, iri("ran", "MitigationAction"));
        emit(s, label, literal(a.name));
        if (!a.description.empty())
            emit(s, description, literal(a.description));
        if (!a.source.empty())
            emit(s, iri("dcterms", "source"), literal(a.source));
        for (const auto& rid : a.risk_ids)
            emit(s, iri("ran", "mitigates"), iri("risk", rid.str()));
    }
    for (const auto& b : kb.benchmarks) {
        auto s = iri("benchmark", b.id);
        emit(s, type, iri("ran", "Benchmark"));
        emit(s, label, literal(b.name));
        if (!b.description.empty())
            emit(s, description, literal(b.description));
        if (b.url)
            emit(s, iri("rdfs", "seeAlso"), "<" + iri_escape(*b.url) + ">");
        for (const auto& rid : b.risk_ids)
            emit(s, iri("ran", "evaluates"), iri("risk", rid.str()));
    }

    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

Json strip_links(Json j)
{
    j.erase("risk_ids");
    return j;
}

std::string export_json_graph(const KnowledgeGraph& g)
{
    const auto& kb = g.knowledge_base();
    struct Node {
        std::string id;
        std::string kind;
        Json body;
    };
    std::vector<Node> nodes;
    auto add_node = [&](std::string id, std::string kind, Json body) {
        Json j;
        j["id"] = id;
        j["kind"] = kind;
        for (auto it = body.begin(); it != body.end(); ++it)
            if (it.key() != "id")
                j[it.key()] = it.value();
        nodes.push_back({std::move(id), std::move(kind), std::move(j)});
    };
    for (const auto& t : kb.taxonomies)
        add_node(t.id, "taxonomy", to_json(t));
    for (const auto& r : kb.risks)
        add_node(r.id.str(), "risk", to_json(r));
    for (const auto& a : kb.actions)
        add_node(a.id, "action", strip_links(to_json(a)));
    for (const auto& d : kb.detectors)
        add_node(d.id, "detector", strip_links(to_json(d)));
    for (const auto& b : kb.benchmarks)
        add_node(b.id, "benchmark", strip_links(to_json(b)));
    std::sort(nodes.begin(), nodes.end(),
              [](const Node& a, const Node& b) { return std::tie(a.id, a.kind) < std::tie(b.id, b.kind); });

    struct Edge {
        std::tuple<std::string, std::string, std::string, std::string, std::string, int> key;
        Json body;
    };
    std::vector<Edge> edges;
    for (const auto& m : kb.mappings) {
        Json j;
        j["kind"] = "mapping";
        j["source"] = m.subject_id.str();
        j["target"] = m.object_id.str();
        j["predicate"] = std::string(to_skos(m.predicate));
        if (m.subject_label)
            j["subject_label"] = *m.subject_label;
        if (m.object_label)
            j["object_label"] = *m.object_label;
        if (m.justification)
            j["justification"] = *m.justification;
        if (m.confidence)
            j["confidence"] = *m.confidence;
        j["set"] = m.source;
        j["line"] = m.origin.at.line;
        edges.push_back({{"mapping", m.subject_id.str(), m.object_id.str(), std::string(to_skos(m.predicate)),
                          m.source, m.origin.at.line},
                         std::move(j)});
    }
    auto add_links = [&](const auto& items, const char* kind) {
        for (const auto& item : items) {
            std::set<RiskId> targets(item.risk_ids.begin(), item.risk_ids.end());
            for (const auto& rid : targets) {
                Json j;
                j["kind"] = kind;
                j["source"] = item.id;
                j["target"] = rid.str();
                edges.push_back({{kind, item.id, rid.str(), "", "", 0}, std::move(j)});
            }
        }
    };
    add_links(kb.detectors, "detects");
    add_links(kb.actions, "mitigates");
    add_links(kb.benchmarks, "evaluates");
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.key < b.key; });

    Json doc;
    doc["nodes"] = Json::array();
    for (auto& n : nodes)
        doc["nodes"].push_back(std::move(n.body));
    doc["edges"] = Json::array();
    for (auto& e : edges)
        doc["edges"].push_back(std::move(e.body));
    return dump(doc);
}

} // namespace

std::string export_graph(const KnowledgeGraph& g, std::string_view format)
{
    if (format == "json-graph")
        return export_json_graph(g);
    if (format == "ntriples")
        return export_ntriples(g);
    throw InvalidInput("unknown_format", "unknown export format '" + std::string(format) +
                                             "' (expected json-graph or ntriples)");
}

Parsed<KnowledgeBase> import_json_graph(std::string_view text, const std::string& source_name)
{
    Parsed<KnowledgeBase> result;
    auto fail = [&](std::string msg) {
        result.diagnostics.push_back(make_error({source_name, 1}, std::move(msg)));
        return result;
    };
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        return fail(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges") || !doc["nodes"].is_array() ||
        !doc["edges"].is_array())
        return fail("expected an object with 'nodes' and 'edges' arrays");

    KnowledgeBase kb;
    try {
        std::map<std::string, std::size_t> actions, detectors, benchmarks;
        auto str = [](const Json& j, const char* key) {
            auto it = j.find(key);
            if (it == j.end() || !it->is_string())
                throw InvalidInput("invalid_json", std::string("missing string field '") + key + "'");
            return it->get<std::string>();
        };
        auto opt = [](const Json& j, const char* key) -> std::optional<std::string> {
            auto it = j.find(key);
            if (it == j.end() || !it->is_string())
                return std::nullopt;
            return it->get<std::string>();
        };
        for (const auto& n : doc["nodes"]) {
            const auto kind = str(n, "kind");
            if (kind == "taxonomy") {
                kb.taxonomies.push_back(taxonomy_from_json(n));
            } else if (kind == "risk") {
                kb.risks.push_back(risk_from_json(n));
            } else if (kind == "action") {
                actions[str(n, "id")] = kb.actions.size();
                kb.actions.push_back({str(n, "id"), str(n, "name"), opt(n, "description").value_or(""),
                                      opt(n, "source").value_or(""), {}, {}});
            } else if (kind == "detector") {
                detectors[str(n, "id")] = kb.detectors.size();
                kb.detectors.push_back(
                    {str(n, "id"), str(n, "name"), opt(n, "detector_dimension").value_or(""), {}, {}});
            } else if (kind == "benchmark") {
                benchmarks[str(n, "id")] = kb.benchmarks.size();
                kb.benchmarks.push_back(
                    {str(n, "id"), str(n, "name"), opt(n, "description").value_or(""), opt(n, "url"), {}, {}});
            } else {
                throw InvalidInput("invalid_json", "unknown node kind '" + kind + "'");
            }
        }
        for (const auto& e : doc["edges"]) {
            const auto kind = str(e, "kind");
            if (kind == "mapping") {
                Mapping m;
                m.subject_id = RiskId(str(e, "source"));
                m.object_id = RiskId(str(e, "target"));
                auto p = parse_predicate(str(e, "predicate"));
                if (!p)
                    throw InvalidInput("invalid_json", "unknown predicate '" + str(e, "predicate") + "'");
                m.predicate = *p;
                m.subject_label = opt(e, "subject_label");
                m.object_label = opt(e, "object_label");
                m.justification = opt(e, "justification");
                if (auto c = e.find("confidence"); c != e.end() && c->is_number())
                    m.confidence = c->get<double>();
                m.source = opt(e, "set").value_or("");
                m.origin.at = {m.source, e.value("line", 0)};
                kb.mappings.push_back(std::move(m));
                continue;
            }
            auto attach = [&](std::map<std::string, std::size_t>& index, auto& items) {
                auto it = index.find(str(e, "source"));
                if (it == index.end())
                    throw InvalidInput("invalid_json", "edge from unknown node '" + str(e, "source") + "'");
                items[it->second].risk_ids.emplace_back(str(e, "target"));
            };
            if (kind == "detects")
                attach(detectors, kb.detectors);
            else if (kind == "mitigates")
                attach(actions, kb.actions);
            else if (kind == "evaluates")
                attach(benchmarks, kb.benchmarks);
            else
                throw InvalidInput("invalid_json", "unknown edge kind '" + kind + "'");
        }
    } catch (const Error& e) {
        return fail(e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(e.what());
    }
    result.value = std::move(kb);
    return result;
}

} // namespace ran
