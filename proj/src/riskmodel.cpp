#include "ran/riskmodel.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace ran {

namespace {

bool is_id_char(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

bool is_id_start(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

std::string at(const SourceLocation& loc)
{
    if (loc.source.empty())
        return "<memory>";
    return loc.source + ":" + std::to_string(loc.line);
}

bool is_absolute_url(std::string_view s)
{
    auto colon = s.find("://");
    if (colon == std::string_view::npos || colon == 0)
        return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])))
        return false;
    for (std::size_t i = 1; i < colon; ++i) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (!std::isalnum(c) && c != '+' && c != '-' && c != '.')
            return false;
    }
    return s.size() > colon + 3;
}

} // namespace

bool is_kebab_token(std::string_view text)
{
    if (text.empty() || !is_id_start(text.front()))
        return false;
    for (char c : text)
        if (!is_id_char(c))
            return false;
    return true;
}

bool RiskId::well_formed(std::string_view text)
{
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
        return is_kebab_token(text);
    return is_kebab_token(text.substr(0, colon)) && is_kebab_token(text.substr(colon + 1));
}

std::string_view RiskId::prefix() const
{
    auto colon = value_.find(':');
    if (colon == std::string::npos)
        return {};
    return std::string_view(value_).substr(0, colon);
}

std::string_view to_string(RiskCategory c)
{
    switch (c) {
    case RiskCategory::training_data: return "training-data";
    case RiskCategory::inference: return "inference";
    case RiskCategory::output: return "output";
    case RiskCategory::non_technical: return "non-technical";
    case RiskCategory::agentic: return "agentic";
    }
    return "";
}

std::optional<RiskCategory> parse_category(std::string_view text)
{
    for (auto c : all_categories)
        if (to_string(c) == text)
            return c;
    return std::nullopt;
}

std::string_view to_string(Descriptor d)
{
    switch (d) {
    case Descriptor::traditional: return "traditional risk of AI";
    case Descriptor::amplified_by_generative: return "amplified by generative AI";
    case Descriptor::specific_to_generative: return "specific to generative AI";
    case Descriptor::amplified_by_agentic: return "amplified by agentic AI";
    case Descriptor::specific_to_agentic: return "specific to agentic AI";
    }
    return "";
}

std::optional<Descriptor> parse_descriptor(std::string_view text)
{
    for (auto d : all_descriptors)
        if (to_string(d) == text)
            return d;
    return std::nullopt;
}

std::string_view to_string(MappingPredicate p)
{
    switch (p) {
    case MappingPredicate::exact: return "exact";
    case MappingPredicate::close: return "close";
    case MappingPredicate::broad: return "broad";
    case MappingPredicate::narrow: return "narrow";
    case MappingPredicate::related: return "related";
    }
    return "";
}

std::string_view to_skos(MappingPredicate p)
{
    switch (p) {
    case MappingPredicate::exact: return "skos:exactMatch";
    case MappingPredicate::close: return "skos:closeMatch";
    case MappingPredicate::broad: return "skos:broadMatch";
    case MappingPredicate::narrow: return "skos:narrowMatch";
    case MappingPredicate::related: return "skos:relatedMatch";
    }
    return "";
}

std::optional<MappingPredicate> parse_predicate(std::string_view text)
{
    for (auto p : all_predicates)
        if (to_skos(p) == text || to_string(p) == text)
            return p;
    return std::nullopt;
}

std::vector<Diagnostic> validate_knowledge_base(const KnowledgeBase& kb)
{
    std::vector<Diagnostic> out;
    auto error = [&](const Origin& o, std::string msg) { out.push_back(make_error(o.at, std::move(msg))); };

    std::map<std::string, const Taxonomy*> taxonomies;
    for (const auto& t : kb.taxonomies) {
        if (t.id.empty()) {
            error(t.origin, "taxonomy id is empty");
            continue;
        }
        auto [it, inserted] = taxonomies.emplace(t.id, &t);
        if (!inserted) {
            error(t.origin, "duplicate taxonomy id '" + t.id + "' (also defined at " +
                                at(it->second->origin.at) + ")");
            continue;
        }
        std::set<std::pair<std::string, RiskCategory>> seen;
        for (const auto& d : t.dimensions)
            if (!seen.emplace(d.name, d.category).second)
                error(t.origin, "duplicate dimension '" + d.name + "' (" +
                                    std::string(to_string(d.category)) + ") in taxonomy '" + t.id + "'");
    }

    std::unordered_map<RiskId, const Risk*> risks;
    std::map<std::pair<std::string, std::string>, const Risk*> tags;
    for (const auto& r : kb.risks) {
        if (!RiskId::well_formed(r.id.str()))
            error(r.origin, "malformed risk id '" + r.id.str() + "'");
        auto [it, inserted] = risks.emplace(r.id, &r);
        if (!inserted)
            error(r.origin, "duplicate risk id '" + r.id.str() + "' (also defined at " +
                                at(it->second->origin.at) + ")");
        if (!is_kebab_token(r.tag)) {
            error(r.origin, "malformed tag '" + r.tag + "' on risk '" + r.id.str() + "'");
        } else if (inserted) {
            auto [tit, fresh] = tags.emplace(std::pair{r.taxonomy_id, r.tag}, &r);
            if (!fresh)
                error(r.origin, "duplicate tag '" + r.tag + "' in taxonomy '" + r.taxonomy_id +
                                    "' (also used by '" + tit->second->id.str() + "')");
        }
        if (r.name.empty())
            error(r.origin, "risk '" + r.id.str() + "' has an empty name");
        if (r.description.empty())
            error(r.origin, "risk '" + r.id.str() + "' has an empty description");
        if (r.uri && !is_absolute_url(*r.uri))
            error(r.origin, "uri of risk '" + r.id.str() + "' is not an absolute URL");

        if (r.taxonomy_id.empty()) {
            error(r.origin, "risk '" + r.id.str() + "' names no taxonomy");
            continue;
        }
        auto tax = taxonomies.find(r.taxonomy_id);
        if (tax == taxonomies.end()) {
            error(r.origin, "unknown taxonomy '" + r.taxonomy_id + "' on risk '" + r.id.str() + "'");
            continue;
        }
        const auto& dims = tax->second->dimensions;
        if (!dims.empty() && !r.category)
            error(r.origin, "risk '" + r.id.str() + "' is missing a category");
        if (r.dimension) {
            bool found = false;
            for (const auto& d : dims)
                if (d.name == *r.dimension && (!r.category || d.category == *r.category))
                    found = true;
            if (!found)
                error(r.origin, "unknown dimension '" + *r.dimension + "'" +
                                    (r.category ? " for category " + std::string(to_string(*r.category)) : "") +
                                    " in taxonomy '" + r.taxonomy_id + "'");
        }
    }

    for (const auto& m : kb.mappings) {
        bool subject_ok = RiskId::well_formed(m.subject_id.str());
        bool object_ok = RiskId::well_formed(m.object_id.str());
        if (!subject_ok)
            error(m.origin, "malformed mapping subject '" + m.subject_id.str() + "'");
        if (!object_ok)
            error(m.origin, "malformed mapping object '" + m.object_id.str() + "'");
        if (m.subject_id == m.object_id)
            error(m.origin, "mapping subject and object are identical ('" + m.subject_id.str() + "')");
        if (m.confidence && !(std::isfinite(*m.confidence) && *m.confidence >= 0.0 && *m.confidence <= 1.0))
            error(m.origin, "confidence out of range [0,1]");
        if (subject_ok && !risks.count(m.subject_id))
            error(m.origin, "dangling mapping subject '" + m.subject_id.str() + "'");
        if (object_ok && !risks.count(m.object_id))
            error(m.origin, "dangling mapping object '" + m.object_id.str() + "'");
    }

    auto check_links = [&](const auto& items, const std::string& what, bool require_links) {
        std::map<std::string, SourceLocation> ids;
        for (const auto& item : items) {
            if (item.id.empty())
                error(item.origin, what + " id is empty");
            else if (auto [it, fresh] = ids.emplace(item.id, item.origin.at); !fresh)
                error(item.origin, "duplicate " + what + " id '" + item.id + "' (also defined at " +
                                       at(it->second) + ")");
            if (require_links && item.risk_ids.empty())
                error(item.origin, what + " '" + item.id + "' lists no risk_ids");
            for (const auto& rid : item.risk_ids)
                if (!risks.count(rid))
                    error(item.origin, "dangling " + what + " risk '" + rid.str() + "' on '" + item.id + "'");
        }
    };
    check_links(kb.actions, "action", true);
    check_links(kb.detectors, "detector", false);
    check_links(kb.benchmarks, "benchmark", false);

    sort_diagnostics(out);
    return out;
}

} // namespace ran
