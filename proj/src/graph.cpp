#include "ran/graph.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

namespace ran {

int strength(MappingPredicate p)
{
    switch (p) {
    case MappingPredicate::exact: return 4;
    case MappingPredicate::close: return 3;
    case MappingPredicate::broad:
    case MappingPredicate::narrow: return 2;
    case MappingPredicate::related: return 1;
    }
    return 0;
}

MappingPredicate invert_predicate(MappingPredicate p)
{
    switch (p) {
    case MappingPredicate::broad: return MappingPredicate::narrow;
    case MappingPredicate::narrow: return MappingPredicate::broad;
    default: return p;
    }
}

std::optional<MappingPredicate> compose_predicates(MappingPredicate first, MappingPredicate second)
{
    using P = MappingPredicate;
    if (first == P::exact)
        return second;
    if (second == P::exact)
        return first;
    if (first == P::related || second == P::related)
        return std::nullopt;
    if (first == P::close || second == P::close)
        return P::related;
    if (first == second)
        return first; // broad∘broad, narrow∘narrow
    return std::nullopt; // broad∘narrow, narrow∘broad
}

namespace {

std::string lowercase(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Ordering key for picking one path among equally strong, equally long candidates.
using PathKey = std::vector<std::tuple<std::string, int, std::size_t>>;

PathKey path_key(const std::vector<Hop>& path)
{
    PathKey key;
    key.reserve(path.size());
    for (const auto& h : path)
        key.emplace_back(h.mapping.source, h.mapping.origin.at.line, h.mapping_index);
    return key;
}

bool better(const RelatedRisk& a, const RelatedRisk& b)
{
    if (a.strength != b.strength)
        return a.strength > b.strength;
    if (a.path.size() != b.path.size())
        return a.path.size() < b.path.size();
    return path_key(a.path) < path_key(b.path);
}

template <class T>
void sort_by_id(std::vector<Linked<T>>& items)
{
    std::sort(items.begin(), items.end(), [](const Linked<T>& a, const Linked<T>& b) { return a.item.id < b.item.id; });
}

} // namespace

KnowledgeGraph KnowledgeGraph::build(KnowledgeBase kb)
{
    auto diags = validate_knowledge_base(kb);
    if (has_errors(diags)) {
        std::vector<std::string> details;
        for (const auto& d : diags)
            if (d.severity == Severity::error)
                details.push_back(format_diagnostic(d));
        throw InvalidInput("invalid_knowledge_base",
                           "knowledge base has " + std::to_string(details.size()) + " validation error(s)",
                           std::move(details));
    }

    KnowledgeGraph g;
    g.kb_ = std::move(kb);
    const auto n = g.kb_.risks.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = g.kb_.risks[i];
        g.by_id_.emplace(r.id, i);
        g.by_tag_[r.tag].push_back(i);
        g.by_taxonomy_[r.taxonomy_id].push_back(i);
        if (r.category)
            g.by_category_[*r.category].push_back(i);
        if (r.dimension)
            g.by_dimension_[*r.dimension].push_back(i);
        if (r.descriptor)
            g.by_descriptor_[*r.descriptor].push_back(i);
    }

    g.adjacency_.resize(n);
    for (std::size_t m = 0; m < g.kb_.mappings.size(); ++m) {
        const auto& mapping = g.kb_.mappings[m];
        auto s = g.by_id_.at(mapping.subject_id);
        auto o = g.by_id_.at(mapping.object_id);
        g.adjacency_[s].push_back({o, mapping.predicate, m, false});
        g.adjacency_[o].push_back({s, invert_predicate(mapping.predicate), m, true});
    }

    auto link = [&](const auto& items, std::vector<std::vector<std::size_t>>& out) {
        out.resize(n);
        for (std::size_t i = 0; i < items.size(); ++i) {
            std::set<std::size_t> targets;
            for (const auto& rid : items[i].risk_ids)
                targets.insert(g.by_id_.at(rid));
            for (auto t : targets)
                out[t].push_back(i);
        }
    };
    link(g.kb_.detectors, g.detectors_of_);
    link(g.kb_.actions, g.actions_of_);
    link(g.kb_.benchmarks, g.benchmarks_of_);
    return g;
}

const Risk* KnowledgeGraph::find(const RiskId& id) const
{
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &kb_.risks[it->second];
}

std::size_t KnowledgeGraph::index_of(const RiskId& id) const
{
    auto it = by_id_.find(id);
    if (it == by_id_.end())
        throw NotFound("risk_not_found", "no risk with id '" + id.str() + "'");
    return it->second;
}

const Risk& KnowledgeGraph::get_risk(std::string_view key) const
{
    if (auto it = by_id_.find(RiskId(std::string(key))); it != by_id_.end())
        return kb_.risks[it->second];
    auto tag = by_tag_.find(key);
    if (tag == by_tag_.end())
        throw NotFound("risk_not_found", "no risk with id or tag '" + std::string(key) + "'");
    if (tag->second.size() > 1) {
        std::vector<std::string> candidates;
        for (auto i : tag->second)
            candidates.push_back(kb_.risks[i].id.str());
        std::sort(candidates.begin(), candidates.end());
        std::string joined;
        for (const auto& c : candidates)
            joined += (joined.empty() ? "" : ", ") + c;
        throw AmbiguousTag("ambiguous_tag", "tag '" + std::string(key) + "' matches several risks: " + joined,
                           std::move(candidates));
    }
    return kb_.risks[tag->second.front()];
}

std::vector<Risk> KnowledgeGraph::list_risks(const RiskFilter& filter) const
{
    static const std::vector<std::size_t> none;
    // Start from the narrowest applicable index, then check the remaining fields.
    const std::vector<std::size_t>* base = nullptr;
    auto narrow = [&](const std::vector<std::size_t>& candidates) {
        if (!base || candidates.size() < base->size())
            base = &candidates;
    };
    if (filter.taxonomy) {
        auto it = by_taxonomy_.find(*filter.taxonomy);
        narrow(it == by_taxonomy_.end() ? none : it->second);
    }
    if (filter.category) {
        auto it = by_category_.find(*filter.category);
        narrow(it == by_category_.end() ? none : it->second);
    }
    if (filter.dimension) {
        auto it = by_dimension_.find(*filter.dimension);
        narrow(it == by_dimension_.end() ? none : it->second);
    }
    if (filter.descriptor) {
        auto it = by_descriptor_.find(*filter.descriptor);
        narrow(it == by_descriptor_.end() ? none : it->second);
    }

    const std::string needle = filter.text ? lowercase(*filter.text) : std::string{};
    auto matches = [&](const Risk& r) {
        if (filter.taxonomy && r.taxonomy_id != *filter.taxonomy)
            return false;
        if (filter.category && r.category != filter.category)
            return false;
        if (filter.dimension && r.dimension != filter.dimension)
            return false;
        if (filter.descriptor && r.descriptor != filter.descriptor)
            return false;
        if (filter.text && lowercase(r.name).find(needle) == std::string::npos &&
            lowercase(r.description).find(needle) == std::string::npos)
            return false;
        return true;
    };

    std::vector<Risk> out;
    if (base) {
        for (auto i : *base)
            if (matches(kb_.risks[i]))
                out.push_back(kb_.risks[i]);
    } else {
        for (const auto& r : kb_.risks)
            if (matches(r))
                out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const Risk& a, const Risk& b) { return a.id < b.id; });
    return out;
}

std::vector<RelatedRisk> KnowledgeGraph::related_risks(const RiskId& id, int max_hops, int min_strength) const
{
    const auto start = index_of(id);
    if (max_hops < 1)
        throw InvalidInput("invalid_argument", "max_hops must be at least 1");

    std::vector<std::optional<RelatedRisk>> best(kb_.risks.size());
    std::vector<bool> visited(kb_.risks.size(), false);
    std::vector<Hop> path;
    double confidence = 1.0;

    // Depth-first over simple paths; a branch is cut as soon as its fold becomes "no inference",
    // since no extension of it can contribute.
    auto walk = [&](auto&& self, std::size_t node, std::optional<MappingPredicate> folded) -> void {
        for (const auto& e : adjacency_[node]) {
            if (visited[e.target])
                continue;
            auto next = folded ? compose_predicates(*folded, e.predicate) : std::optional{e.predicate};
            if (!next)
                continue;

            const auto& stored = kb_.mappings[e.mapping];
            Hop hop{stored, e.reversed, e.mapping};
            if (e.reversed) {
                std::swap(hop.mapping.subject_id, hop.mapping.object_id);
                std::swap(hop.mapping.subject_label, hop.mapping.object_label);
                hop.mapping.predicate = e.predicate;
            }
            const double saved = confidence;
            confidence *= stored.confidence.value_or(1.0);
            path.push_back(std::move(hop));
            visited[e.target] = true;

            RelatedRisk candidate{kb_.risks[e.target], *next, strength(*next), confidence, path};
            auto& slot = best[e.target];
            if (!slot || better(candidate, *slot))
                slot = std::move(candidate);

            if (static_cast<int>(path.size()) < max_hops)
                self(self, e.target, next);

            visited[e.target] = false;
            path.pop_back();
            confidence = saved;
        }
    };
    visited[start] = true;
    walk(walk, start, std::nullopt);

    std::vector<RelatedRisk> out;
    for (auto& b : best)
        if (b && b->strength >= min_strength)
            out.push_back(std::move(*b));
    std::sort(out.begin(), out.end(), [](const RelatedRisk& a, const RelatedRisk& b) {
        if (a.strength != b.strength)
            return a.strength > b.strength;
        return a.risk.id < b.risk.id;
    });
    return out;
}

std::vector<RiskId> KnowledgeGraph::exact_related(const RiskId& id) const
{
    std::vector<RiskId> out;
    for (const auto& r : related_risks(id, default_max_hops, strength(MappingPredicate::exact)))
        if (r.predicate == MappingPredicate::exact)
            out.push_back(r.risk.id);
    return out;
}

namespace {

template <class T>
std::vector<Linked<T>> gather(const std::vector<T>& items, const std::vector<std::vector<std::size_t>>& links,
                              std::size_t self, const std::vector<std::pair<RiskId, std::size_t>>& via)
{
    std::vector<Linked<T>> out;
    std::set<std::size_t> seen;
    for (auto i : links[self])
        if (seen.insert(i).second)
            out.push_back({items[i], std::nullopt});
    for (const auto& [rid, idx] : via)
        for (auto i : links[idx])
            if (seen.insert(i).second)
                out.push_back({items[i], rid});
    sort_by_id(out);
    return out;
}

} // namespace

Mitigations KnowledgeGraph::mitigations_for(const RiskId& id, bool include_related) const
{
    const auto self = index_of(id);
    std::vector<std::pair<RiskId, std::size_t>> via;
    if (include_related)
        for (auto& rid : exact_related(id))
            via.emplace_back(rid, by_id_.at(rid));
    return {gather(kb_.detectors, detectors_of_, self, via), gather(kb_.actions, actions_of_, self, via)};
}

std::vector<Linked<BenchmarkLink>> KnowledgeGraph::evidence_for(const RiskId& id, bool include_related) const
{
    const auto self = index_of(id);
    std::vector<std::pair<RiskId, std::size_t>> via;
    if (include_related)
        for (auto& rid : exact_related(id))
            via.emplace_back(rid, by_id_.at(rid));
    return gather(kb_.benchmarks, benchmarks_of_, self, via);
}

} // namespace ran
