#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ran/riskmodel.hpp"

namespace ran {

/// exact=4, close=3, broad=2, narrow=2, related=1.
int strength(MappingPredicate p);

/// exact, close and related are symmetric; broad and narrow are each other's inverse.
MappingPredicate invert_predicate(MappingPredicate p);

/// Predicate inferred for a two-step path "first then second"; nullopt means no inference.
///
/// Table (row = first, column = second):
///
///             exact    close    broad    narrow   related
///   exact     exact    close    broad    narrow   related
///   close     close    related  related  related  -
///   broad     broad    related  broad    -        -
///   narrow    narrow   related  -        narrow   -
///   related   related  -        -        -        -
std::optional<MappingPredicate> compose_predicates(MappingPredicate first, MappingPredicate second);

/// One traversed edge. `mapping` is oriented along the walk: for a reverse traversal the
/// endpoints are swapped and the predicate inverted, while source and origin stay those of
/// the stored mapping.
struct Hop {
    Mapping mapping;
    bool reversed = false;
    std::size_t mapping_index = 0;
};

struct RelatedRisk {
    Risk risk;
    MappingPredicate predicate = MappingPredicate::related;
    int strength = 0;
    double confidence = 1.0;
    std::vector<Hop> path;
};

struct RiskFilter {
    std::optional<std::string> taxonomy;
    std::optional<RiskCategory> category;
    std::optional<std::string> dimension;
    std::optional<Descriptor> descriptor;
    std::optional<std::string> text;
};

template <class T>
struct Linked {
    T item;
    std::optional<RiskId> via;
};

struct Mitigations {
    std::vector<Linked<Detector>> detectors;
    std::vector<Linked<MitigationAction>> actions;
};

inline constexpr int default_max_hops = 2;

/// Immutable indexed view over a validated KnowledgeBase. Safe for concurrent reads.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    /// Throws InvalidInput (code "invalid_knowledge_base") if validation reports errors.
    static KnowledgeGraph build(KnowledgeBase kb);

    const KnowledgeBase& knowledge_base() const noexcept { return kb_; }
    const std::vector<Risk>& risks() const noexcept { return kb_.risks; }
    std::size_t risk_count() const noexcept { return kb_.risks.size(); }

    const Risk* find(const RiskId& id) const;

    /// Id lookup first, then tag. Throws NotFound ("risk_not_found") or AmbiguousTag ("ambiguous_tag").
    const Risk& get_risk(std::string_view key) const;

    /// Conjunction of the set fields, sorted by id.
    std::vector<Risk> list_risks(const RiskFilter& filter) const;

    /// Best inferred relation to every risk reachable over at most `max_hops` mappings.
    /// Sorted by strength descending, then target id. Throws NotFound for unknown ids.
    std::vector<RelatedRisk> related_risks(const RiskId& id, int max_hops = default_max_hops,
                                           int min_strength = 1) const;

    Mitigations mitigations_for(const RiskId& id, bool include_related = false) const;
    std::vector<Linked<BenchmarkLink>> evidence_for(const RiskId& id, bool include_related = false) const;

private:
    struct Edge {
        std::size_t target;
        MappingPredicate predicate;
        std::size_t mapping;
        bool reversed;
    };

    std::size_t index_of(const RiskId& id) const;
    std::vector<RiskId> exact_related(const RiskId& id) const;

    KnowledgeBase kb_;
    std::unordered_map<RiskId, std::size_t> by_id_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_tag_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_taxonomy_;
    std::map<RiskCategory, std::vector<std::size_t>> by_category_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_dimension_;
    std::map<Descriptor, std::vector<std::size_t>> by_descriptor_;
    std::vector<std::vector<Edge>> adjacency_;
    std::vector<std::vector<std::size_t>> detectors_of_;
    std::vector<std::vector<std::size_t>> actions_of_;
    std::vector<std::vector<std::size_t>> benchmarks_of_;
};

inline KnowledgeGraph build_graph(KnowledgeBase kb)
{
    return KnowledgeGraph::build(std::move(kb));
}

} // namespace ran
