#pragma once

// Brute-force reference for related_risks. It shares no code with the graph module:
// predicates are plain strings and the composition and inverse tables are spelled out here.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ran/riskmodel.hpp"

namespace oracle {

struct Edge {
    std::string subject;
    std::string predicate; // exact | close | broad | narrow | related
    std::string object;
    std::optional<double> confidence;
    std::string source;
    int line = 0;
};

struct Found {
    std::string target;
    std::string predicate;
    int strength = 0;
    double confidence = 1.0;
    std::vector<std::size_t> mappings; // edge indices along the path
    std::vector<bool> reversed;
};

/// Best result per reachable target over every simple path of 1..hops edges, filtered and sorted.
std::vector<Found> related(const std::vector<std::string>& nodes, const std::vector<Edge>& edges,
                           const std::string& start, int hops, int min_strength);

struct Case {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    int hops = 2;
    int min_strength = 1;
};

Case random_case(std::mt19937_64& rng, int max_nodes = 8, int max_edges = 16, int max_hops = 4);

ran::KnowledgeBase to_knowledge_base(const Case& c);

/// One line per disagreement between the engine and the oracle, over every start node.
std::vector<std::string> compare_with_engine(const Case& c);

std::string describe(const Case& c);

} // namespace oracle
