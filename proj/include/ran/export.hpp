#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ran/diagnostic.hpp"
#include "ran/graph.hpp"

namespace ran {

/// Prefix map used for N-Triples IRIs (mirrored by prefixes.json at the repo root).
const std::vector<std::pair<std::string, std::string>>& ntriples_prefixes();

/// "json-graph" or "ntriples". Output is byte-deterministic for a given graph.
/// Throws InvalidInput ("unknown_format") for any other format name.
std::string export_graph(const KnowledgeGraph& g, std::string_view format);

/// Reads a json-graph export back into a knowledge base (not yet validated).
Parsed<KnowledgeBase> import_json_graph(std::string_view text, const std::string& source_name = "json-graph");

} // namespace ran
