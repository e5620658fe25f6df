#pragma once

// JSON forms of the domain types, shared by the exporter, the HTTP service and the CLI.
// Keys are emitted in a fixed order; absent optionals are omitted.

#include <json.hpp>

#include "ran/assess.hpp"
#include "ran/diagnostic.hpp"
#include "ran/graph.hpp"
#include "ran/rank.hpp"
#include "ran/riskmodel.hpp"

namespace ran {

using Json = nlohmann::ordered_json;

Json to_json(const Risk& r);
Json to_json(const Taxonomy& t);
Json to_json(const Mapping& m);
Json to_json(const MitigationAction& a);
Json to_json(const Detector& d);
Json to_json(const BenchmarkLink& b);
Json to_json(const RelatedRisk& r);
Json to_json(const Mitigations& m);
Json to_json(const std::vector<Linked<BenchmarkLink>>& evidence);
Json to_json(const Diagnostic& d);

// Inverse of the object forms above; throw InvalidInput on shape errors.
Risk risk_from_json(const Json& j);
Taxonomy taxonomy_from_json(const Json& j);

Json to_json(const Question& q);
Json to_json(const ApplicabilityRule& r);
Json to_json(const Questionnaire& q);
Json to_json(const TierResult& t);
Json to_json(const RiskProfile& p);
Json to_json(const RankedRisk& r);
RiskProfile profile_from_json(const Json& j);

/// Single values become strings, everything else an array.
Json answers_to_json(const AnswerSet& answers);
/// Accepts strings, booleans (as "yes"/"no") and arrays of strings.
AnswerSet answers_from_json(const Json& j);

struct AnswersDocument {
    std::optional<std::string> questionnaire_id;
    AnswerSet answers;
};

/// {"format_version": 1, "questionnaire": "...", "answers": {...}}
AnswersDocument parse_answers_document(std::string_view text);
Json to_json(const AnswersDocument& doc);

/// Parses text as JSON, throwing InvalidInput ("invalid_json") with the parser's message.
Json parse_json(std::string_view text, std::string_view what = "request body");

/// Dumps compactly; Json's key order is insertion order, so output is stable.
std::string dump(const Json& j);

} // namespace ran
