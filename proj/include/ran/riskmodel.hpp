#pragma once

#include <array>
#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ran/diagnostic.hpp"

namespace ran {

/// Risk identifier: `([a-z0-9][a-z0-9-]*:)?[a-z0-9][a-z0-9-]*`.
/// Construction does not validate; validate_knowledge_base reports malformed ids.
class RiskId {
public:
    RiskId() = default;
    explicit RiskId(std::string value) : value_(std::move(value)) {}

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    /// Namespace before the colon, or empty for un-namespaced ids.
    std::string_view prefix() const;

    static bool well_formed(std::string_view text);

    auto operator<=>(const RiskId&) const = default;

private:
    std::string value_;
};

bool is_kebab_token(std::string_view text);

enum class RiskCategory { training_data, inference, output, non_technical, agentic };

inline constexpr std::array<RiskCategory, 5> all_categories{
    RiskCategory::training_data, RiskCategory::inference, RiskCategory::output,
    RiskCategory::non_technical, RiskCategory::agentic};

std::string_view to_string(RiskCategory c);
std::optional<RiskCategory> parse_category(std::string_view text);

enum class Descriptor {
    traditional,
    amplified_by_generative,
    specific_to_generative,
    amplified_by_agentic,
    specific_to_agentic,
};

inline constexpr std::array<Descriptor, 5> all_descriptors{
    Descriptor::traditional, Descriptor::amplified_by_generative,
    Descriptor::specific_to_generative, Descriptor::amplified_by_agentic,
    Descriptor::specific_to_agentic};

std::string_view to_string(Descriptor d);
std::optional<Descriptor> parse_descriptor(std::string_view text);

enum class MappingPredicate { exact, close, broad, narrow, related };

inline constexpr std::array<MappingPredicate, 5> all_predicates{
    MappingPredicate::exact, MappingPredicate::close, MappingPredicate::broad,
    MappingPredicate::narrow, MappingPredicate::related};

std::string_view to_string(MappingPredicate p);
/// "skos:exactMatch" etc.
std::string_view to_skos(MappingPredicate p);
/// Accepts both the short form ("exact") and the SKOS CURIE.
std::optional<MappingPredicate> parse_predicate(std::string_view text);

/// Where an entity was read from. Never participates in equality, so two
/// entities with identical content compare equal regardless of origin.
struct Origin {
    SourceLocation at;
    bool operator==(const Origin&) const { return true; }
};

struct Dimension {
    std::string name;
    RiskCategory category = RiskCategory::output;
    bool operator==(const Dimension&) const = default;
};

struct Taxonomy {
    std::string id;
    std::string name;
    std::string version;
    std::optional<std::string> source_url;
    std::vector<Dimension> dimensions;
    Origin origin;
    bool operator==(const Taxonomy&) const = default;
};

struct Risk {
    RiskId id;
    std::string tag;
    std::string name;
    std::string description;
    std::string concern;
    std::optional<RiskCategory> category;
    std::optional<Descriptor> descriptor;
    std::optional<std::string> dimension;
    std::string taxonomy_id;
    std::optional<std::string> uri;
    // "inferred" when a field (the dimension, for the Atlas) was assigned by the curator.
    std::optional<std::string> provenance;
    Origin origin;
    bool operator==(const Risk&) const = default;
};

struct Mapping {
    RiskId subject_id;
    MappingPredicate predicate = MappingPredicate::related;
    RiskId object_id;
    std::optional<std::string> subject_label;
    std::optional<std::string> object_label;
    std::optional<std::string> justification;
    std::optional<double> confidence;
    std::string source;
    Origin origin;
    bool operator==(const Mapping&) const = default;
};

struct MitigationAction {
    std::string id;
    std::string name;
    std::string description;
    std::string source;
    std::vector<RiskId> risk_ids;
    Origin origin;
    bool operator==(const MitigationAction&) const = default;
};

struct Detector {
    std::string id;
    std::string name;
    std::string detector_dimension;
    std::vector<RiskId> risk_ids;
    Origin origin;
    bool operator==(const Detector&) const = default;
};

struct BenchmarkLink {
    std::string id;
    std::string name;
    std::string description;
    std::optional<std::string> url;
    std::vector<RiskId> risk_ids;
    Origin origin;
    bool operator==(const BenchmarkLink&) const = default;
};

struct KnowledgeBase {
    std::vector<Taxonomy> taxonomies;
    std::vector<Risk> risks;
    std::vector<Mapping> mappings;
    std::vector<MitigationAction> actions;
    std::vector<Detector> detectors;
    std::vector<BenchmarkLink> benchmarks;
    bool operator==(const KnowledgeBase&) const = default;
};

/// All schema and referential-integrity violations, sorted by file, line, message.
/// Empty iff the knowledge base is valid.
std::vector<Diagnostic> validate_knowledge_base(const KnowledgeBase& kb);

} // namespace ran

template <>
struct std::hash<ran::RiskId> {
    std::size_t operator()(const ran::RiskId& id) const noexcept
    {
        return std::hash<std::string>{}(id.str());
    }
};
