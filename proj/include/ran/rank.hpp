#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ran/graph.hpp"

namespace ran {

/// Lowercases ASCII, splits on anything that is not an ASCII letter or digit, drops tokens shorter than 2.
std::vector<std::string> tokenize(std::string_view text);

/// Document frequencies over a fixed corpus.
class CorpusStats {
public:
    static CorpusStats build(const std::vector<std::string>& documents);

    std::size_t documents() const noexcept { return n_; }
    std::size_t document_frequency(const std::string& term) const;

    /// ln((N+1)/(df+1)) + 1
    double idf(const std::string& term) const;

private:
    std::size_t n_ = 0;
    std::unordered_map<std::string, std::size_t> df_;
};

/// Sparse TF-IDF vector, keyed by term (ordered so iteration is deterministic).
using TermVector = std::map<std::string, double>;

/// Raw term counts weighted by idf.
TermVector tfidf_vector(const std::vector<std::string>& tokens, const CorpusStats& stats);

/// Cosine similarity in [0,1]; 0 when either vector is empty.
double cosine(const TermVector& a, const TermVector& b);

/// The text a risk is scored on: name, description and concern.
std::string risk_document(const Risk& r);

double lexical_score(std::string_view use_case, const Risk& risk, const CorpusStats& stats);

/// Corpus statistics and per-risk vectors for one graph, computed once.
class LexicalIndex {
public:
    explicit LexicalIndex(const KnowledgeGraph& g);

    const CorpusStats& stats() const noexcept { return stats_; }
    const TermVector& vector_of(const RiskId& id) const;

private:
    CorpusStats stats_;
    std::unordered_map<RiskId, TermVector> vectors_;
};

enum class RankMethod { lexical, judge, judge_fallback_lexical };

std::string_view to_string(RankMethod m);

struct RankedRisk {
    RiskId risk_id;
    double score = 0.0;
    RankMethod method = RankMethod::lexical;
    std::string rationale;
    bool operator==(const RankedRisk&) const = default;
};

struct JudgeCandidate {
    std::string id;
    std::string name;
    std::string description;
    std::string concern;
};

struct JudgeRequest {
    std::string use_case;
    std::vector<JudgeCandidate> candidates;
    std::string instructions;
};

struct JudgeScore {
    std::string id;
    double score = 0.0;
    std::string rationale;
};

struct JudgeResponse {
    std::vector<JudgeScore> scores;
};

/// External relevance scorer. Implementations throw on transport or protocol failure.
class Judge {
public:
    virtual ~Judge() = default;
    virtual JudgeResponse score(const JudgeRequest& request) = 0;
};

struct JudgeConfig {
    std::string url;
    std::string token;
    std::chrono::seconds timeout{30};
};

/// RAN_JUDGE_URL and RAN_JUDGE_TOKEN; url is empty when unset.
JudgeConfig judge_config_from_env();

/// POSTs JudgeRequest JSON to `url` with an optional bearer token.
class HttpJudge : public Judge {
public:
    explicit HttpJudge(JudgeConfig config);
    JudgeResponse score(const JudgeRequest& request) override;

private:
    JudgeConfig config_;
};

std::string judge_request_json(const JudgeRequest& r);
/// Throws InvalidInput on malformed bodies.
JudgeResponse parse_judge_response(std::string_view body);

extern const char* const default_judge_instructions;

inline constexpr std::size_t judge_chunk_size = 25;

struct PrioritizeOptions {
    std::size_t top_k = 10;
    std::optional<RiskFilter> scope;
    Judge* judge = nullptr;
    std::string instructions = default_judge_instructions;
};

struct PrioritizeResult {
    std::vector<RankedRisk> ranked;
    std::vector<std::string> warnings;
};

/// Ranks the scoped candidates by relevance to `use_case`, sorted by (score desc, id asc).
/// Judge failures never propagate: they degrade to lexical scores with a warning.
PrioritizeResult prioritize(const KnowledgeGraph& g, const LexicalIndex& index, std::string_view use_case,
                            const PrioritizeOptions& options);

PrioritizeResult tag_resource(const KnowledgeGraph& g, const LexicalIndex& index, std::string_view text,
                              std::size_t top_k, Judge* judge = nullptr);

} // namespace ran
