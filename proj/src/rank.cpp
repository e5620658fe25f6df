#include "ran/rank.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ran {

namespace {

bool is_alnum_ascii(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::string fixed4(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2)
            tokens.push_back(current);
        current.clear();
    };
    for (char c : text) {
        if (is_alnum_ascii(c))
            current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
        else
            flush();
    }
    flush();
    return tokens;
}

CorpusStats CorpusStats::build(const std::vector<std::string>& documents)
{
    CorpusStats s;
    s.n_ = documents.size();
    for (const auto& doc : documents) {
        auto tokens = tokenize(doc);
        std::set<std::string> unique(tokens.begin(), tokens.end());
        for (const auto& t : unique)
            ++s.df_[t];
    }
    return s;
}

std::size_t CorpusStats::document_frequency(const std::string& term) const
{
    auto it = df_.find(term);
    return it == df_.end() ? 0 : it->second;
}

double CorpusStats::idf(const std::string& term) const
{
    const double n = static_cast<double>(n_);
    const double df = static_cast<double>(document_frequency(term));
    return std::log((n + 1.0) / (df + 1.0)) + 1.0;
}

TermVector tfidf_vector(const std::vector<std::string>& tokens, const CorpusStats& stats)
{
    TermVector v;
    for (const auto& t : tokens)
        v[t] += 1.0;
    for (auto& [term, weight] : v)
        weight *= stats.idf(term);
    return v;
}

double cosine(const TermVector& a, const TermVector& b)
{
    if (a.empty() || b.empty())
        return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [t, w] : a)
        na += w * w;
    for (const auto& [t, w] : b)
        nb += w * w;
    // Merge-walk over the two sorted term maps.
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (i->first < j->first) {
            ++i;
        } else if (j->first < i->first) {
            ++j;
        } else {
            dot += i->second * j->second;
            ++i;
            ++j;
        }
    }
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::string risk_document(const Risk& r)
{
    return r.name + " " + r.description + " " + r.concern;
}

double lexical_score(std::string_view use_case, const Risk& risk, const CorpusStats& stats)
{
    return cosine(tfidf_vector(tokenize(use_case), stats), tfidf_vector(tokenize(risk_document(risk)), stats));
}

LexicalIndex::LexicalIndex(const KnowledgeGraph& g)
{
    std::vector<std::string> docs;
    docs.reserve(g.risk_count());
    for (const auto& r : g.risks())
        docs.push_back(risk_document(r));
    stats_ = CorpusStats::build(docs);
    for (std::size_t i = 0; i < docs.size(); ++i)
        vectors_.emplace(g.risks()[i].id, tfidf_vector(tokenize(docs[i]), stats_));
}

const TermVector& LexicalIndex::vector_of(const RiskId& id) const
{
    auto it = vectors_.find(id);
    if (it == vectors_.end())
        throw NotFound("risk_not_found", "no lexical vector for '" + id.str() + "'");
    return it->second;
}

std::string_view to_string(RankMethod m)
{
    switch (m) {
    case RankMethod::lexical: return "lexical";
    case RankMethod::judge: return "judge";
    case RankMethod::judge_fallback_lexical: return "judge-fallback-lexical";
    }
    return "";
}

const char* const default_judge_instructions =
    "You are assessing AI risks for a described use case. For every candidate risk, return a relevance "
    "score between 0 and 1, where 1 means the risk is highly likely to materialize or matter for this use "
    "case and 0 means it is irrelevant, together with a one-sentence rationale. Respond with JSON of the "
    "form {\"scores\": [{\"id\": ..., \"score\": ..., \"rationale\": ...}]} and use only the candidate ids given.";

namespace {

std::string lexical_rationale(const TermVector& query, const TermVector& doc, double score)
{
    std::vector<std::pair<double, std::string>> shared;
    for (const auto& [t, w] : query)
        if (auto it = doc.find(t); it != doc.end())
            shared.emplace_back(w * it->second, t);
    std::sort(shared.begin(), shared.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first)
            return a.first > b.first;
        return a.second < b.second;
    });
    std::string out = "tf-idf cosine " + fixed4(score);
    if (shared.empty())
        return out + "; no shared terms";
    out += "; shared terms:";
    for (std::size_t i = 0; i < shared.size() && i < 5; ++i)
        out += (i ? ", " : " ") + shared[i].second;
    return out;
}

void sort_ranked(std::vector<RankedRisk>& ranked)
{
    std::sort(ranked.begin(), ranked.end(), [](const RankedRisk& a, const RankedRisk& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.risk_id < b.risk_id;
    });
}

} // namespace

PrioritizeResult prioritize(const KnowledgeGraph& g, const LexicalIndex& index, std::string_view use_case,
                            const PrioritizeOptions& options)
{
    if (options.top_k < 1)
        throw InvalidInput("invalid_argument", "top_k must be at least 1");

    PrioritizeResult result;
    const auto candidates = g.list_risks(options.scope.value_or(RiskFilter{}));
    const auto query = tfidf_vector(tokenize(use_case), index.stats());

    std::vector<RankedRisk> lexical;
    lexical.reserve(candidates.size());
    for (const auto& r : candidates) {
        const auto& doc = index.vector_of(r.id);
        const double s = cosine(query, doc);
        lexical.push_back({r.id, s, RankMethod::lexical, lexical_rationale(query, doc, s)});
    }

    if (!options.judge) {
        result.ranked = std::move(lexical);
    } else {
        std::map<std::string, JudgeScore> judged;
        bool failed = false;
        for (std::size_t start = 0; start < candidates.size() && !failed; start += judge_chunk_size) {
            JudgeRequest req;
            req.use_case = std::string(use_case);
            req.instructions = options.instructions;
            std::set<std::string> asked;
            for (std::size_t i = start; i < std::min(candidates.size(), start + judge_chunk_size); ++i) {
                const auto& r = candidates[i];
                req.candidates.push_back({r.id.str(), r.name, r.description, r.concern});
                asked.insert(r.id.str());
            }
            try {
                auto resp = options.judge->score(req);
                for (auto& s : resp.scores) {
                    if (!asked.count(s.id)) {
                        result.warnings.push_back("judge returned unknown id '" + s.id + "'; dropped");
                        continue;
                    }
                    if (!std::isfinite(s.score)) {
                        result.warnings.push_back("judge returned a non-numeric score for '" + s.id + "'; ignored");
                        continue;
                    }
                    if (s.score < 0.0 || s.score > 1.0) {
                        result.warnings.push_back("judge score " + fixed4(s.score) + " for '" + s.id +
                                                  "' clamped to [0,1]");
                        s.score = std::clamp(s.score, 0.0, 1.0);
                    }
                    if (judged.count(s.id)) {
                        result.warnings.push_back("judge scored '" + s.id + "' twice; first score kept");
                        continue;
                    }
                    judged.emplace(s.id, std::move(s));
                }
            } catch (const std::exception& e) {
                result.warnings.push_back(std::string("judge request failed (") + e.what() +
                                          "); using lexical scores for all candidates");
                failed = true;
            }
        }

        result.ranked = std::move(lexical);
        if (failed) {
            for (auto& r : result.ranked)
                r.method = RankMethod::judge_fallback_lexical;
        } else {
            std::size_t missing = 0;
            for (auto& r : result.ranked) {
                auto it = judged.find(r.risk_id.str());
                if (it == judged.end()) {
                    r.method = RankMethod::judge_fallback_lexical;
                    ++missing;
                    continue;
                }
                r.score = it->second.score;
                r.method = RankMethod::judge;
                r.rationale = it->second.rationale;
            }
            if (missing)
                result.warnings.push_back("judge omitted " + std::to_string(missing) +
                                          " candidate(s); lexical scores used for those");
        }
    }

    sort_ranked(result.ranked);
    if (result.ranked.size() > options.top_k)
        result.ranked.resize(options.top_k);
    return result;
}

PrioritizeResult tag_resource(const KnowledgeGraph& g, const LexicalIndex& index, std::string_view text,
                              std::size_t top_k, Judge* judge)
{
    PrioritizeOptions options;
    options.top_k = top_k;
    options.judge = judge;
    return prioritize(g, index, text, options);
}

} // namespace ran
