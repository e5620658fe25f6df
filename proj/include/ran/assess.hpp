#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ran/diagnostic.hpp"
#include "ran/graph.hpp"
#include "ran/tier.hpp"

namespace ran {

enum class QuestionKind { boolean, single_choice, multi_choice, free_text };

std::string_view to_string(QuestionKind k);
std::optional<QuestionKind> parse_question_kind(std::string_view text);

enum class ConditionOp { equals, not_equals, includes, answered };

std::string_view to_string(ConditionOp op);
std::optional<ConditionOp> parse_condition_op(std::string_view text);

struct ConditionAtom {
    std::string question_id;
    ConditionOp op = ConditionOp::answered;
    std::optional<std::string> value;
    bool operator==(const ConditionAtom&) const = default;
};

/// Conjunction of atoms. An empty condition always holds.
struct Condition {
    std::vector<ConditionAtom> atoms;
    bool operator==(const Condition&) const = default;
};

struct Option {
    std::string value;
    std::string label;
    bool operator==(const Option&) const = default;
};

struct Question {
    std::string id;
    std::string text;
    QuestionKind kind = QuestionKind::free_text;
    std::vector<Option> options;
    std::optional<Condition> visible_if;
    std::vector<std::string> tags;
    bool operator==(const Question&) const = default;
};

enum class RuleEffect { flag, exclude };

std::string_view to_string(RuleEffect e);

struct RiskSelector {
    std::optional<RiskCategory> category;
    std::optional<std::string> dimension;
    std::optional<std::string> taxonomy;
    bool operator==(const RiskSelector&) const = default;
};

struct ApplicabilityRule {
    std::string id;
    Condition when;
    RuleEffect effect = RuleEffect::flag;
    // Exactly one of these is set.
    std::optional<std::vector<RiskId>> risk_ids;
    std::optional<RiskSelector> selector;
    /// May reference {risk_id}, {risk_name} and {rule_id}.
    std::string rationale;
    bool operator==(const ApplicabilityRule&) const = default;
};

struct Questionnaire {
    std::string id;
    std::string name;
    std::string version;
    std::vector<Question> questions;
    std::vector<ApplicabilityRule> rules;
    bool operator==(const Questionnaire&) const = default;

    const Question* find(std::string_view question_id) const;
};

/// question id -> value(s). Boolean, single-choice and free-text questions hold exactly one value;
/// boolean values are "yes" or "no".
using AnswerSet = std::map<std::string, std::vector<std::string>>;

Parsed<Questionnaire> load_questionnaire(std::string_view text, const std::string& source_name = "questionnaire");

/// Structural checks on a rule set against a graph (targets must resolve).
std::vector<Diagnostic> check_rule_targets(const Questionnaire& q, const KnowledgeGraph& g,
                                           const std::string& source_name = "questionnaire");

bool condition_holds(const Condition& c, const AnswerSet& answers);

/// Visible, unanswered questions in declaration order. Empty means the assessment is complete.
std::vector<Question> next_questions(const Questionnaire& q, const AnswerSet& answers);

struct AnswerIssue {
    std::string question_id;
    std::string message;
    bool operator==(const AnswerIssue&) const = default;
};

/// Type and visibility checks. Visibility is judged against the whole answer set.
std::vector<AnswerIssue> check_answers(const Questionnaire& q, const AnswerSet& answers);

enum class RiskStatus { flagged, excluded, undetermined };

std::string_view to_string(RiskStatus s);

struct RuleHit {
    std::string rule_id;
    RuleEffect effect = RuleEffect::flag;
    std::string rationale;
    bool operator==(const RuleHit&) const = default;
};

struct RiskVerdict {
    RiskId risk_id;
    RiskStatus status = RiskStatus::undetermined;
    std::vector<RuleHit> hits;
    bool conflict = false;
    bool operator==(const RiskVerdict&) const = default;
};

struct RiskProfile {
    std::string questionnaire_id;
    std::string questionnaire_version;
    std::string generated_at; // empty when not stamped
    bool partial = false;
    TierResult tier;
    std::vector<RiskVerdict> risks; // sorted by risk id, one per graph risk
    std::vector<std::string> conflicts; // human-readable notes
    bool operator==(const RiskProfile&) const = default;

    const RiskVerdict* find(const RiskId& id) const;
    std::size_t count(RiskStatus s) const;
};

/// Pure function of its inputs. Throws NotFound ("rule_target_not_found") if a rule names an unknown risk.
RiskProfile evaluate_applicability(const Questionnaire& q, const AnswerSet& answers, const KnowledgeGraph& g,
                                   TierResult tier = {}, std::string generated_at = {});

} // namespace ran
