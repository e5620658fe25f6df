#include "ran/assess.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "yaml_support.hpp"

namespace ran {

std::string_view to_string(QuestionKind k)
{
    switch (k) {
    case QuestionKind::boolean: return "boolean";
    case QuestionKind::single_choice: return "single-choice";
    case QuestionKind::multi_choice: return "multi-choice";
    case QuestionKind::free_text: return "free-text";
    }
    return "";
}

std::optional<QuestionKind> parse_question_kind(std::string_view text)
{
    for (auto k : {QuestionKind::boolean, QuestionKind::single_choice, QuestionKind::multi_choice,
                   QuestionKind::free_text})
        if (to_string(k) == text)
            return k;
    return std::nullopt;
}

std::string_view to_string(ConditionOp op)
{
    switch (op) {
    case ConditionOp::equals: return "equals";
    case ConditionOp::not_equals: return "not-equals";
    case ConditionOp::includes: return "includes";
    case ConditionOp::answered: return "answered";
    }
    return "";
}

std::optional<ConditionOp> parse_condition_op(std::string_view text)
{
    for (auto op : {ConditionOp::equals, ConditionOp::not_equals, ConditionOp::includes, ConditionOp::answered})
        if (to_string(op) == text)
            return op;
    return std::nullopt;
}

std::string_view to_string(RuleEffect e)
{
    return e == RuleEffect::flag ? "flag" : "exclude";
}

std::string_view to_string(RiskStatus s)
{
    switch (s) {
    case RiskStatus::flagged: return "flagged";
    case RiskStatus::excluded: return "excluded";
    case RiskStatus::undetermined: return "undetermined";
    }
    return "";
}

const Question* Questionnaire::find(std::string_view question_id) const
{
    for (const auto& q : questions)
        if (q.id == question_id)
            return &q;
    return nullptr;
}

const RiskVerdict* RiskProfile::find(const RiskId& id) const
{
    auto it = std::lower_bound(risks.begin(), risks.end(), id,
                               [](const RiskVerdict& v, const RiskId& key) { return v.risk_id < key; });
    return it != risks.end() && it->risk_id == id ? &*it : nullptr;
}

std::size_t RiskProfile::count(RiskStatus s) const
{
    return static_cast<std::size_t>(
        std::count_if(risks.begin(), risks.end(), [&](const RiskVerdict& v) { return v.status == s; }));
}

namespace {

using detail::YamlReader;

bool has_option(const Question& q, std::string_view value)
{
    return std::any_of(q.options.begin(), q.options.end(), [&](const Option& o) { return o.value == value; });
}

bool is_choice(QuestionKind k)
{
    return k == QuestionKind::single_choice || k == QuestionKind::multi_choice;
}

// `declared` holds the questions an atom may reference; `all` is used to tell a forward
// reference from an unknown id.
std::optional<Condition> read_condition(YamlReader& y, const YAML::Node& node,
                                        const std::map<std::string, const Question*>& declared,
                                        const std::set<std::string>& all, std::string_view what)
{
    if (node.IsNull())
        return Condition{};
    if (!node.IsSequence()) {
        y.error(node, std::string(what) + " must be a list of conditions");
        return std::nullopt;
    }
    Condition c;
    bool ok = true;
    for (const auto& atom_node : node) {
        if (!y.expect_map(atom_node, "condition")) {
            ok = false;
            continue;
        }
        y.check_keys(atom_node, {"question", "op", "value"}, "condition");
        auto qid = y.required_string(atom_node, "question");
        auto op_text = y.required_string(atom_node, "op");
        auto value = y.optional_string(atom_node, "value");
        if (!qid || !op_text) {
            ok = false;
            continue;
        }
        auto op = parse_condition_op(*op_text);
        if (!op) {
            y.error(YamlReader::child(atom_node, "op"), "unknown condition operator '" + *op_text + "'");
            ok = false;
            continue;
        }
        auto target = declared.find(*qid);
        if (target == declared.end()) {
            y.error(YamlReader::child(atom_node, "question"),
                    all.count(*qid) ? "forward reference to question '" + *qid + "'"
                                    : "unknown question '" + *qid + "'");
            ok = false;
            continue;
        }
        const Question& ref = *target->second;
        auto fail = [&](std::string msg) {
            y.error(atom_node, std::move(msg));
            ok = false;
        };
        switch (*op) {
        case ConditionOp::answered:
            if (value)
                fail("'answered' takes no value");
            break;
        case ConditionOp::includes:
            if (ref.kind != QuestionKind::multi_choice)
                fail("'includes' requires a multi-choice question ('" + ref.id + "' is " +
                     std::string(to_string(ref.kind)) + ")");
            else if (!value)
                fail("'includes' requires a value");
            else if (!has_option(ref, *value))
                fail("'" + *value + "' is not an option of '" + ref.id + "'");
            break;
        case ConditionOp::equals:
        case ConditionOp::not_equals:
            if (!value)
                fail("'" + std::string(to_string(*op)) + "' requires a value");
            else if (ref.kind == QuestionKind::multi_choice)
                fail("use 'includes' to test multi-choice question '" + ref.id + "'");
            else if (ref.kind == QuestionKind::boolean && *value != "yes" && *value != "no")
                fail("boolean question '" + ref.id + "' compares against 'yes' or 'no'");
            else if (ref.kind == QuestionKind::single_choice && !has_option(ref, *value))
                fail("'" + *value + "' is not an option of '" + ref.id + "'");
            break;
        }
        c.atoms.push_back({*qid, *op, value});
    }
    if (!ok)
        return std::nullopt;
    return c;
}

std::string substitute(std::string text, const Risk& risk, const std::string& rule_id)
{
    auto replace_all = [&](std::string_view key, const std::string& value) {
        std::size_t pos = 0;
        while ((pos = text.find(key, pos)) != std::string::npos) {
            text.replace(pos, key.size(), value);
            pos += value.size();
        }
    };
    replace_all("{risk_id}", risk.id.str());
    replace_all("{risk_name}", risk.name);
    replace_all("{rule_id}", rule_id);
    return text;
}

bool atom_holds(const ConditionAtom& atom, const AnswerSet& answers)
{
    auto it = answers.find(atom.question_id);
    if (it == answers.end())
        return false;
    const auto& values = it->second;
    const auto& v = atom.value.value_or("");
    switch (atom.op) {
    case ConditionOp::answered: return true;
    case ConditionOp::equals: return values.size() == 1 && values.front() == v;
    case ConditionOp::not_equals: return values.size() == 1 && values.front() != v;
    case ConditionOp::includes: return std::find(values.begin(), values.end(), v) != values.end();
    }
    return false;
}

} // namespace

bool condition_holds(const Condition& c, const AnswerSet& answers)
{
    return std::all_of(c.atoms.begin(), c.atoms.end(), [&](const ConditionAtom& a) { return atom_holds(a, answers); });
}

Parsed<Questionnaire> load_questionnaire(std::string_view text, const std::string& source_name)
{
    Parsed<Questionnaire> result;
    YamlReader y(source_name, result.diagnostics);
    auto root = y.load(text);
    if (!root)
        return result;
    if (!y.expect_map(*root, "questionnaire"))
        return result;
    y.check_keys(*root, {"format_version", "id", "name", "version", "questions", "rules"}, "top-level");

    Questionnaire q;
    auto format = y.required_string(*root, "format_version");
    if (format && *format != "1")
        y.error(YamlReader::child(*root, "format_version"), "unsupported format_version '" + *format + "' (expected 1)");
    auto id = y.required_string(*root, "id");
    auto name = y.optional_string(*root, "name");
    q.version = y.optional_string(*root, "version").value_or("");
    if (id)
        q.id = *id;
    q.name = name.value_or(q.id);

    auto questions = YamlReader::child(*root, "questions");
    std::set<std::string> all_ids;
    if (questions.IsDefined() && questions.IsSequence())
        for (const auto& qn : questions)
            if (qn.IsMap())
                if (auto qid = YamlReader::child(qn, "id"); qid.IsScalar())
                    all_ids.insert(qid.Scalar());

    // `declared` points into q.questions; the reserve keeps those pointers valid.
    if (!questions.IsDefined()) {
        y.error(*root, "missing required field 'questions'");
    } else if (y.expect_sequence_or_null(questions, "questions")) {
        q.questions.reserve(questions.size());
        std::map<std::string, const Question*> declared;
        for (const auto& qn : questions) {
            if (!y.expect_map(qn, "question"))
                continue;
            y.check_keys(qn, {"id", "text", "kind", "options", "visible_if", "tags"}, "question");
            Question question;
            auto qid = y.required_string(qn, "id");
            auto qtext = y.required_string(qn, "text");
            auto kind_text = y.required_string(qn, "kind");
            if (!qid)
                continue;
            question.id = *qid;
            question.text = qtext.value_or("");
            if (question.id.empty() || question.id.find_first_of(" \t") != std::string::npos)
                y.error(YamlReader::child(qn, "id"), "question id '" + question.id + "' is empty or contains whitespace");
            if (kind_text) {
                auto kind = parse_question_kind(*kind_text);
                if (!kind)
                    y.error(YamlReader::child(qn, "kind"), "unknown question kind '" + *kind_text + "'");
                else
                    question.kind = *kind;
            }
            auto options = YamlReader::child(qn, "options");
            if (options.IsDefined() && !options.IsNull()) {
                if (!options.IsSequence()) {
                    y.error(options, "options must be a list");
                } else {
                    std::set<std::string> values;
                    for (const auto& on : options) {
                        Option opt;
                        if (on.IsScalar()) {
                            opt = {on.Scalar(), on.Scalar()};
                        } else if (on.IsMap()) {
                            y.check_keys(on, {"value", "label"}, "option");
                            auto v = y.required_string(on, "value");
                            if (!v)
                                continue;
                            opt = {*v, y.optional_string(on, "label").value_or(*v)};
                        } else {
                            y.error(on, "option must be a string or a {value, label} mapping");
                            continue;
                        }
                        if (!values.insert(opt.value).second)
                            y.error(on, "duplicate option value '" + opt.value + "' in question '" + question.id + "'");
                        question.options.push_back(std::move(opt));
                    }
                }
            }
            if (is_choice(question.kind) && question.options.size() < 2)
                y.error(qn, "choice question '" + question.id + "' needs at least 2 options");
            if (!is_choice(question.kind) && !question.options.empty())
                y.error(options, "options are only allowed on choice questions");
            if (auto tags = y.string_list(qn, "tags", false))
                question.tags = *tags;
            if (auto vis = YamlReader::child(qn, "visible_if"); vis.IsDefined()) {
                if (auto c = read_condition(y, vis, declared, all_ids, "visible_if"))
                    question.visible_if = std::move(*c);
            }
            if (declared.count(question.id)) {
                y.error(YamlReader::child(qn, "id"), "duplicate question id '" + question.id + "'");
                continue;
            }
            q.questions.push_back(std::move(question));
            declared.emplace(q.questions.back().id, &q.questions.back());
        }
    }

    std::map<std::string, const Question*> every;
    for (const auto& question : q.questions)
        every.emplace(question.id, &question);

    auto rules = YamlReader::child(*root, "rules");
    if (rules.IsDefined() && y.expect_sequence_or_null(rules, "rules")) {
        std::set<std::string> rule_ids;
        for (const auto& rn : rules) {
            if (!y.expect_map(rn, "rule"))
                continue;
            y.check_keys(rn, {"id", "when", "effect", "risk_ids", "select", "rationale"}, "rule");
            ApplicabilityRule rule;
            auto rid = y.required_string(rn, "id");
            auto effect = y.required_string(rn, "effect");
            auto rationale = y.required_string(rn, "rationale");
            if (rid) {
                rule.id = *rid;
                if (!rule_ids.insert(*rid).second)
                    y.error(YamlReader::child(rn, "id"), "duplicate rule id '" + *rid + "'");
            }
            if (effect) {
                if (*effect == "flag")
                    rule.effect = RuleEffect::flag;
                else if (*effect == "exclude")
                    rule.effect = RuleEffect::exclude;
                else
                    y.error(YamlReader::child(rn, "effect"), "unknown rule effect '" + *effect + "'");
            }
            if (rationale) {
                if (rationale->empty())
                    y.error(rn, "rule '" + rule.id + "' has an empty rationale");
                rule.rationale = *rationale;
            }
            if (auto when = YamlReader::child(rn, "when"); when.IsDefined()) {
                if (auto c = read_condition(y, when, every, {}, "when"))
                    rule.when = std::move(*c);
            }
            auto ids = YamlReader::child(rn, "risk_ids");
            auto select = YamlReader::child(rn, "select");
            if (ids.IsDefined() == select.IsDefined()) {
                y.error(rn, "rule '" + rule.id + "' needs exactly one of 'risk_ids' or 'select'");
            } else if (ids.IsDefined()) {
                if (auto list = y.string_list(rn, "risk_ids", true)) {
                    if (list->empty())
                        y.error(ids, "rule '" + rule.id + "' lists no risk_ids");
                    std::vector<RiskId> targets;
                    for (auto& s : *list)
                        targets.emplace_back(std::move(s));
                    rule.risk_ids = std::move(targets);
                }
            } else if (y.expect_map(select, "select")) {
                y.check_keys(select, {"category", "dimension", "taxonomy"}, "selector");
                RiskSelector sel;
                if (auto c = y.optional_string(select, "category")) {
                    sel.category = parse_category(*c);
                    if (!sel.category)
                        y.error(YamlReader::child(select, "category"), "unknown category '" + *c + "'");
                }
                sel.dimension = y.optional_string(select, "dimension");
                sel.taxonomy = y.optional_string(select, "taxonomy");
                if (!sel.category && !sel.dimension && !sel.taxonomy)
                    y.error(select, "selector of rule '" + rule.id + "' is empty");
                rule.selector = sel;
            }
            q.rules.push_back(std::move(rule));
        }
    }

    sort_diagnostics(result.diagnostics);
    if (!y.failed())
        result.value = std::move(q);
    return result;
}

std::vector<Diagnostic> check_rule_targets(const Questionnaire& q, const KnowledgeGraph& g,
                                           const std::string& source_name)
{
    std::vector<Diagnostic> out;
    for (const auto& rule : q.rules) {
        if (!rule.risk_ids)
            continue;
        for (const auto& id : *rule.risk_ids)
            if (!g.find(id))
                out.push_back(make_error({source_name, 0}, "rule '" + rule.id + "' targets unknown risk '" +
                                                                id.str() + "'"));
    }
    return out;
}

std::vector<Question> next_questions(const Questionnaire& q, const AnswerSet& answers)
{
    std::vector<Question> out;
    for (const auto& question : q.questions) {
        if (answers.count(question.id))
            continue;
        if (question.visible_if && !condition_holds(*question.visible_if, answers))
            continue;
        out.push_back(question);
    }
    return out;
}

std::vector<AnswerIssue> check_answers(const Questionnaire& q, const AnswerSet& answers)
{
    std::vector<AnswerIssue> issues;
    for (const auto& [qid, values] : answers) {
        const Question* question = q.find(qid);
        if (!question) {
            issues.push_back({qid, "unknown question"});
            continue;
        }
        if (question->visible_if && !condition_holds(*question->visible_if, answers))
            issues.push_back({qid, "question is not visible under the current answers"});
        switch (question->kind) {
        case QuestionKind::boolean:
            if (values.size() != 1 || (values.front() != "yes" && values.front() != "no"))
                issues.push_back({qid, "expected 'yes' or 'no'"});
            break;
        case QuestionKind::single_choice:
            if (values.size() != 1)
                issues.push_back({qid, "expected exactly one option"});
            else if (!has_option(*question, values.front()))
                issues.push_back({qid, "'" + values.front() + "' is not an option"});
            break;
        case QuestionKind::multi_choice: {
            std::set<std::string> seen;
            for (const auto& v : values) {
                if (!has_option(*question, v))
                    issues.push_back({qid, "'" + v + "' is not an option"});
                if (!seen.insert(v).second)
                    issues.push_back({qid, "option '" + v + "' selected twice"});
            }
            break;
        }
        case QuestionKind::free_text:
            if (values.size() != 1)
                issues.push_back({qid, "expected a single text value"});
            break;
        }
    }
    return issues;
}

RiskProfile evaluate_applicability(const Questionnaire& q, const AnswerSet& answers, const KnowledgeGraph& g,
                                   TierResult tier, std::string generated_at)
{
    std::map<RiskId, std::vector<RuleHit>> hits;
    for (const auto& rule : q.rules) {
        if (!condition_holds(rule.when, answers))
            continue;
        std::vector<const Risk*> targets;
        if (rule.risk_ids) {
            for (const auto& id : *rule.risk_ids) {
                const Risk* r = g.find(id);
                if (!r)
                    throw NotFound("rule_target_not_found",
                                   "rule '" + rule.id + "' targets unknown risk '" + id.str() + "'");
                targets.push_back(r);
            }
        } else if (rule.selector) {
            RiskFilter f;
            f.category = rule.selector->category;
            f.dimension = rule.selector->dimension;
            f.taxonomy = rule.selector->taxonomy;
            for (const auto& r : g.list_risks(f))
                targets.push_back(g.find(r.id));
        }
        std::set<RiskId> seen;
        for (const Risk* r : targets)
            if (seen.insert(r->id).second)
                hits[r->id].push_back({rule.id, rule.effect, substitute(rule.rationale, *r, rule.id)});
    }

    RiskProfile profile;
    profile.questionnaire_id = q.id;
    profile.questionnaire_version = q.version;
    profile.generated_at = std::move(generated_at);
    profile.partial = !next_questions(q, answers).empty();
    profile.tier = std::move(tier);

    std::vector<RiskId> ids;
    ids.reserve(g.risk_count());
    for (const auto& r : g.risks())
        ids.push_back(r.id);
    std::sort(ids.begin(), ids.end());

    for (const auto& id : ids) {
        RiskVerdict v;
        v.risk_id = id;
        if (auto it = hits.find(id); it != hits.end()) {
            v.hits = std::move(it->second);
            std::vector<std::string> flags, excludes;
            for (const auto& h : v.hits)
                (h.effect == RuleEffect::flag ? flags : excludes).push_back(h.rule_id);
            if (!flags.empty()) {
                v.status = RiskStatus::flagged;
                if (!excludes.empty()) {
                    v.conflict = true;
                    std::string note = id.str() + ": flag (";
                    for (std::size_t i = 0; i < flags.size(); ++i)
                        note += (i ? ", " : "") + flags[i];
                    note += ") overrides exclude (";
                    for (std::size_t i = 0; i < excludes.size(); ++i)
                        note += (i ? ", " : "") + excludes[i];
                    note += ")";
                    profile.conflicts.push_back(std::move(note));
                }
            } else if (!excludes.empty()) {
                v.status = RiskStatus::excluded;
            }
        }
        profile.risks.push_back(std::move(v));
    }
    return profile;
}

} // namespace ran
