#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ran/assess.hpp"
#include "ran/json_codec.hpp"

namespace ran {

/// Current UTC time as RFC 3339 with second precision, e.g. "2024-05-01T12:00:00Z".
std::string utc_timestamp();

/// Random 32-character lowercase hex id.
std::string random_record_id();

struct AssessmentRecord {
    std::string id;
    std::string created_at;
    std::string updated_at;
    std::string use_case_text;
    Attributes attrs;
    std::string questionnaire_id;
    std::string questionnaire_version;
    AnswerSet answers;
    std::optional<RiskProfile> profile;
    long long revision = 0;
    bool operator==(const AssessmentRecord&) const = default;
};

Json to_json(const AssessmentRecord& r);
AssessmentRecord record_from_json(const Json& j);

/// Raised when a mutation's expected revision is stale.
class RevisionConflict : public Error {
public:
    RevisionConflict(long long expected, long long actual)
        : Error("revision_conflict",
                "expected revision " + std::to_string(expected) + " but the record is at " + std::to_string(actual)),
          actual_(actual) {}
    long long actual() const noexcept { return actual_; }

private:
    long long actual_;
};

/// One JSON file per assessment under a directory. Writes go to a temp file that is renamed into place.
class AssessmentStore {
public:
    explicit AssessmentStore(std::filesystem::path dir);

    const std::filesystem::path& directory() const noexcept { return dir_; }

    /// Assigns id, timestamps and revision 1, then persists.
    AssessmentRecord create(AssessmentRecord draft);

    std::optional<AssessmentRecord> get(const std::string& id) const;

    /// Applies `mutate` if the stored revision equals `expected_revision`; bumps the revision and persists.
    /// Throws NotFound ("assessment_not_found") or RevisionConflict.
    AssessmentRecord update(const std::string& id, long long expected_revision,
                            const std::function<void(AssessmentRecord&)>& mutate);

    std::vector<std::string> list_ids() const;

private:
    std::filesystem::path path_for(const std::string& id) const;
    void write(const AssessmentRecord& r) const;
    std::mutex& lock_for(const std::string& id);

    std::filesystem::path dir_;
    std::mutex locks_guard_;
    std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

} // namespace ran
