#include "ran/store.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace ran {

namespace fs = std::filesystem;

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string random_record_id()
{
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    static const char* digits = "0123456789abcdef";
    std::string id(32, '0');
    for (std::size_t i = 0; i < id.size(); i += 16) {
        auto bits = rng();
        for (std::size_t k = 0; k < 16; ++k, bits >>= 4)
            id[i + k] = digits[bits & 0xf];
    }
    return id;
}

namespace {

bool valid_id(const std::string& id)
{
    if (id.empty() || id.size() > 64)
        return false;
    for (char c : id)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')))
            return false;
    return true;
}

} // namespace

Json to_json(const AssessmentRecord& r)
{
    Json j;
    j["id"] = r.id;
    j["revision"] = r.revision;
    j["created_at"] = r.created_at;
    j["updated_at"] = r.updated_at;
    j["use_case_text"] = r.use_case_text;
    j["attrs"] = Json::object();
    for (const auto& [k, v] : r.attrs)
        j["attrs"][k] = v;
    j["questionnaire"] = {{"id", r.questionnaire_id}, {"version", r.questionnaire_version}};
    j["answers"] = answers_to_json(r.answers);
    if (r.profile)
        j["profile"] = to_json(*r.profile);
    return j;
}

AssessmentRecord record_from_json(const Json& j)
{
    try {
        AssessmentRecord r;
        r.id = j.at("id").get<std::string>();
        r.revision = j.at("revision").get<long long>();
        r.created_at = j.at("created_at").get<std::string>();
        r.updated_at = j.at("updated_at").get<std::string>();
        r.use_case_text = j.at("use_case_text").get<std::string>();
        for (const auto& [k, v] : j.at("attrs").items())
            r.attrs[k] = v.get<std::string>();
        r.questionnaire_id = j.at("questionnaire").at("id").get<std::string>();
        r.questionnaire_version = j.at("questionnaire").at("version").get<std::string>();
        r.answers = answers_from_json(j.at("answers"));
        if (auto it = j.find("profile"); it != j.end())
            r.profile = profile_from_json(*it);
        return r;
    } catch (const Json::exception& e) {
        throw InvalidInput("invalid_json", "malformed assessment record", {e.what()});
    }
}

AssessmentStore::AssessmentStore(fs::path dir) : dir_(std::move(dir))
{
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
        throw Error("io_error", "cannot create store directory '" + dir_.string() + "'");
}

fs::path AssessmentStore::path_for(const std::string& id) const
{
    return dir_ / (id + ".json");
}

void AssessmentStore::write(const AssessmentRecord& r) const
{
    const auto final_path = path_for(r.id);
    const auto tmp_path = dir_ / ("." + r.id + "." + random_record_id().substr(0, 8) + ".tmp");
    const std::string body = to_json(r).dump(2) + "\n";
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        out << body;
        out.flush();
        if (!out)
            throw Error("io_error", "cannot write '" + tmp_path.string() + "'");
    }
    if (int fd = ::open(tmp_path.c_str(), O_RDONLY); fd >= 0) {
        ::fsync(fd);
        ::close(fd);
    }
    std::error_code ec;
    fs::rename(tmp_path, final_path, ec);
    if (ec) {
        fs::remove(tmp_path, ec);
        throw Error("io_error", "cannot move record into '" + final_path.string() + "'");
    }
}

std::mutex& AssessmentStore::lock_for(const std::string& id)
{
    std::lock_guard guard(locks_guard_);
    auto& slot = locks_[id];
    if (!slot)
        slot = std::make_unique<std::mutex>();
    return *slot;
}

AssessmentRecord AssessmentStore::create(AssessmentRecord draft)
{
    draft.id = random_record_id();
    draft.created_at = utc_timestamp();
    draft.updated_at = draft.created_at;
    draft.revision = 1;
    std::lock_guard guard(lock_for(draft.id));
    write(draft);
    return draft;
}

std::optional<AssessmentRecord> AssessmentStore::get(const std::string& id) const
{
    if (!valid_id(id))
        return std::nullopt;
    std::ifstream in(path_for(id), std::ios::binary);
    if (!in)
        return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return record_from_json(parse_json(ss.str(), "assessment record"));
}

AssessmentRecord AssessmentStore::update(const std::string& id, long long expected_revision,
                                         const std::function<void(AssessmentRecord&)>& mutate)
{
    if (!valid_id(id))
        throw NotFound("assessment_not_found", "no assessment '" + id + "'");
    std::lock_guard guard(lock_for(id));
    auto current = get(id);
    if (!current)
        throw NotFound("assessment_not_found", "no assessment '" + id + "'");
    if (current->revision != expected_revision)
        throw RevisionConflict(expected_revision, current->revision);
    AssessmentRecord next = *current;
    mutate(next);
    next.id = current->id;
    next.created_at = current->created_at;
    next.revision = current->revision + 1;
    next.updated_at = utc_timestamp();
    write(next);
    return next;
}

std::vector<std::string> AssessmentStore::list_ids() const
{
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(dir_)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json")
            continue;
        auto stem = entry.path().stem().string();
        if (valid_id(stem))
            ids.push_back(stem);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

} // namespace ran
