#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>

#include "ran/bundle.hpp"
#include "ran/config.hpp"
#include "ran/rank.hpp"
#include "ran/store.hpp"

namespace ran {

struct Request {
    std::string method;
    std::string path; // decoded, without query string
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> headers; // lowercase names
    std::string body;

    std::optional<std::string> header(std::string_view name) const;
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::map<std::string, std::string> headers;
    std::string body;
};

struct ApiOptions {
    /// Overrides the first tier table found in the bundle.
    std::optional<TierRuleTable> tier_table;
    Judge* judge = nullptr;
    std::function<std::string()> clock = utc_timestamp;
};

/// Routes requests against a loaded bundle and an assessment store. `handle` is safe to call concurrently.
class Api {
public:
    Api(DataBundle bundle, AssessmentStore& store, ApiOptions options = {});

    Response handle(const Request& request) const;

    const KnowledgeGraph& graph() const noexcept { return bundle_.graph; }

private:
    Response route(const Request& request) const;

    DataBundle bundle_;
    LexicalIndex index_;
    AssessmentStore& store_;
    ApiOptions options_;
    const TierRuleTable* tiers_ = nullptr;
};

/// Error envelope body: {"code", "message", "details"}.
std::string error_body(const std::string& code, const std::string& message,
                       const std::vector<std::string>& details = {});

/// HTTP/1.1 binding of an Api. Writes one JSON line per request to `log` when given.
class HttpServer {
public:
    explicit HttpServer(const Api& api, std::ostream* log = nullptr);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds without accepting yet. Port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Accepts until stop(). Blocks.
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Loads everything named by `config`, then serves until the process is stopped. Returns an exit code.
int serve(const ServiceConfig& config, std::ostream& out, std::ostream& err);

} // namespace ran
