#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ran {

enum class Severity { error, warning };

/// Where a parsed value came from. `line` is 1-based; 0 means "not from a file".
struct SourceLocation {
    std::string source;
    int line = 0;

    bool operator==(const SourceLocation&) const = default;
};

struct Diagnostic {
    Severity severity = Severity::error;
    SourceLocation where;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

Diagnostic make_error(SourceLocation where, std::string message);
Diagnostic make_warning(SourceLocation where, std::string message);

bool has_errors(const std::vector<Diagnostic>& diags);
std::size_t count(const std::vector<Diagnostic>& diags, Severity severity);

// Orders by source, then line, then message (severity breaks remaining ties).
void sort_diagnostics(std::vector<Diagnostic>& diags);

// "source:line: error: message"
std::string format_diagnostic(const Diagnostic& d);

const char* to_string(Severity s);

/// A parse result: `value` is set iff no error diagnostics were produced.
/// Warnings may accompany a value.
template <class T>
struct Parsed {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;

    explicit operator bool() const { return value.has_value(); }
    const T& operator*() const { return *value; }
    T& operator*() { return *value; }
    const T* operator->() const { return &*value; }
};

/// Domain error with a machine-readable code ("risk_not_found", "ambiguous_tag", ...).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::vector<std::string> details = {})
        : std::runtime_error(message), code_(std::move(code)), details_(std::move(details)) {}

    const std::string& code() const noexcept { return code_; }
    const std::vector<std::string>& details() const noexcept { return details_; }

private:
    std::string code_;
    std::vector<std::string> details_;
};

class NotFound : public Error {
public:
    using Error::Error;
};

class AmbiguousTag : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

} // namespace ran
