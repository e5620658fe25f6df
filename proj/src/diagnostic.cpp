#include "ran/diagnostic.hpp"

#include <algorithm>
#include <tuple>

namespace ran {

Diagnostic make_error(SourceLocation where, std::string message)
{
    return {Severity::error, std::move(where), std::move(message)};
}

Diagnostic make_warning(SourceLocation where, std::string message)
{
    return {Severity::warning, std::move(where), std::move(message)};
}

bool has_errors(const std::vector<Diagnostic>& diags)
{
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::size_t count(const std::vector<Diagnostic>& diags, Severity severity)
{
    return static_cast<std::size_t>(std::count_if(
        diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.severity == severity; }));
}

void sort_diagnostics(std::vector<Diagnostic>& diags)
{
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.where.source, a.where.line, a.message, a.severity) <
               std::tie(b.where.source, b.where.line, b.message, b.severity);
    });
}

const char* to_string(Severity s)
{
    return s == Severity::error ? "error" : "warning";
}

std::string format_diagnostic(const Diagnostic& d)
{
    std::string out;
    if (!d.where.source.empty()) {
        out += d.where.source;
        if (d.where.line > 0)
            out += ":" + std::to_string(d.where.line);
        out += ": ";
    }
    out += to_string(d.severity);
    out += ": ";
    out += d.message;
    return out;
}

} // namespace ran
