#pragma once

#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pipegen/executor/retry.hpp"
#include "pipegen/query/intent_types.hpp"

namespace pipegen::query {

/// Ordered regex -> category table; the first matching pattern wins. Matching is
/// case-insensitive and sees the query with line breaks folded to spaces.
class IntentPatterns {
public:
    struct Entry {
        IntentCategory category;
        std::string source;
        std::regex regex;
    };

    static IntentPatterns from_json(const nlohmann::json& doc);  // throws std::invalid_argument
    static IntentPatterns load(const std::filesystem::path& path);
    // The table shipped in data/intent_patterns.json, compiled into the library.
    static const IntentPatterns& builtin();

    std::optional<QueryIntent> match(std::string_view query) const;

    int version() const noexcept { return version_; }
    double confidence() const noexcept { return confidence_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

private:
    int version_ = 0;
    double confidence_ = 0.95;
    std::vector<Entry> entries_;
};

std::optional<QueryIntent> detect_intent_fast(std::string_view query,
                                              const IntentPatterns& patterns = IntentPatterns::builtin());

providers::ChatRequest intent_request(std::string_view query);

/// Parses a provider reply of the form {"category": ..., "confidence": ..., "params": {...}}.
/// Throws ProviderError(transient) when the reply is not such an object.
QueryIntent parse_intent_reply(std::string_view reply);

/// Fast path first, then the provider under the retry loop. Never throws: when nothing
/// usable comes back the result is {other, 0.0}.
QueryIntent detect_intent(std::string_view query, exec::RetryHandler& handler,
                          const IntentPatterns& patterns = IntentPatterns::builtin());

/// The reply must be exactly one JSON object, optionally wrapped in a single code fence.
/// Anything else throws ProviderError(transient) so the retry loop asks again.
nlohmann::json parse_json_reply(std::string_view reply);

}  // namespace pipegen::query
