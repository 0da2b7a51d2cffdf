#include "pipegen/query/intent.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "pipegen/common/canonical_json.hpp"
#include "pipegen/common/text.hpp"
#include "pipegen/executor/event_log.hpp"

namespace pipegen::query {
namespace detail {
extern const char* const kIntentPatternsJson;
}

using nlohmann::json;
using providers::ErrorKind;
using providers::ProviderError;

namespace {

std::string fold_lines(std::string_view s) {
    std::string out(s);
    std::replace(out.begin(), out.end(), '\n', ' ');
    std::replace(out.begin(), out.end(), '\r', ' ');
    std::replace(out.begin(), out.end(), '\t', ' ');
    return out;
}

}  // namespace

IntentPatterns IntentPatterns::from_json(const json& doc) {
    IntentPatterns p;
    try {
        p.version_ = doc.at("version").get<int>();
        p.confidence_ = doc.value("confidence", 0.95);
        if (!(p.confidence_ >= 0.0 && p.confidence_ <= 1.0)) throw std::invalid_argument("confidence outside [0, 1]");
        for (const auto& e : doc.at("patterns")) {
            auto src = e.at("regex").get<std::string>();
            p.entries_.push_back({category_from_string(e.at("category").get<std::string>()), src,
                                  std::regex(src, std::regex::ECMAScript | std::regex::icase)});
        }
    } catch (const std::regex_error& e) {
        throw std::invalid_argument(fmt::format("bad intent pattern: {}", e.what()));
    } catch (const json::exception& e) {
        throw std::invalid_argument(fmt::format("malformed intent pattern table: {}", e.what()));
    }
    return p;
}

IntentPatterns IntentPatterns::load(const std::filesystem::path& path) {
    return from_json(read_json_file(path));
}

const IntentPatterns& IntentPatterns::builtin() {
    static const IntentPatterns table = from_json(json::parse(detail::kIntentPatternsJson));
    return table;
}

std::optional<QueryIntent> IntentPatterns::match(std::string_view query) const {
    auto q = fold_lines(query);
    if (text::trim(q).empty()) return std::nullopt;
    for (const auto& e : entries_) {
        if (std::regex_search(q, e.regex)) return QueryIntent{e.category, confidence_, {}};
    }
    return std::nullopt;
}

std::optional<QueryIntent> detect_intent_fast(std::string_view query, const IntentPatterns& patterns) {
    return patterns.match(query);
}

providers::ChatRequest intent_request(std::string_view query) {
    providers::ChatRequest req;
    req.task = "intent";
    req.system_text =
        "Classify a request about stream processing pipelines. Answer with a single JSON object and nothing "
        "else: {\"category\": one of \"pipeline_design\", \"optimization\", \"explanation\", \"deployment\", "
        "\"other\"; \"confidence\": number between 0 and 1; \"params\": object of string values}.";
    req.user_text = fmt::format("Request:\n{}\n", query);
    req.max_tokens = 256;
    req.temperature = 0.0;
    return req;
}

json parse_json_reply(std::string_view reply) {
    auto body = text::trim(reply);
    if (body.rfind("```", 0) == 0) {
        auto first_nl = body.find('\n');
        auto close = body.rfind("```");
        if (first_nl == std::string::npos || close <= first_nl) {
            throw ProviderError(ErrorKind::transient, "reply has an unterminated code fence");
        }
        body = text::trim(std::string_view(body).substr(first_nl + 1, close - first_nl - 1));
    }
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ProviderError(ErrorKind::transient, "reply is not a single JSON object");
    }
    return doc;
}

QueryIntent parse_intent_reply(std::string_view reply) {
    auto doc = parse_json_reply(reply);
    QueryIntent intent;
    try {
        intent.category = category_from_string(doc.at("category").get<std::string>());
        intent.confidence = doc.at("confidence").get<double>();
        if (auto it = doc.find("params"); it != doc.end() && it->is_object()) {
            for (const auto& [k, v] : it->items()) intent.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
    } catch (const std::exception& e) {
        throw ProviderError(ErrorKind::transient, fmt::format("intent reply has the wrong shape: {}", e.what()));
    }
    if (!(intent.confidence >= 0.0 && intent.confidence <= 1.0)) {
        throw ProviderError(ErrorKind::transient, "intent confidence outside [0, 1]");
    }
    return intent;
}

QueryIntent detect_intent(std::string_view query, exec::RetryHandler& handler, const IntentPatterns& patterns) {
    try {
        if (auto fast = detect_intent_fast(query, patterns)) return *fast;
        if (text::trim(query).empty()) return QueryIntent{};
        std::optional<QueryIntent> parsed;
        auto outcome = handler.call(
            intent_request(query), [&parsed](const providers::ChatResponse& r) { parsed = parse_intent_reply(r.content); },
            "intent");
        if (outcome.response && parsed) return *parsed;
        spdlog::warn("intent detection fell back to 'other' after {} attempts", outcome.attempts);
    } catch (const std::exception& e) {
        spdlog::warn("intent detection failed: {}", e.what());
    }
    return QueryIntent{};
}

}  // namespace pipegen::query
