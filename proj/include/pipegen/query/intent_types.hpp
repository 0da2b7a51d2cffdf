#pragma once

#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace pipegen::query {

enum class IntentCategory { pipeline_design, optimization, explanation, deployment, other };

std::string to_string(IntentCategory c);
IntentCategory category_from_string(std::string_view s);  // throws std::invalid_argument

struct QueryIntent {
    IntentCategory category = IntentCategory::other;
    double confidence = 0.0;  // [0, 1]
    std::map<std::string, std::string> params;
};

nlohmann::json to_json(const QueryIntent& intent);

}  // namespace pipegen::query
