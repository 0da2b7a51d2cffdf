#include "pipegen/query/parameters.hpp"

#include <algorithm>
#include <regex>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "pipegen/common/text.hpp"
#include "pipegen/common/units.hpp"
#include "pipegen/query/intent.hpp"

namespace pipegen::query {

using nlohmann::json;
using std::chrono::milliseconds;

namespace {

constexpr auto kIcase = std::regex::ECMAScript | std::regex::icase;

struct Clause {
    std::string label;  // lowercased, empty when unlabelled
    std::string body;
};

// Lines, and "; "-separated pieces of lines. A leading "Label:" is split off.
std::vector<Clause> clauses(std::string_view query) {
    static const std::regex labelled(R"(^\s*(?:[-*]\s*)?([A-Za-z][A-Za-z /-]{0,30}):\s*(.*)$)");
    std::vector<Clause> out;
    std::string q(query);
    std::size_t pos = 0;
    while (pos <= q.size()) {
        auto nl = q.find('\n', pos);
        std::string line = q.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        std::size_t start = 0;
        while (start <= line.size()) {
            auto semi = line.find("; ", start);
            std::string piece = text::trim(line.substr(start, semi == std::string::npos ? std::string::npos : semi - start));
            if (!piece.empty()) {
                std::smatch m;
                if (std::regex_match(piece, m, labelled)) {
                    out.push_back({text::to_lower(text::trim(m[1].str())), text::trim(m[2].str())});
                } else {
                    out.push_back({"", piece});
                }
            }
            if (semi == std::string::npos) break;
            start = semi + 2;
        }
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return out;
}

bool mentions(std::string_view hay, std::string_view re) {
    return std::regex_search(std::string(hay), std::regex(std::string(re), kIcase));
}

const std::vector<std::pair<std::string, std::string>>& endpoint_keywords() {
    // value -> pattern; the value always occurs in text matched by the pattern.
    static const std::vector<std::pair<std::string, std::string>> table{
        {"kafka", R"(\bkafka\b)"},          {"kinesis", R"(\bkinesis\b)"},
        {"pulsar", R"(\bpulsar\b)"},        {"rabbitmq", R"(\brabbitmq\b)"},
        {"socket", R"(\bsocket\b)"},        {"elasticsearch", R"(\belasticsearch\b)"},
        {"jdbc", R"(\bjdbc\b)"},            {"cassandra", R"(\bcassandra\b)"},
        {"redis", R"(\bredis\b)"},          {"hdfs", R"(\bhdfs\b)"},
        {"s3", R"(\bs3\b)"},                {"console", R"(\bconsole\b)"},
        {"stdout", R"(\bstdout\b)"},        {"file", R"(\bfiles?\b)"},
    };
    return table;
}

std::optional<std::string> endpoint_in(std::string_view s) {
    for (const auto& [value, re] : endpoint_keywords()) {
        if (mentions(s, re)) return value;
    }
    return std::nullopt;
}

std::optional<milliseconds> duration_in(std::string_view s) {
    static const std::regex dur(
        R"((\d+(?:\.\d+)?)\s*-?\s*(milliseconds?|ms|seconds?|secs?|s|minutes?|mins?|m|hours?|hrs?|h)\b)", kIcase);
    std::string str(s);
    std::smatch m;
    if (!std::regex_search(str, m, dur)) return std::nullopt;
    double v = std::stod(m[1].str());
    auto unit = text::to_lower(m[2].str());
    double factor = 1000.0;
    if (unit == "ms" || unit.rfind("milli", 0) == 0) factor = 1.0;
    else if (unit == "m" || unit.rfind("min", 0) == 0) factor = 60'000.0;
    else if (unit == "h" || unit.rfind("h", 0) == 0) factor = 3'600'000.0;
    auto ms = static_cast<long long>(v * factor + 0.5);
    if (ms <= 0) return std::nullopt;
    return milliseconds{ms};
}

std::optional<std::string> quoted_after(std::string_view s, std::string_view keyword) {
    std::regex re(std::string(keyword) + R"(\s+["']?([^"'\s,)]+))", kIcase);
    std::string str(s);
    std::smatch m;
    if (std::regex_search(str, m, re)) return m[1].str();
    return std::nullopt;
}

std::optional<std::string> path_in(std::string_view s) {
    static const std::regex path(R"((?:^|\s)((?:/[\w.\-]+)+|[\w\-]+(?:/[\w.\-]+)*\.(?:txt|csv|json|jsonl|log|parquet|avro|out)))",
                                 kIcase);
    std::string str(s);
    std::smatch m;
    if (std::regex_search(str, m, path)) return m[1].str();
    return std::nullopt;
}

bool is_label(const Clause& c, std::initializer_list<std::string_view> names) {
    return std::any_of(names.begin(), names.end(), [&](std::string_view n) { return c.label.find(n) != std::string::npos; });
}

const std::vector<std::string>& operation_words() {
    static const std::vector<std::string> ops{"split",  "lowercase", "uppercase", "filter", "count",
                                              "aggregate", "join",   "reduce",    "deduplicate", "enrich",
                                              "parse",  "sum",       "average",   "sort",   "map"};
    return ops;
}

}  // namespace

bool PipelineParameters::empty() const { return *this == PipelineParameters{}; }

PipelineParameters extract_parameters_regex(std::string_view query) {
    PipelineParameters p;
    if (text::trim(query).empty()) return p;
    auto cs = clauses(query);
    std::string all(query);

    for (const auto& c : cs) {
        std::string full = c.label.empty() ? c.body : c.label + ": " + c.body;
        if (is_label(c, {"source", "input source"}) && !is_label(c, {"format"})) {
            if (!p.source_type) p.source_type = endpoint_in(c.body);
            if (!p.source_topic) p.source_topic = quoted_after(c.body, "topic");
        } else if (is_label(c, {"output", "sink", "destination"})) {
            if (!p.sink_type) p.sink_type = endpoint_in(c.body);
            if (!p.sink_path) p.sink_path = path_in(c.body);
        } else if (is_label(c, {"error", "failure"})) {
            if (!p.error_handling && !c.body.empty()) p.error_handling = c.body;
        }

        if (mentions(full, R"(checkpoint)")) {
            if (!p.checkpoint_interval) p.checkpoint_interval = duration_in(c.body);
        } else if (mentions(full, R"(window|aggregat)")) {
            if (!p.windowing) p.windowing = duration_in(c.body);
        }

        if (mentions(full, R"(parallel)")) {
            static const std::regex per_stage(R"((\d+)\s+for\s+(?:the\s+)?([A-Za-z][\w-]*))", kIcase);
            static const std::regex single(R"(parallelism(?:\s+(?:of|=|to))?\s*:?\s*(\d+)\b)", kIcase);
            std::map<std::string, int> degrees;
            for (auto it = std::sregex_iterator(c.body.begin(), c.body.end(), per_stage); it != std::sregex_iterator();
                 ++it) {
                int n = std::stoi((*it)[1].str());
                if (n >= 1) degrees[text::to_lower((*it)[2].str())] = n;
            }
            std::smatch m;
            if (degrees.empty() && std::regex_search(full, m, single)) {
                int n = std::stoi(m[1].str());
                if (n >= 1) degrees["default"] = n;
            }
            if (!degrees.empty() && !p.parallelism) p.parallelism = degrees;
        }
    }

    // Unlabelled phrasing: "from a Kafka topic", "write to a file".
    if (!p.source_type) {
        static const std::regex from(R"(\b(?:from|consume from|read from|reading from)\s+(?:an?\s+|the\s+)?(?:local\s+)?(\w+))",
                                     kIcase);
        std::smatch m;
        if (std::regex_search(all, m, from)) p.source_type = endpoint_in(m[1].str());
    }
    if (!p.sink_type) {
        static const std::regex to(R"(\b(?:to|into|write to|writes to|sink to)\s+(?:an?\s+|the\s+)?(?:local\s+)?(\w+))", kIcase);
        for (auto it = std::sregex_iterator(all.begin(), all.end(), to); it != std::sregex_iterator(); ++it) {
            if (auto e = endpoint_in((*it)[1].str()); e && e != p.source_type) {
                p.sink_type = e;
                break;
            }
        }
    }
    if (!p.error_handling && mentions(all, R"(dead[- ]letter)")) {
        static const std::regex dlq(R"(dead[- ]letter queue)", kIcase);
        std::smatch m;
        std::regex_search(all, m, dlq);
        p.error_handling = m[0].str();
    }

    if (mentions(all, R"(\bstream(ing)?\b)")) p.pipeline_type = "streaming";
    else if (mentions(all, R"(\bbatch\b)")) p.pipeline_type = "batch";

    for (const auto& op : operation_words()) {
        if (mentions(all, "\\b" + op)) p.operations.push_back(op);
    }

    for (auto s : all_systems) {
        if (mentions(all, "\\b" + to_string(s) + "\\b")) {
            p.target_system = s;
            break;
        }
    }
    return p;
}

json to_json(const PipelineParameters& p) {
    json j = json::object();
    auto put = [&j](const char* k, const std::optional<std::string>& v) {
        if (v) j[k] = *v;
    };
    put("source_type", p.source_type);
    put("source_topic", p.source_topic);
    put("sink_type", p.sink_type);
    put("sink_path", p.sink_path);
    put("pipeline_type", p.pipeline_type);
    put("error_handling", p.error_handling);
    if (!p.operations.empty()) j["operations"] = p.operations;
    if (p.windowing) j["windowing_ms"] = p.windowing->count();
    if (p.checkpoint_interval) j["checkpoint_interval_ms"] = p.checkpoint_interval->count();
    if (p.parallelism) j["parallelism"] = *p.parallelism;
    if (p.target_system) j["target_system"] = to_string(*p.target_system);
    return j;
}

namespace {

std::optional<milliseconds> duration_field(const json& j, const char* ms_key, const char* text_key) {
    try {
        if (auto it = j.find(ms_key); it != j.end() && it->is_number()) {
            auto v = it->get<double>();
            if (v > 0) return milliseconds{static_cast<long long>(v + 0.5)};
        }
        if (auto it = j.find(text_key); it != j.end() && it->is_string()) return parse_duration(it->get<std::string>());
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

}  // namespace

PipelineParameters parameters_from_json(const json& j) {
    PipelineParameters p;
    if (!j.is_object()) return p;
    auto str = [&j](const char* k) -> std::optional<std::string> {
        auto it = j.find(k);
        if (it != j.end() && it->is_string() && !text::trim(it->get<std::string>()).empty()) return it->get<std::string>();
        return std::nullopt;
    };
    p.source_type = str("source_type");
    p.source_topic = str("source_topic");
    p.sink_type = str("sink_type");
    p.sink_path = str("sink_path");
    p.pipeline_type = str("pipeline_type");
    p.error_handling = str("error_handling");
    if (auto it = j.find("operations"); it != j.end() && it->is_array()) {
        for (const auto& op : *it) {
            if (op.is_string()) p.operations.push_back(op.get<std::string>());
        }
    }
    p.windowing = duration_field(j, "windowing_ms", "windowing");
    p.checkpoint_interval = duration_field(j, "checkpoint_interval_ms", "checkpoint_interval");
    if (auto it = j.find("parallelism"); it != j.end() && it->is_object()) {
        std::map<std::string, int> m;
        for (const auto& [k, v] : it->items()) {
            if (v.is_number_integer() && v.get<long long>() >= 1 && v.get<long long>() <= 1'000'000) m[k] = v.get<int>();
        }
        if (!m.empty()) p.parallelism = m;
    }
    if (auto s = str("target_system")) {
        try {
            p.target_system = system_from_string(*s);
        } catch (const std::invalid_argument&) {
        }
    }
    return p;
}

std::string describe(const PipelineParameters& p) {
    std::string out;
    std::vector<std::string> missing;
    auto line = [&](const char* name, const std::optional<std::string>& v) {
        if (v) out += fmt::format("- {}: {}\n", name, *v);
        else missing.emplace_back(name);
    };
    line("source", p.source_type);
    line("source topic", p.source_topic);
    line("sink", p.sink_type);
    line("sink path", p.sink_path);
    line("pipeline type", p.pipeline_type);
    if (!p.operations.empty()) {
        std::string ops;
        for (const auto& o : p.operations) ops += (ops.empty() ? "" : ", ") + o;
        out += fmt::format("- operations: {}\n", ops);
    } else {
        missing.emplace_back("operations");
    }
    line("window", p.windowing ? std::optional(format_duration(*p.windowing)) : std::nullopt);
    if (p.parallelism) {
        std::string par;
        for (const auto& [k, v] : *p.parallelism) par += fmt::format("{}{}={}", par.empty() ? "" : ", ", k, v);
        out += fmt::format("- parallelism: {}\n", par);
    } else {
        missing.emplace_back("parallelism");
    }
    line("checkpoint interval",
         p.checkpoint_interval ? std::optional(format_duration(*p.checkpoint_interval)) : std::nullopt);
    line("error handling", p.error_handling);
    if (!missing.empty()) {
        std::string m;
        for (const auto& x : missing) m += (m.empty() ? "" : ", ") + x;
        out += fmt::format("- not specified: {}\n", m);
    }
    return out;
}

providers::ChatRequest parameters_request(std::string_view query, const QueryIntent& intent,
                                          const PipelineParameters& known) {
    providers::ChatRequest req;
    req.task = "params";
    req.system_text =
        "Extract stream pipeline parameters from a request. Answer with a single JSON object and nothing else, "
        "using only these optional keys: source_type, source_topic, sink_type, sink_path, pipeline_type, "
        "operations (array of strings), windowing_ms, checkpoint_interval_ms, parallelism (object of stage -> "
        "integer), error_handling, target_system. Omit anything the request does not imply.";
    req.user_text = fmt::format("Intent: {}\nRequest:\n{}\nAlready extracted:\n{}", to_string(intent.category), query,
                                to_json(known).dump());
    req.max_tokens = 512;
    req.temperature = 0.0;
    return req;
}

PipelineParameters extract_parameters(std::string_view query, const QueryIntent& intent,
                                      exec::RetryHandler& handler) {
    auto p = extract_parameters_regex(query);
    if (text::trim(query).empty()) return p;
    try {
        std::optional<PipelineParameters> inferred;
        auto outcome = handler.call(
            parameters_request(query, intent, p),
            [&inferred](const providers::ChatResponse& r) { inferred = parameters_from_json(parse_json_reply(r.content)); },
            "params");
        if (!outcome.response || !inferred) {
            spdlog::warn("parameter inference unavailable; keeping the {} fields stated in the query",
                         to_json(p).size());
            return p;
        }
        auto fill = [](auto& mine, const auto& theirs) {
            if (!mine && theirs) mine = theirs;
        };
        fill(p.source_type, inferred->source_type);
        fill(p.source_topic, inferred->source_topic);
        fill(p.sink_type, inferred->sink_type);
        fill(p.sink_path, inferred->sink_path);
        fill(p.pipeline_type, inferred->pipeline_type);
        fill(p.windowing, inferred->windowing);
        fill(p.parallelism, inferred->parallelism);
        fill(p.checkpoint_interval, inferred->checkpoint_interval);
        fill(p.error_handling, inferred->error_handling);
        fill(p.target_system, inferred->target_system);
        if (p.operations.empty()) p.operations = inferred->operations;
    } catch (const std::exception& e) {
        spdlog::warn("parameter inference failed: {}", e.what());
    }
    return p;
}

}  // namespace pipegen::query
