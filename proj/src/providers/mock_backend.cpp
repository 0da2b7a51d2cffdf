#include "pipegen/providers/mock_backend.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "pipegen/common/text.hpp"

namespace pipegen::providers {
namespace {

std::string line_value(std::string_view text, std::string_view key) {
    auto pos = text.find(key);
    if (pos == std::string_view::npos) return {};
    auto start = pos + key.size();
    auto end = text.find('\n', start);
    return text::trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
}

std::string leading_tokens(std::string_view text, std::size_t n) {
    auto toks = text::tokenize(text);
    std::string out;
    for (std::size_t i = 0; i < toks.size() && i < n; ++i) {
        if (!out.empty()) out += ' ';
        out += toks[i];
    }
    return out;
}

std::string target_system(const ChatRequest& r) {
    auto sys = text::to_lower(line_value(r.system_text, "Target system:"));
    if (sys.find("storm") != std::string::npos) return "storm";
    if (sys.find("spark") != std::string::npos) return "spark";
    return "flink";
}

std::string pipeline_code(const std::string& system) {
    if (system == "storm") {
        return R"(```java
public class StreamingTopology {
    public static void main(String[] args) throws Exception {
        org.apache.storm.topology.TopologyBuilder builder = new org.apache.storm.topology.TopologyBuilder();
        builder.setSpout("source", new SourceSpout(), 4);
        builder.setBolt("process", new ProcessBolt(), 8).shuffleGrouping("source");
        builder.setBolt("sink", new SinkBolt(), 2).fieldsGrouping("process", new org.apache.storm.tuple.Fields("word"));
        org.apache.storm.StormSubmitter.submitTopology("streaming-topology", new org.apache.storm.Config(), builder.createTopology());
    }
}
```)";
    }
    if (system == "spark") {
        return R"(```java
public class StreamingJob {
    public static void main(String[] args) throws Exception {
        org.apache.spark.sql.SparkSession spark = org.apache.spark.sql.SparkSession.builder().appName("streaming-job").getOrCreate();
        spark.readStream().format("kafka").load()
             .writeStream().format("text").option("checkpointLocation", "/tmp/checkpoints").start()
             .awaitTermination();
    }
}
```)";
    }
    return R"(```java
public class StreamingJob {
    public static void main(String[] args) throws Exception {
        final org.apache.flink.streaming.api.environment.StreamExecutionEnvironment env =
            org.apache.flink.streaming.api.environment.StreamExecutionEnvironment.getExecutionEnvironment();
        env.enableCheckpointing(10_000);
        env.fromSource(KafkaSources.text("input-text"), WatermarkStrategy.noWatermarks(), "source").setParallelism(4)
           .flatMap(new Tokenizer()).setParallelism(8)
           .keyBy(value -> value.f0)
           .window(TumblingProcessingTimeWindows.of(Time.seconds(30)))
           .sum(1)
           .sinkTo(FileSinks.text("/output/word-counts.txt")).setParallelism(2);
        env.execute("streaming-job");
    }
}
```)";
}

}  // namespace

std::string auto_reply(const ChatRequest& r) {
    const std::string& task = r.task;
    if (task == "intent") {
        auto q = text::to_lower(r.user_text);
        std::string category = "other";
        if (q.find("explain") != std::string::npos || q.find("what is") != std::string::npos) {
            category = "explanation";
        } else if (q.find("deploy") != std::string::npos) {
            category = "deployment";
        } else if (q.find("optimi") != std::string::npos) {
            category = "optimization";
        } else if (q.find("pipeline") != std::string::npos || q.find("stream") != std::string::npos) {
            category = "pipeline_design";
        }
        return fmt::format(R"({{"category": "{}", "confidence": 0.6}})", category);
    }
    if (task == "params") {
        return "{}";
    }
    if (task.rfind("hgot:generate:", 0) == 0) {
        auto vtype = task.substr(std::string_view("hgot:generate:").size());
        auto aspect = line_value(r.user_text, "Aspect:");
        auto context = line_value(r.user_text, "Context:");
        return fmt::format("{} on {}: {}", vtype, aspect.empty() ? "general" : aspect, leading_tokens(context, 16));
    }
    if (task == "hgot:refine") {
        auto thought = line_value(r.user_text, "Thought:");
        return fmt::format("refined {} keeping checkpoint interval, window size and parallelism consistent",
                           leading_tokens(thought, 20));
    }
    if (task.rfind("step:", 0) == 0) {
        auto action = task.substr(5);
        auto system = target_system(r);
        if (action == "generate_pipeline") {
            return fmt::format("Implementation for the {} pipeline.\n\n{}\n", system, pipeline_code(system));
        }
        return fmt::format("{} for the {} pipeline: {}", action, system,
                           leading_tokens(line_value(r.user_text, "Query:"), 24));
    }
    return fmt::format("ack {}", task);
}

MockBackend::MockBackend(std::vector<MockReply> script, bool auto_when_exhausted)
    : script_(script.begin(), script.end()), auto_(auto_when_exhausted) {}

std::shared_ptr<MockBackend> MockBackend::from_json(const nlohmann::json& doc) {
    std::vector<MockReply> script;
    if (doc.contains("responses")) {
        for (const auto& item : doc.at("responses")) {
            if (item.is_string()) {
                script.push_back(MockReply::ok(item.get<std::string>()));
            } else if (item.is_object() && item.contains("error")) {
                script.push_back(MockReply::fail(error_kind_from_string(item.at("error").get<std::string>()),
                                                 item.value("detail", std::string("scripted"))));
            } else {
                throw std::invalid_argument("mock script responses must be strings or {\"error\": kind}");
            }
        }
    }
    auto mock = std::make_shared<MockBackend>(std::move(script), doc.value("auto", !doc.contains("responses")));
    if (doc.contains("errors")) {
        for (const auto& e : doc.at("errors")) {
            mock->injected_errors_[e.at("call").get<std::size_t>()] =
                MockReply::fail(error_kind_from_string(e.at("kind").get<std::string>()),
                                e.value("detail", std::string("scripted")));
        }
    }
    return mock;
}

std::shared_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open mock script {}", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(nlohmann::json::parse(ss.str()));
}

ChatResponse MockBackend::complete(const ModelHandle& model, const ChatRequest& request) {
    std::lock_guard lock(mu_);
    TranscriptEntry entry{calls_, model.name(), request.task, std::nullopt, std::nullopt};
    std::size_t call = calls_++;

    MockReply reply;
    if (auto it = injected_errors_.find(call); it != injected_errors_.end()) {
        reply = it->second;
    } else if (!script_.empty()) {
        reply = std::move(script_.front());
        script_.pop_front();
    } else if (auto_) {
        reply = MockReply::ok(auto_reply(request));
    } else {
        reply = MockReply::fail(ErrorKind::fatal, "mock script exhausted");
    }

    if (reply.error) {
        entry.error = reply.error;
        transcript_.push_back(entry);
        throw ProviderError(*reply.error, reply.detail.empty() ? "scripted" : reply.detail);
    }
    entry.text = reply.text;
    transcript_.push_back(entry);
    return ChatResponse{*reply.text, "stop", model.name()};
}

std::size_t MockBackend::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

std::vector<TranscriptEntry> MockBackend::transcript() const {
    std::lock_guard lock(mu_);
    return transcript_;
}

}  // namespace pipegen::providers
