#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>

#include <json.hpp>

#include "fixtures.hpp"
#include "pipegen/common/canonical_json.hpp"
#include "pipegen/pipeline/run.hpp"
#include "pipegen/providers/mock_backend.hpp"

using namespace pipegen;
namespace fs = std::filesystem;

namespace {

std::string wordcount_query() {
    return fixture::read_file(fs::path(PIPEGEN_FIXTURES) / "queries/wordcount.txt");
}

struct Offline {
    providers::BackendRegistry registry;
    exec::VirtualClock clock;
    exec::EventLog log{&clock};
    std::shared_ptr<providers::MockBackend> mock;

    explicit Offline(std::vector<providers::MockReply> script = {}, bool auto_reply = true)
        : mock(std::make_shared<providers::MockBackend>(std::move(script), auto_reply)) {
        registry.set_default(mock);
    }
    pipeline::RunServices services(const knowledge::KnowledgeIndex* index = nullptr) {
        return {registry, embed::make_hashing_encoder(0), clock, &log, index, nullptr};
    }
};

pipeline::RunConfig config(const fs::path& out, std::string query) {
    pipeline::RunConfig cfg;
    cfg.query = std::move(query);
    cfg.output_dir = out;
    cfg.models = {providers::parse_model_spec("mock:planner:planning", providers::ModelRole::primary),
                  providers::parse_model_spec("mock:coder:codegen", providers::ModelRole::primary)};
    return cfg;
}

std::set<std::string> vtypes(const fs::path& graph_file) {
    auto doc = read_json_file(graph_file);
    std::set<std::string> out;
    for (const auto& v : doc.at("vertices")) out.insert(v.at("vtype").get<std::string>());
    return out;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("offline run produces the full bundle") {
    auto dir = fixture::fresh_dir("run");
    Offline env;
    auto out = pipeline::run_pipeline(config(dir / "b", wordcount_query()), env.services());
    CHECK(out.intent.category == query::IntentCategory::pipeline_design);
    CHECK(out.bundle.step_files.size() == 6);
    CHECK(out.bundle.code_files.size() >= 1);
    for (const auto& r : out.results) CHECK_FALSE(r.fallback);
    auto types = vtypes(out.bundle.graph_file);
    for (auto t : {"system", "user", "analysis", "plan"}) CHECK(types.count(t) == 1);
    CHECK(fs::exists(out.bundle.summary_file));
    CHECK(fs::exists(out.bundle.root_dir / "memory.jsonl"));
    CHECK(out.params.source_type == "kafka");
    CHECK(env.log.events_of("plan").size() + env.log.events_of("note").size() >= 1);
}

TEST_CASE("identical runs produce identical summaries") {
    auto dir = fixture::fresh_dir("repeat");
    std::string a, b;
    {
        Offline env;
        a = fixture::read_file(pipeline::run_pipeline(config(dir / "a", wordcount_query()), env.services()).bundle.summary_file);
    }
    {
        Offline env;
        b = fixture::read_file(pipeline::run_pipeline(config(dir / "b", wordcount_query()), env.services()).bundle.summary_file);
    }
    CHECK(a == b);
}

TEST_CASE("retrieval adds rag vertices") {
    auto dir = fixture::fresh_dir("rag");
    knowledge::IngestEnv ienv;
    ienv.encoder = embed::make_hashing_encoder(0);
    auto index = knowledge::ingest({(fs::path(PIPEGEN_FIXTURES) / "corpus").string()}, knowledge::IngestConfig{}, ienv);
    Offline env;
    auto cfg = config(dir / "b", wordcount_query());
    cfg.use_rag = true;
    auto out = pipeline::run_pipeline(cfg, env.services(&index));
    CHECK(!out.rag_docs.empty());
    CHECK(vtypes(out.bundle.graph_file).count("rag") == 1);
    cfg.output_dir = dir / "c";
    CHECK_THROWS_AS(pipeline::run_pipeline(cfg, env.services()), std::invalid_argument);
}

TEST_CASE("a dead provider still yields a complete bundle of fallbacks") {
    auto dir = fixture::fresh_dir("dead");
    Offline env({}, false);  // every call fails: script empty, no auto replies
    auto cfg = config(dir / "b", "Create a streaming pipeline that counts words");
    auto out = pipeline::run_pipeline(cfg, env.services());
    CHECK(out.bundle.step_files.size() == 6);
    for (const auto& r : out.results) CHECK(r.fallback);
    CHECK(out.bundle.code_files.empty());
    CHECK(out.response.find("Degraded result") != std::string::npos);
}

TEST_CASE("an explanation request runs two steps") {
    auto dir = fixture::fresh_dir("explain");
    Offline env;
    auto out = pipeline::run_pipeline(config(dir / "b", "Explain how checkpointing works"), env.services());
    CHECK(out.plan.steps.size() == 2);
    CHECK(out.bundle.step_files.size() == 2);
}

TEST_CASE("step prompts carry the target system and the query") {
    auto plan = query::create_execution_plan("count words\nplease", {}, TargetSystem::storm, false);
    query::QueryIntent intent;
    query::PipelineParameters params;
    hgot::PipelineDesign design;
    std::vector<knowledge::DocumentChunk> docs;
    pipeline::StepContext ctx{plan, intent, params, design, docs};
    auto r = pipeline::step_prompt(ctx, plan.steps[0], {});
    CHECK(r.task == "step:analyze_complexity");
    CHECK(r.system_text.find("Target system: storm") != std::string::npos);
    CHECK(r.user_text.rfind("Query: count words please", 0) == 0);
    CHECK(pipeline::system_constraints(TargetSystem::spark, params).rfind("Target system: spark", 0) == 0);
}

TEST_CASE("run config validation") {
    pipeline::RunConfig cfg;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // no query, no models, no output
    auto ok = config("/tmp/x", "q");
    CHECK_NOTHROW(ok.validate());
    ok.workers = 0;
    CHECK_THROWS_AS(ok.validate(), std::invalid_argument);
}

}  // TEST_SUITE
