// pipegen: generate stream pipelines, ingest reference corpora, score generated bundles.
//
// Exit codes: 0 success (including runs that fell back), 1 I/O or configuration error,
// 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "pipegen/common/canonical_json.hpp"
#include "pipegen/common/units.hpp"
#include "pipegen/efs/checker.hpp"
#include "pipegen/knowledge/index.hpp"
#include "pipegen/pipeline/run.hpp"
#include "pipegen/providers/mock_backend.hpp"
#include "pipegen/providers/openai_backend.hpp"

namespace fs = std::filesystem;
using namespace pipegen;

namespace {

constexpr int kOk = 0;
constexpr int kIoConfig = 1;
constexpr int kUsage = 2;

struct GenerateArgs {
    std::string query;
    std::string query_file;
    std::string system = "flink";
    bool use_rag = false;
    std::vector<std::string> corpus;
    std::string index;
    std::vector<std::string> models;
    std::vector<std::string> backup_models;
    std::uint64_t seed = 0;
    bool offline = false;
    std::string mock_script;
    std::string output_dir;
    int workers = 1;
    std::string base_delay = "1s";
    int max_retries = 5;
    int max_iterations = 3;
    std::size_t rag_k = 3;
    std::string events;
    std::string memory_file;
    std::string intent_patterns;
    std::string embedding_model;
    std::size_t embedding_dim = 1536;
    bool quiet = false;
};

struct IngestArgs {
    std::vector<std::string> sources;
    std::size_t chunk_size = 2000;
    std::string max_file_size = "1MiB";
    std::vector<std::string> extensions;
    std::vector<std::string> systems;
    bool offline = false;
    std::string index_out;
    std::string clone_dir;
    std::uint64_t seed = 0;
};

struct ScoreArgs {
    std::string bundle;
    std::string adapters;
    std::string json_out;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot read {}", p.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

knowledge::IngestConfig ingest_config(std::size_t chunk_size, const std::string& max_size,
                                      const std::vector<std::string>& exts, const std::vector<std::string>& systems,
                                      bool offline) {
    knowledge::IngestConfig cfg;
    cfg.chunk_size = chunk_size;
    cfg.max_file_size = parse_size(max_size);
    if (!exts.empty()) {
        cfg.allowed_extensions.clear();
        for (auto e : exts) cfg.allowed_extensions.insert(e.front() == '.' ? e : "." + e);
    }
    if (!systems.empty()) {
        cfg.target_systems.clear();
        for (const auto& s : systems) cfg.target_systems.insert(system_from_string(s));
    }
    cfg.offline = offline;
    cfg.validate();
    return cfg;
}

void attach_progress(exec::EventLog& log, bool quiet, std::ofstream* events_out) {
    if (events_out) {
        log.add_listener([events_out](const std::string& line) { *events_out << line << '\n' << std::flush; });
    }
    if (quiet) return;
    log.add_listener([](const std::string& line) {
        auto ev = nlohmann::json::parse(line);
        auto type = ev.value("event", "");
        if (type == "step_start") {
            std::cerr << fmt::format("[step {}] {} ...\n", ev["step"].get<int>(), ev["action"].get<std::string>());
        } else if (type == "step_complete") {
            std::cerr << fmt::format("[step {}] {} {} ({} attempt{})\n", ev["step"].get<int>(),
                                     ev["action"].get<std::string>(), ev["fallback"].get<bool>() ? "FALLBACK" : "done",
                                     ev["attempts"].get<int>(), ev["attempts"].get<int>() == 1 ? "" : "s");
        } else if (type == "sleep") {
            std::cerr << fmt::format("  {}: rate limited, backing off {:.0f} ms\n", ev["scope"].get<std::string>(),
                                     ev["delay_ms"].get<double>());
        } else if (type == "rotate") {
            std::cerr << fmt::format("  {}: {} -> switching to model #{}\n", ev["scope"].get<std::string>(),
                                     ev["reason"].get<std::string>(), ev["to"].get<std::size_t>());
        }
    });
}

int cmd_generate(const GenerateArgs& a) {
    if (a.query.empty() == a.query_file.empty()) throw UsageError("give exactly one of --query or --query-file");
    std::string query = a.query.empty() ? read_text(a.query_file) : a.query;
    if (query.find_first_not_of(" \t\r\n") == std::string::npos) throw UsageError("the query is empty");

    pipeline::RunConfig cfg;
    cfg.query = query;
    cfg.system = system_from_string(a.system);
    cfg.use_rag = a.use_rag;
    cfg.rag_k = a.rag_k;
    cfg.seed = a.seed;
    cfg.base_delay = exec::Millis(static_cast<double>(parse_duration(a.base_delay).count()));
    cfg.max_retries = a.max_retries;
    cfg.workers = a.workers;
    cfg.output_dir = a.output_dir;
    cfg.memory_file = a.memory_file;
    cfg.hgot.max_iterations = a.max_iterations;

    const bool use_mock = a.offline || !a.mock_script.empty();
    auto models = a.models;
    if (models.empty()) {
        models = use_mock ? std::vector<std::string>{"mock:planner:planning", "mock:coder:codegen"}
                          : std::vector<std::string>{"openai:gpt-4o-mini:planning+codegen"};
    }
    for (const auto& m : models) cfg.models.push_back(providers::parse_model_spec(m, providers::ModelRole::primary));
    for (const auto& m : a.backup_models) {
        cfg.backup_models.push_back(providers::parse_model_spec(m, providers::ModelRole::backup));
    }

    providers::BackendRegistry registry;
    if (use_mock) {
        std::shared_ptr<providers::MockBackend> mock =
            a.mock_script.empty() ? std::make_shared<providers::MockBackend>(std::vector<providers::MockReply>{}, true)
                                  : providers::MockBackend::from_file(a.mock_script);
        registry.set_default(mock);
    } else {
        std::set<std::string> providers_seen;
        for (const auto& m : cfg.models) providers_seen.insert(m.provider_id);
        for (const auto& m : cfg.backup_models) providers_seen.insert(m.provider_id);
        for (const auto& p : providers_seen) {
            if (p == "mock") {
                registry.add(p, std::make_shared<providers::MockBackend>(std::vector<providers::MockReply>{}, true));
            } else {
                registry.add(p, std::make_shared<providers::OpenAICompatBackend>(providers::endpoint_from_env(p)));
            }
        }
    }

    std::shared_ptr<const embed::Encoder> encoder = embed::make_hashing_encoder(a.seed);
    if (!a.embedding_model.empty()) {
        if (a.offline) throw std::invalid_argument("--embedding-model needs network access; drop --offline");
        auto spec = providers::parse_model_spec(a.embedding_model, providers::ModelRole::primary);
        encoder = std::make_shared<providers::HttpEmbeddingEncoder>(providers::endpoint_from_env(spec.provider_id),
                                                                    spec.model_id, a.embedding_dim);
    }

    std::optional<knowledge::KnowledgeIndex> index;
    if (a.use_rag) {
        if (!a.index.empty()) {
            index = knowledge::load_index(a.index);
        } else if (!a.corpus.empty()) {
            for (const auto& c : a.corpus) {
                if (!knowledge::is_remote_source(c) && !fs::exists(c)) {
                    throw std::runtime_error(fmt::format("corpus path {} does not exist", c));
                }
            }
            auto icfg = ingest_config(2000, "1MiB", {}, {}, a.offline);
            knowledge::IngestEnv env{encoder, exec::RetryPolicy{}, nullptr, knowledge::git_clone};
            index = knowledge::ingest(a.corpus, icfg, env);
        } else {
            throw UsageError("--use-rag needs --corpus or --index");
        }
    }

    std::optional<query::IntentPatterns> patterns;
    if (!a.intent_patterns.empty()) patterns = query::IntentPatterns::load(a.intent_patterns);

    std::unique_ptr<exec::Clock> clock;
    if (use_mock) clock = std::make_unique<exec::VirtualClock>();
    else clock = std::make_unique<exec::SystemClock>();

    exec::EventLog log(clock.get());
    std::optional<std::ofstream> events_out;
    if (!a.events.empty()) {
        events_out.emplace(a.events, std::ios::binary | std::ios::trunc);
        if (!*events_out) throw std::runtime_error(fmt::format("cannot write event log {}", a.events));
    }
    attach_progress(log, a.quiet, events_out ? &*events_out : nullptr);

    pipeline::RunServices services{registry, encoder, *clock, &log, index ? &*index : nullptr,
                                   patterns ? &*patterns : nullptr};
    auto out = pipeline::run_pipeline(cfg, services);

    std::size_t fallbacks = 0;
    for (const auto& r : out.results) fallbacks += r.fallback ? 1 : 0;
    std::cout << fmt::format("intent: {} ({:.2f})\n", query::to_string(out.intent.category), out.intent.confidence);
    std::cout << fmt::format("bundle: {}\n", out.bundle.root_dir.string());
    std::cout << fmt::format("steps: {} ({} fallback)\n", out.bundle.step_files.size(), fallbacks);
    std::cout << fmt::format("code files: {}\n", out.bundle.code_files.size());
    std::cout << fmt::format("summary: {}\n", out.bundle.summary_file.string());
    return kOk;
}

int cmd_ingest(const IngestArgs& a) {
    for (const auto& s : a.sources) {
        if (!knowledge::is_remote_source(s) && !fs::exists(s)) {
            throw std::runtime_error(fmt::format("source {} does not exist", s));
        }
    }
    auto cfg = ingest_config(a.chunk_size, a.max_file_size, a.extensions, a.systems, a.offline);
    cfg.clone_dir = a.clone_dir;
    knowledge::IngestEnv env{embed::make_hashing_encoder(a.seed), exec::RetryPolicy{}, nullptr, knowledge::git_clone};
    exec::SystemClock clock;
    env.clock = &clock;
    auto index = knowledge::ingest(a.sources, cfg, env);

    fs::path out = a.index_out;
    if (out.empty()) {
        out = (a.sources.size() == 1 && fs::is_directory(a.sources.front()))
                  ? fs::path(a.sources.front()) / "pipegen-index.json"
                  : fs::path("pipegen-index.json");
    }
    knowledge::save_index(index, out);

    std::cout << fmt::format("chunks: {}\n", index.chunks.size());
    std::cout << fmt::format("skipped: {}\n", index.skipped.size());
    for (const auto& s : index.skipped) std::cout << fmt::format("  skip {}: {}\n", s.path, s.reason);
    for (const auto& [sys, ids] : index.by_system) std::cout << fmt::format("{}: {} chunks\n", to_string(sys), ids.size());
    std::cout << fmt::format("index: {}\n", out.string());
    return kOk;
}

int cmd_score(const ScoreArgs& a) {
    if (!fs::is_directory(a.bundle)) throw std::runtime_error(fmt::format("bundle {} does not exist", a.bundle));
    auto cfg = efs::load_score_config(a.adapters);
    auto entry = efs::check(a.bundle, cfg);
    auto report = efs::EFSReport::build({entry});
    std::cout << efs::render_table(report);
    if (!a.json_out.empty()) write_canonical_json(a.json_out, efs::to_json(report));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    auto logger = spdlog::stderr_logger_mt("pipegen");
    logger->set_pattern("%l: %v");
    spdlog::set_default_logger(logger);

    CLI::App app{"Generate stream processing pipelines with a hypergraph-of-thoughts planner"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    GenerateArgs g;
    auto* gen = app.add_subcommand("generate", "Run the full generation flow and write an artifact bundle");
    gen->add_option("-q,--query", g.query, "Natural-language request");
    gen->add_option("--query-file", g.query_file, "Read the request from a file")->check(CLI::ExistingFile);
    gen->add_option("-s,--system", g.system, "Target engine")
        ->check(CLI::IsMember({"flink", "storm", "spark"}, CLI::ignore_case))
        ->capture_default_str();
    gen->add_flag("--use-rag", g.use_rag, "Retrieve reference chunks into the thought graph");
    gen->add_option("--corpus", g.corpus, "Corpus directories or git URLs to ingest for retrieval");
    gen->add_option("--index", g.index, "Previously saved knowledge index")->check(CLI::ExistingFile);
    gen->add_option("-m,--model", g.models, "Primary model, provider:model[:cap+cap] (repeatable, in order)");
    gen->add_option("--backup-model", g.backup_models, "Backup model, tried after all primaries (repeatable)");
    gen->add_option("--seed", g.seed, "Seed for embeddings and retry jitter")->capture_default_str();
    gen->add_flag("--offline", g.offline, "No network: mock provider, simulated clock");
    gen->add_option("--mock-script", g.mock_script, "Scripted mock replies (JSON)")->check(CLI::ExistingFile);
    gen->add_option("-o,--output-dir", g.output_dir, "Bundle directory")->required();
    gen->add_option("--workers", g.workers, "Concurrent plan steps")->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--base-delay", g.base_delay, "Backoff base delay, e.g. 500ms, 1s")->capture_default_str();
    gen->add_option("--max-retries", g.max_retries, "Attempts per provider call")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen->add_option("--max-iterations", g.max_iterations, "Hypergraph construction iterations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen->add_option("--rag-k", g.rag_k, "Chunks retrieved per query")->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--events", g.events, "Write the JSONL event log here");
    gen->add_option("--memory-file", g.memory_file, "Interaction memory store (default: <bundle>/memory.jsonl)");
    gen->add_option("--intent-patterns", g.intent_patterns, "Replacement intent pattern table")
        ->check(CLI::ExistingFile);
    gen->add_option("--embedding-model", g.embedding_model, "Remote embedding model, provider:model");
    gen->add_option("--embedding-dim", g.embedding_dim, "Dimension of the remote embeddings")->capture_default_str();
    gen->add_flag("--quiet", g.quiet, "No progress output");

    IngestArgs in;
    auto* ing = app.add_subcommand("ingest", "Index local directories or git repositories for retrieval");
    ing->add_option("sources", in.sources, "Directories, files or git URLs")->required();
    ing->add_option("--chunk-size", in.chunk_size, "Characters per chunk")->check(CLI::PositiveNumber)->capture_default_str();
    ing->add_option("--max-file-size", in.max_file_size, "Skip larger files, e.g. 512KiB")->capture_default_str();
    ing->add_option("--ext", in.extensions, "Allowed extension (repeatable; replaces the defaults)");
    ing->add_option("--system", in.systems, "Target system to index for (repeatable)")
        ->check(CLI::IsMember({"flink", "storm", "spark"}, CLI::ignore_case));
    ing->add_flag("--offline", in.offline, "Ignore git URLs");
    ing->add_option("--index-out", in.index_out, "Where to write the index");
    ing->add_option("--clone-dir", in.clone_dir, "Where git sources are cloned");
    ing->add_option("--seed", in.seed, "Embedding seed")->capture_default_str();

    ScoreArgs sc;
    auto* score = app.add_subcommand("score", "Count errors in a bundle's code and report the error-free score");
    score->add_option("bundle", sc.bundle, "Bundle directory")->required();
    score->add_option("--adapters", sc.adapters, "Checker configuration (JSON)")->required();
    score->add_option("--json", sc.json_out, "Also write the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*gen) return cmd_generate(g);
        if (*ing) return cmd_ingest(in);
        if (*score) return cmd_score(sc);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << gen->help();
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoConfig;
    }
    return kUsage;
}
