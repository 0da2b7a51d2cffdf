#include "pipegen/knowledge/index.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include <fmt/format.h>

#include "pipegen/common/canonical_json.hpp"
#include "pipegen/common/text.hpp"
#include "pipegen/hgot/construction.hpp"
#include "pipegen/knowledge/checksum.hpp"

namespace pipegen::knowledge {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(ComponentTag t) {
    switch (t) {
    case ComponentTag::source: return "SO";
    case ComponentTag::op: return "OP";
    case ComponentTag::sink: return "SI";
    case ComponentTag::doc: return "doc";
    case ComponentTag::other: return "other";
    }
    return "other";
}

ComponentTag tag_from_string(std::string_view s) {
    for (auto t : {ComponentTag::source, ComponentTag::op, ComponentTag::sink, ComponentTag::doc, ComponentTag::other}) {
        if (to_string(t) == s) return t;
    }
    throw std::invalid_argument(fmt::format("unknown component tag '{}'", s));
}

namespace {

// Path words, split on separators and camelCase humps, lowercased.
std::set<std::string> path_words(const fs::path& path) {
    std::set<std::string> words;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) words.insert(text::to_lower(cur));
        cur.clear();
    };
    auto s = path.generic_string();
    for (std::size_t i = 0; i < s.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (!std::isalnum(c)) {
            flush();
            continue;
        }
        if (std::isupper(c) && !cur.empty() && std::islower(static_cast<unsigned char>(cur.back()))) flush();
        cur.push_back(static_cast<char>(c));
    }
    flush();
    return words;
}

bool any_word(const std::set<std::string>& words, std::initializer_list<const char*> wanted) {
    return std::any_of(wanted.begin(), wanted.end(), [&](const char* w) { return words.count(w) != 0; });
}

std::size_t count_hits(std::string_view content, std::initializer_list<std::string_view> needles) {
    std::size_t n = 0;
    for (auto needle : needles) {
        for (auto pos = content.find(needle); pos != std::string_view::npos; pos = content.find(needle, pos + 1)) ++n;
    }
    return n;
}

}  // namespace

ComponentTag tag_component(const fs::path& path, std::string_view content) {
    auto words = path_words(path);
    if (any_word(words, {"source", "sources", "connector", "connectors"})) return ComponentTag::source;
    if (any_word(words, {"sink", "sinks"})) return ComponentTag::sink;
    if (any_word(words, {"operator", "operators", "process", "processor", "processors", "processing", "transform",
                         "transforms", "transformer", "transformation", "transformations"})) {
        return ComponentTag::op;
    }
    auto ext = text::to_lower(path.extension().string());
    if (ext == ".md" || ext == ".rst" || ext == ".txt") return ComponentTag::doc;

    auto so = count_hits(content, {"SourceFunction", "addSource", "fromSource", "KafkaSource", "BaseRichSpout",
                                   "readStream", "socketTextStream", "nextTuple"});
    auto si = count_hits(content, {"SinkFunction", "addSink", "sinkTo", "writeStream", "FileSink", "KafkaSink",
                                   "writeAsText"});
    auto op = count_hits(content, {"flatMap", "keyBy", ".window(", "ProcessFunction", "MapFunction", "BaseRichBolt",
                                   "BaseBasicBolt", "reduceByKey", ".map(", ".filter("});
    if (so == 0 && si == 0 && op == 0) return ComponentTag::other;
    if (so >= si && so >= op) return ComponentTag::source;
    if (si >= op) return ComponentTag::sink;
    return ComponentTag::op;
}

std::set<TargetSystem> detect_systems(const fs::path& path, std::string_view content,
                                      const std::set<TargetSystem>& allowed) {
    std::set<TargetSystem> found;
    auto hay = text::to_lower(path.generic_string()) + "\n" + text::to_lower(content);
    for (auto s : allowed) {
        std::regex re("(^|[^a-z])" + to_string(s) + "([^a-z]|$)");
        if (std::regex_search(hay, re)) found.insert(s);
    }
    return found;
}

std::optional<std::string> detect_spe_version(std::string_view content) {
    static const std::regex re(R"((flink|storm|spark)[^\n\d]{0,24}?(\d+\.\d+(?:\.\d+)?))", std::regex::icase);
    std::string s(content);
    std::smatch m;
    if (std::regex_search(s, m, re)) return m[2].str();
    return std::nullopt;
}

void IngestConfig::validate() const {
    if (max_file_size == 0) throw std::invalid_argument("max_file_size must be positive");
    if (chunk_size == 0) throw std::invalid_argument("chunk_size must be positive");
    if (target_systems.empty()) throw std::invalid_argument("at least one target system is required");
}

std::string KnowledgeIndex::fingerprint() const {
    std::string all;
    for (const auto& c : chunks) all += c.checksum;
    return sha256_hex(all);
}

void KnowledgeIndex::validate() const {
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (chunks[i].id != i) throw std::runtime_error(fmt::format("chunk at position {} has id {}", i, chunks[i].id));
    }
    for (const auto& [sys, ids] : by_system) {
        for (auto id : ids) {
            if (id >= chunks.size()) {
                throw std::runtime_error(fmt::format("index lists missing chunk {} under {}", id, to_string(sys)));
            }
        }
    }
}

json to_json(const KnowledgeIndex& index) {
    json chunks = json::array();
    for (const auto& c : index.chunks) {
        json systems = json::array();
        for (auto s : c.systems) systems.push_back(to_string(s));
        json j{{"id", c.id},
               {"content", c.content},
               {"source_path", c.source_path},
               {"component_tag", to_string(c.component_tag)},
               {"checksum", c.checksum},
               {"systems", systems},
               {"embedding", std::vector<double>(c.embedding.values().begin(), c.embedding.values().end())}};
        if (c.spe_version) j["spe_version"] = *c.spe_version;
        chunks.push_back(std::move(j));
    }
    json by_system = json::object();
    for (const auto& [sys, ids] : index.by_system) by_system[to_string(sys)] = ids;
    json skipped = json::array();
    for (const auto& s : index.skipped) skipped.push_back({{"path", s.path}, {"reason", s.reason}});
    return {{"format", "pipegen-knowledge-index/1"},
            {"fingerprint", index.fingerprint()},
            {"chunks", chunks},
            {"by_system", by_system},
            {"skipped", skipped}};
}

KnowledgeIndex index_from_json(const json& doc) {
    KnowledgeIndex index;
    try {
        for (const auto& j : doc.at("chunks")) {
            DocumentChunk c;
            c.id = j.at("id").get<std::size_t>();
            c.content = j.at("content").get<std::string>();
            c.source_path = j.at("source_path").get<std::string>();
            c.component_tag = tag_from_string(j.at("component_tag").get<std::string>());
            c.checksum = j.at("checksum").get<std::string>();
            if (!is_sha256_hex(c.checksum)) throw std::runtime_error("chunk checksum is not a SHA-256 digest");
            for (const auto& s : j.at("systems")) c.systems.insert(system_from_string(s.get<std::string>()));
            c.embedding = embed::EmbeddingVector(j.at("embedding").get<std::vector<double>>());
            if (j.contains("spe_version")) c.spe_version = j["spe_version"].get<std::string>();
            index.chunks.push_back(std::move(c));
        }
        for (const auto& [k, v] : doc.at("by_system").items()) {
            index.by_system[system_from_string(k)] = v.get<std::vector<std::size_t>>();
        }
        for (const auto& s : doc.value("skipped", json::array())) {
            index.skipped.push_back({s.at("path").get<std::string>(), s.at("reason").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(fmt::format("malformed knowledge index: {}", e.what()));
    }
    index.validate();
    if (doc.contains("fingerprint") && doc["fingerprint"].get<std::string>() != index.fingerprint()) {
        throw std::runtime_error("knowledge index fingerprint does not match its chunks");
    }
    return index;
}

void save_index(const KnowledgeIndex& index, const fs::path& path) { write_canonical_json(path, to_json(index)); }

KnowledgeIndex load_index(const fs::path& path) { return index_from_json(read_json_file(path)); }

std::vector<DocumentChunk> retrieve_relevant_docs(const KnowledgeIndex& index, std::string_view query,
                                                  TargetSystem system, std::size_t k, const embed::Encoder& encoder) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    auto it = index.by_system.find(system);
    if (it == index.by_system.end() || it->second.empty()) return {};
    auto q = encoder.encode(query);
    std::vector<std::pair<double, std::size_t>> scored;
    for (auto id : it->second) {
        const auto& c = index.chunks.at(id);
        double s = c.embedding.dim() == q.dim() ? embed::cosine(q, c.embedding) : 0.0;
        scored.emplace_back(s, id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<DocumentChunk> out;
    for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(index.chunks[scored[i].second]);
    return out;
}

std::vector<hgot::VertexId> attach_rag_nodes(hgot::ThoughtHypergraph& graph, const std::vector<DocumentChunk>& docs) {
    auto system = graph.vertices_of_type(hgot::VertexType::system);
    auto user = graph.vertices_of_type(hgot::VertexType::user);
    if (system.empty() || user.empty()) {
        throw std::invalid_argument("attach_rag_nodes needs a graph seeded with system and user vertices");
    }
    std::vector<std::string> texts;
    for (const auto& d : docs) texts.push_back(d.content);
    const auto table = hgot::RelevanceTable::standard();
    hgot::RelevanceFn relevance = [&table](const hgot::Relation& r, hgot::VertexType a, hgot::VertexType b) {
        return table(r, a, b);
    };
    return hgot::attach_knowledge(graph, texts, system, user, relevance);
}

}  // namespace pipegen::knowledge
