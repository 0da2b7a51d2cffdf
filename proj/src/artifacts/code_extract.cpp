#include "pipegen/artifacts/code_extract.hpp"

#include <map>
#include <regex>
#include <set>

#include <fmt/format.h>

#include "pipegen/common/text.hpp"

namespace pipegen::artifacts {
namespace {

const std::map<std::string, std::string, std::less<>>& extensions() {
    static const std::map<std::string, std::string, std::less<>> table{
        {"java", ".java"}, {"scala", ".scala"}, {"python", ".py"},   {"py", ".py"},     {"kotlin", ".kt"},
        {"kt", ".kt"},     {"xml", ".xml"},     {"yaml", ".yaml"},   {"yml", ".yaml"},  {"sql", ".sql"},
        {"json", ".json"}, {"bash", ".sh"},     {"sh", ".sh"},       {"shell", ".sh"},  {"properties", ".properties"},
        {"clojure", ".clj"}, {"go", ".go"},     {"javascript", ".js"}, {"js", ".js"},   {"typescript", ".ts"},
    };
    return table;
}

// Languages that share the same naming and matching.
std::string canonical_language(std::string_view lang) {
    auto l = text::to_lower(lang);
    if (l == "py") return "python";
    if (l == "yml") return "yaml";
    if (l == "kt") return "kotlin";
    if (l == "sh" || l == "shell") return "bash";
    if (l == "js") return "javascript";
    return l;
}

struct Line {
    std::string_view text;   // without the newline
    std::size_t end;         // offset just past the newline
};

std::vector<Line> split_lines(std::string_view s) {
    std::vector<Line> lines;
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto nl = s.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back({s.substr(pos), s.size()});
            break;
        }
        lines.push_back({s.substr(pos, nl - pos), nl + 1});
        pos = nl + 1;
    }
    return lines;
}

struct Fence {
    char ch;
    std::size_t len;
    std::string_view info;
};

std::optional<Fence> parse_fence(std::string_view line) {
    std::size_t indent = 0;
    while (indent < line.size() && indent < 4 && line[indent] == ' ') ++indent;
    if (indent > 3 || indent >= line.size()) return std::nullopt;
    char c = line[indent];
    if (c != '`' && c != '~') return std::nullopt;
    std::size_t n = indent;
    while (n < line.size() && line[n] == c) ++n;
    std::size_t len = n - indent;
    if (len < 3) return std::nullopt;
    auto info = line.substr(n);
    if (c == '`' && info.find('`') != std::string_view::npos) return std::nullopt;
    return Fence{c, len, info};
}

bool closes(std::string_view line, const Fence& open) {
    auto f = parse_fence(line);
    return f && f->ch == open.ch && f->len >= open.len && text::trim(f->info).empty();
}

}  // namespace

std::string extension_for(std::string_view language) {
    auto it = extensions().find(text::to_lower(language));
    return it == extensions().end() ? ".txt" : it->second;
}

std::optional<std::string> declared_type_name(std::string_view code) {
    static const std::regex decl(
        R"(^(?:(?:public|private|protected|final|abstract|static|sealed|case|data|open|internal)\s+)*)"
        R"((?:class|interface|enum|record|object|trait)\s+([A-Za-z_][A-Za-z0-9_]*))");
    for (const auto& line : split_lines(code)) {
        std::string l(line.text);
        std::smatch m;
        if (std::regex_search(l, m, decl)) return m[1].str();
    }
    return std::nullopt;
}

std::vector<CodeFile> extract_code_blocks(std::string_view text, std::optional<std::string_view> language_hint,
                                          int step_id) {
    std::optional<std::string> hint;
    if (language_hint && !text::trim(*language_hint).empty()) hint = canonical_language(text::trim(*language_hint));

    std::vector<CodeFile> out;
    std::set<std::string> used;
    auto lines = split_lines(text);
    int fallback_n = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto open = parse_fence(lines[i].text);
        if (!open) continue;
        std::size_t j = i + 1;
        while (j < lines.size() && !closes(lines[j].text, *open)) ++j;
        if (j >= lines.size()) break;  // unterminated: the rest of the text is not code

        auto info = text::trim(open->info);
        auto word = info.substr(0, info.find_first_of(" \t{"));
        auto lang = canonical_language(word);
        std::size_t body_begin = lines[i].end;
        std::size_t body_end = lines[j - 1 >= i + 1 ? j - 1 : i].end;
        i = j;
        if (hint && lang != *hint) continue;
        if (body_end < body_begin) body_end = body_begin;

        CodeFile f;
        f.language = lang;
        f.content = std::string(text.substr(body_begin, body_end - body_begin));
        if (!f.content.empty() && f.content.back() != '\n') f.content.push_back('\n');
        ++fallback_n;
        auto ext = extension_for(lang);
        auto name = declared_type_name(f.content);
        f.filename = name ? *name + ext : fmt::format("step-{}-{}{}", step_id, fallback_n, ext);
        if (!used.insert(f.filename).second) {
            f.filename = fmt::format("step-{}-{}{}", step_id, fallback_n, ext);
            used.insert(f.filename);
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace pipegen::artifacts
