#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pipegen::artifacts {

struct CodeFile {
    std::string filename;
    std::string language;  // lowercased fence info word, may be empty
    std::string content;   // verbatim fence body, newline-terminated

    bool operator==(const CodeFile&) const = default;
};

/// Conventional file extension for a fence language, ".txt" when unknown.
std::string extension_for(std::string_view language);

/// Name of the first top-level class/interface/enum/record/object/trait declared in `code`.
std::optional<std::string> declared_type_name(std::string_view code);

/// Fenced blocks (``` or ~~~, closed by a fence of the same character at least as long)
/// whose info word matches `language_hint`, or every block when the hint is absent.
/// Unterminated fences produce nothing. Files are named after their leading type
/// declaration, else "step-<id>-<n>.<ext>" with n counting extracted blocks from 1.
std::vector<CodeFile> extract_code_blocks(std::string_view text, std::optional<std::string_view> language_hint,
                                          int step_id = 0);

}  // namespace pipegen::artifacts
