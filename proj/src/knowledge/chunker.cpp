#include "pipegen/knowledge/chunker.hpp"

#include <stdexcept>

namespace pipegen::knowledge {
namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

std::size_t code_point_count(std::string_view utf8) {
    std::size_t n = 0;
    for (unsigned char c : utf8) {
        if (!is_continuation(c)) ++n;
    }
    return n;
}

std::vector<std::string> chunk_text(std::string_view text, std::size_t chunk_size) {
    if (chunk_size == 0) throw std::invalid_argument("chunk_size must be positive");
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        // Byte offset after chunk_size code points, and the last newline seen on the way.
        std::size_t end = pos;
        std::size_t points = 0;
        std::size_t last_nl = std::string_view::npos;
        while (end < text.size() && points < chunk_size) {
            if (text[end] == '\n') last_nl = end;
            ++end;
            while (end < text.size() && is_continuation(static_cast<unsigned char>(text[end]))) ++end;
            ++points;
        }
        if (end < text.size() && last_nl != std::string_view::npos) end = last_nl + 1;
        out.emplace_back(text.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

}  // namespace pipegen::knowledge
