#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pipegen::knowledge {

/// Splits valid UTF-8 text into pieces of at most `chunk_size` code points with no overlap.
/// A piece that would be cut short ends right after the last newline inside its window,
/// if there is one. Concatenating the pieces gives back `text` exactly.
/// Throws std::invalid_argument when chunk_size is 0.
std::vector<std::string> chunk_text(std::string_view text, std::size_t chunk_size);

std::size_t code_point_count(std::string_view utf8);

}  // namespace pipegen::knowledge
