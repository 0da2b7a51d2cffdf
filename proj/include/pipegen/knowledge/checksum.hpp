#pragma once

#include <string>
#include <string_view>

namespace pipegen::knowledge {

/// SHA-256 of `bytes` as 64 lowercase hex characters.
std::string sha256_hex(std::string_view bytes);

bool is_sha256_hex(std::string_view s);

}  // namespace pipegen::knowledge
