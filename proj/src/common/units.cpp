#include "pipegen/common/units.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "pipegen/common/text.hpp"

namespace pipegen {
namespace {

struct NumberAndSuffix {
    double value = 0.0;
    std::string suffix;
};

NumberAndSuffix split_number(std::string_view text, std::string_view what) {
    std::string trimmed = text::trim(text);
    std::size_t i = 0;
    while (i < trimmed.size() && (std::isdigit(static_cast<unsigned char>(trimmed[i])) || trimmed[i] == '.')) {
        ++i;
    }
    if (i == 0) {
        throw std::invalid_argument(fmt::format("invalid {} '{}'", what, text));
    }
    NumberAndSuffix out;
    try {
        std::size_t used = 0;
        out.value = std::stod(trimmed.substr(0, i), &used);
        if (used != i) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw std::invalid_argument(fmt::format("invalid {} '{}'", what, text));
    }
    out.suffix = text::to_lower(text::trim(std::string_view(trimmed).substr(i)));
    return out;
}

}  // namespace

std::chrono::milliseconds parse_duration(std::string_view text) {
    auto [value, suffix] = split_number(text, "duration");
    double ms = 0.0;
    if (suffix.empty() || suffix == "s" || suffix == "sec" || suffix == "secs" || suffix == "second" ||
        suffix == "seconds") {
        ms = value * 1000.0;
    } else if (suffix == "ms") {
        ms = value;
    } else if (suffix == "m" || suffix == "min" || suffix == "mins" || suffix == "minute" || suffix == "minutes") {
        ms = value * 60'000.0;
    } else if (suffix == "h" || suffix == "hour" || suffix == "hours") {
        ms = value * 3'600'000.0;
    } else {
        throw std::invalid_argument(fmt::format("unknown duration unit in '{}'", text));
    }
    if (ms <= 0.0) {
        throw std::invalid_argument(fmt::format("duration must be positive: '{}'", text));
    }
    return std::chrono::milliseconds(static_cast<std::int64_t>(ms + 0.5));
}

std::uint64_t parse_size(std::string_view text) {
    auto [value, suffix] = split_number(text, "size");
    double mult = 1.0;
    if (suffix.empty() || suffix == "b") {
        mult = 1.0;
    } else if (suffix == "kib" || suffix == "k") {
        mult = 1024.0;
    } else if (suffix == "mib" || suffix == "m") {
        mult = 1024.0 * 1024.0;
    } else if (suffix == "gib" || suffix == "g") {
        mult = 1024.0 * 1024.0 * 1024.0;
    } else if (suffix == "kb") {
        mult = 1e3;
    } else if (suffix == "mb") {
        mult = 1e6;
    } else if (suffix == "gb") {
        mult = 1e9;
    } else {
        throw std::invalid_argument(fmt::format("unknown size unit in '{}'", text));
    }
    double bytes = value * mult;
    if (bytes < 1.0) {
        throw std::invalid_argument(fmt::format("size must be positive: '{}'", text));
    }
    return static_cast<std::uint64_t>(bytes + 0.5);
}

std::string format_duration(std::chrono::milliseconds d) {
    auto ms = d.count();
    if (ms % 3'600'000 == 0) return fmt::format("{}h", ms / 3'600'000);
    if (ms % 60'000 == 0) return fmt::format("{}m", ms / 60'000);
    if (ms % 1000 == 0) return fmt::format("{}s", ms / 1000);
    return fmt::format("{}ms", ms);
}

}  // namespace pipegen
