#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mmsarc::utf8 {

// A decoded codepoint with the byte range it occupied in the source.
struct Codepoint {
    char32_t value;
    std::size_t begin;
    std::size_t end;
};

// Malformed sequences decode to U+FFFD one byte at a time.
std::vector<Codepoint> decode(std::string_view text);

void append(std::string& out, char32_t cp);

std::size_t length(std::string_view text);

std::string ascii_lower(std::string_view text);

}  // namespace mmsarc::utf8
