#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vague {

bool is_valid_utf8(std::string_view text);

// ASCII lowercasing; multi-byte sequences pass through untouched.
std::string to_lower(std::string_view text);

// Splits lowercased text into words on whitespace and punctuation (ASCII
// punctuation plus the common Unicode quote/dash/space ranges). Separators
// are dropped.
std::vector<std::string> split_words(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace vague
