#pragma once

#include <string>
#include <string_view>

namespace charmer::utf8 {

// Strict decoder: rejects overlong forms, surrogates and truncated
// sequences by throwing InvalidSentence.
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view chars);

std::string encode(char32_t c);

}  // namespace charmer::utf8
