#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace tempnet::text {

bool is_valid_utf8(std::string_view s);

/// Decodes the code point starting at s[pos] and advances pos past it.
/// Input must be valid UTF-8.
char32_t decode_at(std::string_view s, std::size_t& pos);

inline bool is_continuation_byte(unsigned char c) { return (c & 0xC0) == 0x80; }

/// Letters and digits. ASCII is classified exactly; non-ASCII code points
/// count as word characters unless they fall in a known punctuation,
/// symbol or space range.
bool is_word_char(char32_t cp);

bool is_space(char32_t cp);

/// Lowercases ASCII and the Latin-1 / Latin Extended-A uppercase ranges.
char32_t fold(char32_t cp);

void append_utf8(std::string& out, char32_t cp);

std::string fold_case(std::string_view s);

/// Removes `<...>` tags and decodes the five predefined XML entities.
std::string strip_markup(std::string_view s);

}  // namespace tempnet::text
