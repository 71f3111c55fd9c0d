#pragma once

#include <cstdint>
#include <string>

namespace embexp::unicode {

// True for codepoints in the Unicode letter categories (Lu/Ll/Lt/Lm/Lo).
bool is_letter(char32_t cp);

// Simple 1:1 lowercase mapping (idempotent); identity for caseless codepoints.
char32_t to_lower(char32_t cp);

// Simple 1:1 uppercase mapping (idempotent); identity for caseless codepoints.
char32_t to_upper(char32_t cp);

// True if cp is a cased letter currently in lowercase form.
bool is_lowercase_letter(char32_t cp);

// Decodes one UTF-8 codepoint starting at data[pos].  Advances pos past the
// sequence and returns the codepoint, or returns U+FFFFFFFF on malformed
// input (pos then points at the offending byte).
char32_t decode_utf8(const std::string& data, std::size_t& pos);

// Appends cp to out as UTF-8.
void encode_utf8(char32_t cp, std::string& out);

}  // namespace embexp::unicode
