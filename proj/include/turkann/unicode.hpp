#pragma once

#include <string>
#include <string_view>

// Thin UTF-8 helpers over ICU. All functions throw std::invalid_argument
// on malformed UTF-8.
namespace turkann::unicode {

bool is_valid_utf8(std::string_view text);

std::string to_nfc(std::string_view text);
std::string to_nfd(std::string_view text);

/// Locale-independent (root) lowercase mapping.
std::string to_lower(std::string_view text);

std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);

/// Nonspacing or enclosing combining mark (Mn, Me).
bool is_combining_mark(char32_t cp);

}  // namespace turkann::unicode
