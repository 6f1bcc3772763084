#include "turkann/unicode.hpp"

#include <stdexcept>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace turkann::unicode {
namespace {

icu::UnicodeString from_utf8(std::string_view text) {
  if (!is_valid_utf8(text)) throw std::invalid_argument("invalid UTF-8");
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
}

std::string to_utf8(const icu::UnicodeString& text) {
  std::string out;
  text.toUTF8String(out);
  return out;
}

std::string normalize(std::string_view text, bool compose) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = compose ? icu::Normalizer2::getNFCInstance(status)
                                         : icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalizer unavailable");
  icu::UnicodeString out = norm->normalize(from_utf8(text), status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  return to_utf8(out);
}

}  // namespace

bool is_valid_utf8(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

std::string to_nfc(std::string_view text) { return normalize(text, true); }
std::string to_nfd(std::string_view text) { return normalize(text, false); }

std::string to_lower(std::string_view text) {
  icu::UnicodeString s = from_utf8(text);
  s.toLower(icu::Locale::getRoot());
  return to_utf8(s);
}

std::u32string decode(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  std::u32string out;
  out.reserve(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) throw std::invalid_argument("invalid UTF-8");
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
    if (error) throw std::invalid_argument("code point not encodable as UTF-8");
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
  }
  return out;
}

bool is_combining_mark(char32_t cp) {
  const auto cat = u_charType(static_cast<UChar32>(cp));
  return cat == U_NON_SPACING_MARK || cat == U_ENCLOSING_MARK;
}

}  // namespace turkann::unicode
