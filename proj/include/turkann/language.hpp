#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace turkann {

// Column order of the eight-way dictionary. The numeric value is the
// canonical position and is used for all slot ordering.
enum class LanguageId : std::uint8_t {
  Azerbaijani,
  Kazakh,
  Kyrgyz,
  Tatar,
  Turkish,
  Turkmen,
  Uyghur,
  Uzbek,
};

inline constexpr std::size_t kLanguageCount = 8;

inline constexpr std::array<LanguageId, kLanguageCount> kLanguages{
    LanguageId::Azerbaijani, LanguageId::Kazakh,  LanguageId::Kyrgyz,
    LanguageId::Tatar,       LanguageId::Turkish, LanguageId::Turkmen,
    LanguageId::Uyghur,      LanguageId::Uzbek,
};

constexpr std::size_t language_index(LanguageId id) {
  return static_cast<std::size_t>(id);
}

/// English name, e.g. "Azerbaijani".
std::string_view language_name(LanguageId id);

/// ISO 639-1 tag used in dataset headers, e.g. "az".
std::string_view language_tag(LanguageId id);

/// Accepts either the English name or the tag (both case-sensitive).
std::optional<LanguageId> language_from_string(std::string_view text);

}  // namespace turkann
