#include "turkann/language.hpp"

namespace turkann {
namespace {

constexpr std::array<std::string_view, kLanguageCount> kNames{
    "Azerbaijani", "Kazakh", "Kyrgyz", "Tatar",
    "Turkish",     "Turkmen", "Uyghur", "Uzbek",
};

constexpr std::array<std::string_view, kLanguageCount> kTags{
    "az", "kk", "ky", "tt", "tr", "tk", "ug", "uz",
};

}  // namespace

std::string_view language_name(LanguageId id) {
  return kNames[language_index(id)];
}

std::string_view language_tag(LanguageId id) {
  return kTags[language_index(id)];
}

std::optional<LanguageId> language_from_string(std::string_view text) {
  for (LanguageId id : kLanguages) {
    if (text == kNames[language_index(id)] || text == kTags[language_index(id)])
      return id;
  }
  return std::nullopt;
}

}  // namespace turkann
