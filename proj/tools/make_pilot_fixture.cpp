// Writes a synthetic two-annotator pilot whose paired etymology letters
// reproduce a given 9x9 count table over T A P R F Q X V N.
//
//   make_pilot_fixture OUT_DIR
//
// produces OUT_DIR/pilot.tsv and OUT_DIR/annotations/pilot/{annotator1,
// annotator2}.jsonl. Slot k (row-major over the table cells) is
// language k % 8 of entry k / 8; the first annotator labels it with the
// column letter, the second with the row letter. Every slot is its own
// lexeme in cognate class 1.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "turkann/codec.hpp"

namespace fs = std::filesystem;
using namespace turkann;

namespace {

constexpr std::array<Etymology, 9> kCategories{
    Etymology::Turkic,  Etymology::Arabic,        Etymology::Persian,
    Etymology::Russian, Etymology::French,        Etymology::Unknown,
    Etymology::MixedCompound, Etymology::ForeignBaseVerb, Etymology::ForeignBaseNominal,
};

// Rows: second annotator. Columns: first annotator.
constexpr std::array<std::array<int, 9>, 9> kCounts{{
    {160, 8, 2, 0, 0, 3, 10, 6, 1},
    {0, 56, 2, 6, 0, 1, 0, 1, 0},
    {0, 0, 31, 0, 0, 0, 1, 0, 0},
    {0, 0, 0, 32, 1, 0, 0, 0, 0},
    {0, 0, 0, 0, 5, 0, 0, 0, 0},
    {12, 5, 0, 2, 0, 0, 2, 3, 0},
    {2, 0, 1, 5, 0, 0, 17, 8, 0},
    {0, 1, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 1, 0, 0, 0, 6, 0, 1},
}};

std::string entry_id(std::size_t i) {
  std::string n = std::to_string(i + 1);
  return "pilot-" + std::string(3 - n.size(), '0') + n;
}

// Deterministic pseudo-words; only their validity matters here.
std::string form(std::size_t entry, std::size_t language) {
  static constexpr std::string_view kSyllables[] = {"ka", "ta", "bo", "mi", "su", "ar", "ol", "ek"};
  std::string out;
  std::size_t x = entry * 8 + language + 1;
  for (int k = 0; k < 3; ++k) {
    out += kSyllables[x % 8];
    x /= 8;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_pilot_fixture OUT_DIR\n";
    return 2;
  }
  const fs::path out = argv[1];

  std::vector<std::pair<Etymology, Etymology>> slots;  // (first, second)
  for (std::size_t row = 0; row < kCategories.size(); ++row)
    for (std::size_t col = 0; col < kCategories.size(); ++col)
      for (int c = 0; c < kCounts[row][col]; ++c) slots.emplace_back(kCategories[col], kCategories[row]);
  if (slots.size() % kLanguages.size() != 0) {
    std::cerr << "slot count " << slots.size() << " is not a multiple of 8\n";
    return 1;
  }
  const std::size_t n_entries = slots.size() / kLanguages.size();

  std::vector<DictionaryEntry> entries;
  for (std::size_t e = 0; e < n_entries; ++e) {
    DictionaryEntry entry;
    entry.entry_id = entry_id(e);
    entry.gloss = "pilot item " + std::to_string(e + 1);
    for (std::size_t l = 0; l < kLanguages.size(); ++l)
      entry.translations[l].push_back(Lexeme::create(form(e, l), Script::OfficialLatin));
    entries.push_back(std::move(entry));
  }

  const Timestamp base = std::chrono::sys_days{std::chrono::year{2024} / 3 / 1} + std::chrono::hours{9};
  std::vector<AnnotationRecord> first;
  std::vector<AnnotationRecord> second;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto stamp = base + std::chrono::seconds{15 * static_cast<std::int64_t>(k)};
    const std::string id = entry_id(k / kLanguages.size());
    const LanguageId lang = kLanguages[k % kLanguages.size()];
    first.push_back({"annotator1", id, lang, 0, {1, slots[k].first}, stamp});
    second.push_back({"annotator2", id, lang, 0, {1, slots[k].second}, stamp});
  }

  try {
    const fs::path logs = out / "annotations" / "pilot";
    fs::create_directories(logs);
    std::ofstream(out / "pilot.tsv", std::ios::binary) << serialize_dataset(entries);
    std::ofstream(logs / "annotator1.jsonl", std::ios::binary) << serialize_annotations(first);
    std::ofstream(logs / "annotator2.jsonl", std::ios::binary) << serialize_annotations(second);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  std::cout << entries.size() << " entries, " << slots.size() << " paired slots\n";
  return 0;
}
