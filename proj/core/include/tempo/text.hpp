#pragma once

// UTF-8 helpers and a coarse character classifier. Classification is
// range-based and locale-independent so every count derived from it is
// reproducible across machines.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tempo::text {

enum class CharClass {
  kSpace,
  kHan,         // CJK unified ideographs (all planes) and compatibility forms
  kLatin,       // ASCII letters, Latin-1 and Latin Extended-A letters
  kDigit,       // ASCII and fullwidth digits
  kApostrophe,  // ' and U+2019; word-internal only when between letters
  kPunct,       // punctuation and common symbols
  kOther,       // letters of other scripts, emoji, unassigned symbols
};

// Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

CharClass classify(char32_t cp);

bool is_han(char32_t cp);
bool is_latin_letter(char32_t cp);
bool is_digit(char32_t cp);

// Lower-cases Latin letters and maps fullwidth forms onto ASCII. Other code
// points are returned unchanged.
char32_t fold_latin(char32_t cp);

// Strips Latin diacritics (é -> e, ü -> u). Used where a rule only cares about
// the base vowel.
char32_t strip_diacritic(char32_t cp);

// Number of code points that are neither whitespace nor punctuation.
std::size_t count_content_chars(std::string_view s);

std::string trim(std::string_view s);

// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

// 64-bit FNV-1a; used for config hashes and shingle hashing.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace tempo::text
