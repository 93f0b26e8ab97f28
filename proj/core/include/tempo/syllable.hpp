#pragma once

/**
 * Syllable counting as a cross-lingual duration proxy.
 *
 * Counting rules per language:
 *   zh  one syllable per Han ideograph; embedded Latin words use the en rule
 *   en  vowel groups, silent final e, consonant+le restoration, hiatus and
 *       suffix adjustments
 *   de  vowel nuclei with the diphthongs au, ei, eu, äu, ai, ie (and doubled
 *       vowels) counted once
 *   es  vowel nuclei with weak/strong diphthong rules; an accented weak
 *       vowel (í, ú) breaks the diphthong
 *
 * Integers up to 9999 are counted as their spoken form in the target
 * language; longer digit runs are read digit by digit. Punctuation and
 * whitespace contribute nothing. Letters of unsupported scripts and emoji
 * contribute nothing and bump a process-wide warning counter.
 *
 * Every function here is pure apart from that counter and safe to call
 * concurrently.
 */

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tempo {

enum class Language { kZh, kEn, kDe, kEs };

// Accepts "zh", "en", "de", "es" (case-insensitive); anything else throws
// Error(kUnsupportedLanguage).
Language parse_language(std::string_view code);
std::string_view language_code(Language lang);
std::string_view language_name(Language lang);

struct LanguageProfile {
  Language code;
  double syllable_rate;  // syllables per second
  double info_density;   // normalized, in [0, 1]
  double theoretical_expansion_from_zh;
};

const LanguageProfile& language_profile(Language lang);

struct SyllableCount {
  std::size_t value = 0;

  friend auto operator<=>(const SyllableCount&, const SyllableCount&) = default;
  friend SyllableCount operator+(SyllableCount a, SyllableCount b) {
    return SyllableCount{a.value + b.value};
  }
  SyllableCount& operator+=(SyllableCount o) {
    value += o.value;
    return *this;
  }
};

enum class TokenKind { kWord, kIdeograph, kNumber, kPunct, kUnknown };

struct Token {
  std::string text;
  TokenKind kind;

  friend bool operator==(const Token&, const Token&) = default;
};

// Whitespace split with punctuation isolated into one token per mark. Han
// ideographs become one token each; Latin runs (with word-internal
// apostrophes) and digit runs become single tokens.
std::vector<Token> tokenize(std::string_view text, Language lang);

SyllableCount count_word_syllables(std::string_view word, Language lang);
SyllableCount count_syllables(std::string_view text, Language lang);

struct SyllableDetail {
  SyllableCount count;
  std::size_t unknown_tokens = 0;
};

SyllableDetail count_syllables_detailed(std::string_view text, Language lang);

// Spoken-form syllable count of a non-negative integer written with `digits`.
SyllableCount number_syllables(std::string_view digits, Language lang);

// Total unknown-script tokens seen by this process.
std::uint64_t unknown_symbol_warnings();

}  // namespace tempo
