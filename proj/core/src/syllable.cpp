#include "tempo/syllable.hpp"

#include <array>
#include <atomic>
#include <string>
#include <unordered_map>

#include "tempo/error.hpp"
#include "tempo/text.hpp"

namespace tempo {

namespace {

std::atomic<std::uint64_t> g_unknown_warnings{0};

constexpr std::array<LanguageProfile, 4> kProfiles = {{
    {Language::kZh, 5.18, 0.94, 1.00},
    {Language::kEn, 6.19, 0.91, 1.03},
    {Language::kDe, 5.97, 0.79, 1.19},
    {Language::kEs, 7.82, 0.63, 1.49},
}};

using Word = std::u32string;

bool is_aeiou(char32_t c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool ends_with(const Word& w, std::u32string_view suffix) {
  return w.size() >= suffix.size() &&
         std::u32string_view(w).substr(w.size() - suffix.size()) == suffix;
}

bool starts_with(const Word& w, std::size_t pos, std::u32string_view s) {
  return w.size() >= pos + s.size() && std::u32string_view(w).substr(pos, s.size()) == s;
}

// ---------------------------------------------------------------------------
// English

const std::unordered_map<std::u32string, std::size_t>& en_exceptions() {
  static const std::unordered_map<std::u32string, std::size_t> table = {
      {U"people", 2}, {U"every", 2},    {U"maybe", 2},   {U"recipe", 3},
      {U"business", 2}, {U"colonel", 2}, {U"naive", 2},  {U"queue", 1},
      {U"forever", 3}, {U"several", 2}, {U"interest", 2}, {U"vegetable", 3},
      {U"chocolate", 2}, {U"camera", 2}, {U"family", 2}, {U"different", 2},
  };
  return table;
}

std::vector<bool> en_vowel_mask(const Word& w) {
  const auto n = w.size();
  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = w[i];
    if (is_aeiou(c)) {
      mask[i] = true;
      if (c == 'u' && i > 0 && w[i - 1] == 'q') mask[i] = false;
      // gu before a vowel (guard, guess, language) but not a final -ue (argue).
      if (c == 'u' && i > 0 && w[i - 1] == 'g' && i + 1 < n && is_aeiou(w[i + 1]) &&
          !(i + 2 == n && w[i + 1] == 'e')) {
        mask[i] = false;
      }
    } else if (c == 'y') {
      mask[i] = i > 0 && !(i + 1 < n && is_aeiou(w[i + 1]));
    } else if (c == 'w') {
      mask[i] = i > 0 && mask[i - 1] &&
                (i + 1 == n || !(is_aeiou(w[i + 1]) || w[i + 1] == 'y'));
    }
  }
  return mask;
}

// Whether the vowel letters at `i` and `i + 1` (both inside one vowel run)
// are pronounced as separate syllables.
bool en_hiatus(const Word& w, std::size_t i) {
  const auto n = w.size();
  const char32_t a = w[i];
  const char32_t b = w[i + 1];
  const char32_t prev = i > 0 ? w[i - 1] : U'\0';
  const char32_t prev2 = i > 1 ? w[i - 2] : U'\0';
  const std::u32string_view rest = std::u32string_view(w).substr(i + 1);

  // going, being, seeing, playing
  if (b == 'i' && ends_with(w, U"ing") && i + 1 == n - 3) return true;

  if (a == 'i' && (b == 'a' || b == 'o' || b == 'u')) {
    // -tion, -sion, -cial, -tious, -gion: the i only palatalizes
    if (prev == 't' || prev == 's' || prev == 'c' || prev == 'x' || prev == 'g') {
      static constexpr std::array<std::u32string_view, 4> kGlide = {U"on", U"al", U"an", U"ous"};
      for (auto g : kGlide) {
        if (rest.starts_with(g)) return false;
      }
    }
    // million, onion, senior: i glides after l/n that follows a vowel or l
    if ((prev == 'l' || prev == 'n') && i > 1 && (is_aeiou(prev2) || prev2 == 'l')) {
      return false;
    }
    return true;
  }
  if (a == 'i' && b == 'e') {
    const char32_t next = i + 2 < n ? w[i + 2] : U'\0';
    if (next == 't') return true;                     // quiet, diet, society
    if (prev == 'c' && prev2 == 's') return true;     // science
    if (starts_with(w, i + 2, U"nt") || starts_with(w, i + 2, U"nc")) {
      return !(prev == 't' || prev == 'c');           // client vs patient
    }
    if (i + 3 == n && next == 'r' && i > 1 && !is_aeiou(prev)) {
      // earlier, happier: only when a vowel precedes the consonant
      for (std::size_t k = 0; k + 1 < i; ++k) {
        if (is_aeiou(w[k]) || w[k] == 'y') return true;
      }
    }
    return false;
  }
  if (a == 'e' && b == 'a') {
    if (i + 2 == n) return true;                      // idea, area
    if (prev == 'r' && prev2 == 'c' && i + 2 < n && w[i + 2] == 't') return true;  // create
    return false;
  }
  if (a == 'e' && b == 'o') {
    return !(i + 2 < n && w[i + 2] == 'u');           // video vs gorgeous
  }
  if (a == 'o' && b == 'e') {
    const char32_t next = i + 2 < n ? w[i + 2] : U'\0';
    return next == 'm' || next == 't';                // poem, poet
  }
  if (a == 'u' && b == 'e') {
    const char32_t next = i + 2 < n ? w[i + 2] : U'\0';
    return next == 'n' || next == 'l' || next == 't';  // fluent, cruel, duet
  }
  if (a == 'u' && (b == 'a' || b == 'o' || b == 'u' || b == 'i')) {
    if (b == 'i') return false;                       // fruit, suit, build
    return true;                                      // actual, usual, duo
  }
  return false;
}

std::size_t en_core(const Word& w);

std::size_t en_core_counted(const Word& w) {
  const auto n = w.size();
  if (n == 0) return 0;
  const auto mask = en_vowel_mask(w);

  std::size_t groups = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    if (i == 0 || !mask[i - 1]) {
      ++groups;
    } else if (en_hiatus(w, i - 1)) {
      ++groups;
    }
  }

  const auto own_group_e = [&](std::size_t pos) {
    return pos < n && w[pos] == 'e' && mask[pos] && pos > 0 && !mask[pos - 1];
  };

  if (groups > 1 && own_group_e(n - 1)) {
    const bool consonant_le = n >= 3 && w[n - 2] == 'l' && !mask[n - 3] && w[n - 3] != 'l';
    if (!consonant_le) --groups;
  } else if (groups > 1 && n >= 3 && w[n - 1] == 'd' && own_group_e(n - 2)) {
    const char32_t before = w[n - 3];
    if (before != 't' && before != 'd') --groups;
  } else if (groups > 1 && n >= 3 && w[n - 1] == 's' && own_group_e(n - 2)) {
    const char32_t before = w[n - 3];
    const bool sibilant = before == 's' || before == 'x' || before == 'z' ||
                          before == 'c' || before == 'g' ||
                          (before == 'h' && n >= 4 && (w[n - 4] == 'c' || w[n - 4] == 's'));
    if (!sibilant) --groups;
  }
  if (ends_with(w, U"sm") && n > 2) ++groups;  // prism, racism
  return groups;
}

std::size_t en_core(const Word& w) {
  if (auto it = en_exceptions().find(w); it != en_exceptions().end()) return it->second;

  // Compound tails: something, everyone, anywhere, lifetime.
  static constexpr std::array<std::u32string_view, 7> kTails = {
      U"thing", U"one", U"body", U"where", U"time", U"times", U"way"};
  for (auto tail : kTails) {
    if (w.size() > tail.size() + 1 && ends_with(w, tail)) {
      Word stem = w.substr(0, w.size() - tail.size());
      bool stem_has_vowel = false;
      for (char32_t c : stem) stem_has_vowel |= is_aeiou(c) || c == 'y';
      if (stem_has_vowel) return en_core(stem) + en_core(Word(tail));
    }
  }

  // Silent e before a consonant-initial suffix: lovely, hopeful, statement.
  static constexpr std::array<std::u32string_view, 5> kSuffixes = {
      U"ly", U"ful", U"ment", U"ness", U"less"};
  for (auto suf : kSuffixes) {
    if (w.size() >= suf.size() + 3 && ends_with(w, suf)) {
      Word stem = w.substr(0, w.size() - suf.size());
      const auto m = stem.size();
      if (stem[m - 1] == 'e' && !is_aeiou(stem[m - 2]) && stem[m - 2] != 'l') {
        return en_core(stem) + 1;
      }
    }
  }
  return en_core_counted(w);
}

std::size_t english_syllables(const Word& raw) {
  // Fold case and diacritics, split off n't.
  Word w;
  w.reserve(raw.size());
  for (char32_t c : raw) {
    if (c == '\'' || c == 0x2019) {
      w.push_back('\'');
    } else {
      w.push_back(text::strip_diacritic(c));
    }
  }
  std::size_t extra = 0;
  if (ends_with(w, U"n't") && w.size() > 3) {
    w.resize(w.size() - 3);
    if (!w.empty() && !is_aeiou(w.back()) && w.back() != 'y') ++extra;  // didn't, isn't
  }
  Word letters;
  for (char32_t c : w) {
    if (c != '\'') letters.push_back(c);
  }
  // Contraction tails ('s, 'll, 're, 've, 'd, 'm) carry no vowel of their own.
  if (auto apos = w.find('\''); apos != Word::npos) {
    letters = w.substr(0, apos);
    if (letters.empty()) letters = w.substr(apos + 1);
  }
  const std::size_t core = en_core(letters);
  return std::max<std::size_t>(1, core + extra);
}

// ---------------------------------------------------------------------------
// German

bool de_vowel(char32_t c) {
  return is_aeiou(c) || c == 'y' || c == 0xE4 || c == 0xF6 || c == 0xFC;
}

std::size_t german_syllables(const Word& raw) {
  Word w;
  for (char32_t c : raw) {
    c = text::fold_latin(c);
    if (c != 0xE4 && c != 0xF6 && c != 0xFC) c = text::strip_diacritic(c);
    w.push_back(c);
  }
  static constexpr std::array<std::u32string_view, 10> kPairs = {
      U"au", U"ei", U"eu", U"äu", U"ai", U"ie", U"ey", U"ay", U"aa", U"ee"};
  std::size_t count = 0;
  std::size_t i = 0;
  const auto n = w.size();
  while (i < n) {
    if (!de_vowel(w[i]) || (w[i] == 'u' && i > 0 && w[i - 1] == 'q')) {
      ++i;
      continue;
    }
    ++count;
    bool paired = false;
    if (i + 1 < n) {
      for (auto p : kPairs) {
        if (w[i] == p[0] && w[i + 1] == p[1]) paired = true;
      }
      if (w[i] == 'o' && w[i + 1] == 'o') paired = true;
    }
    i += paired ? 2 : 1;
  }
  return std::max<std::size_t>(1, count);
}

// ---------------------------------------------------------------------------
// Spanish

bool es_base_vowel(char32_t c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
    case 0xE1: case 0xE9: case 0xED: case 0xF3: case 0xFA: case 0xFC:
      return true;
    default:
      return false;
  }
}

bool es_strong(char32_t c) {
  // Accented i/u behave as strong vowels: they always form their own nucleus.
  return c == 'a' || c == 'e' || c == 'o' || c == 0xE1 || c == 0xE9 || c == 0xF3 ||
         c == 0xED || c == 0xFA;
}

bool es_accented_weak(char32_t c) { return c == 0xED || c == 0xFA; }

std::size_t spanish_syllables(const Word& raw) {
  Word w;
  for (char32_t c : raw) w.push_back(text::fold_latin(c));
  const auto n = w.size();
  std::vector<bool> vowel(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = w[i];
    if (es_base_vowel(c)) {
      vowel[i] = true;
      // que, qui, gue, gui: silent u
      if (c == 'u' && i > 0 && (w[i - 1] == 'q' || w[i - 1] == 'g') && i + 1 < n &&
          (w[i + 1] == 'e' || w[i + 1] == 'i' || w[i + 1] == 0xE9 || w[i + 1] == 0xED)) {
        vowel[i] = false;
      }
    } else if (c == 'y') {
      vowel[i] = n == 1 || (i + 1 == n && i > 0 && es_base_vowel(w[i - 1]));
    }
  }
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < n) {
    if (!vowel[i]) {
      ++i;
      continue;
    }
    ++count;
    bool has_strong = es_strong(w[i]);
    char32_t last = w[i];
    std::size_t j = i + 1;
    while (j < n && vowel[j]) {
      const char32_t c = w[j];
      if (es_strong(c) && has_strong) break;
      if (es_accented_weak(c) || es_accented_weak(last)) break;
      if (c == last) break;
      has_strong = has_strong || es_strong(c);
      last = c;
      ++j;
    }
    i = j;
  }
  return std::max<std::size_t>(1, count);
}

// ---------------------------------------------------------------------------
// Numbers

std::size_t en_number(unsigned v) {
  static constexpr std::array<std::size_t, 20> kOnes = {
      2, 1, 1, 1, 1, 1, 1, 2, 1, 1, 1, 3, 1, 2, 2, 2, 2, 3, 2, 2};
  static constexpr std::array<std::size_t, 10> kTens = {0, 0, 2, 2, 2, 2, 2, 3, 2, 2};
  constexpr std::size_t kHundred = 2, kThousand = 2;
  const auto below_100 = [&](unsigned x) -> std::size_t {
    if (x < 20) return kOnes[x];
    return kTens[x / 10] + (x % 10 ? kOnes[x % 10] : 0);
  };
  const auto below_1000 = [&](unsigned x) -> std::size_t {
    if (x < 100) return below_100(x);
    return kOnes[x / 100] + kHundred + (x % 100 ? below_100(x % 100) : 0);
  };
  if (v < 1000) return below_1000(v);
  return kOnes[v / 1000] + kThousand + (v % 1000 ? below_1000(v % 1000) : 0);
}

std::size_t zh_number(unsigned v) {
  if (v < 10) return 1;
  if (v < 20) return v == 10 ? 1 : 2;  // 十, 十五
  const unsigned digits[4] = {v / 1000, (v / 100) % 10, (v / 10) % 10, v % 10};
  std::size_t count = 0;
  bool seen_nonzero = false;
  bool pending_zero = false;
  for (int pos = 0; pos < 4; ++pos) {
    const unsigned d = digits[pos];
    if (d == 0) {
      if (seen_nonzero) pending_zero = true;
      continue;
    }
    if (pending_zero) ++count;  // 零
    pending_zero = false;
    seen_nonzero = true;
    count += 1 + (pos < 3 ? 1 : 0);  // digit + 千/百/十
  }
  return count;
}

std::size_t de_number(unsigned v) {
  // null eins zwei drei vier fünf sechs sieben acht neun zehn elf zwölf
  // dreizehn ... neunzehn
  static constexpr std::array<std::size_t, 20> kOnes = {
      1, 1, 1, 1, 1, 1, 1, 2, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2};
  constexpr std::size_t kTens = 2;  // zwanzig ... neunzig
  constexpr std::size_t kUnd = 1, kHundert = 2, kTausend = 2;
  const auto below_100 = [&](unsigned x) -> std::size_t {
    if (x < 20) return kOnes[x];
    return (x % 10 ? kOnes[x % 10] + kUnd : 0) + kTens;
  };
  const auto below_1000 = [&](unsigned x) -> std::size_t {
    if (x < 100) return below_100(x);
    const unsigned h = x / 100;
    return (h == 1 ? 0 : kOnes[h]) + kHundert + (x % 100 ? below_100(x % 100) : 0);
  };
  if (v < 1000) return below_1000(v);
  const unsigned t = v / 1000;
  return (t == 1 ? 0 : kOnes[t]) + kTausend + (v % 1000 ? below_1000(v % 1000) : 0);
}

std::size_t es_number(unsigned v) {
  // cero uno dos tres cuatro cinco seis siete ocho nueve diez once doce trece
  // catorce quince dieciséis diecisiete dieciocho diecinueve
  static constexpr std::array<std::size_t, 20> kOnes = {
      2, 2, 1, 1, 2, 2, 1, 2, 2, 2, 1, 2, 2, 2, 3, 2, 3, 4, 3, 4};
  // veinte, veintiuno .. veintinueve
  static constexpr std::array<std::size_t, 10> kTwenties = {2, 3, 3, 3, 4, 4, 3, 4, 3, 4};
  // treinta cuarenta cincuenta sesenta setenta ochenta noventa
  static constexpr std::array<std::size_t, 10> kTens = {0, 0, 0, 2, 3, 3, 3, 3, 3, 3};
  // ciento doscientos trescientos cuatrocientos quinientos seiscientos
  // setecientos ochocientos novecientos
  static constexpr std::array<std::size_t, 10> kHundreds = {0, 2, 3, 3, 4, 3, 3, 4, 4, 4};
  constexpr std::size_t kY = 1, kCien = 1, kMil = 1;
  const auto below_100 = [&](unsigned x) -> std::size_t {
    if (x < 20) return kOnes[x];
    if (x < 30) return kTwenties[x - 20];
    return kTens[x / 10] + (x % 10 ? kY + kOnes[x % 10] : 0);
  };
  const auto below_1000 = [&](unsigned x) -> std::size_t {
    if (x < 100) return below_100(x);
    if (x == 100) return kCien;
    return kHundreds[x / 100] + (x % 100 ? below_100(x % 100) : 0);
  };
  if (v < 1000) return below_1000(v);
  const unsigned t = v / 1000;
  return (t == 1 ? 0 : below_100(t)) + kMil + (v % 1000 ? below_1000(v % 1000) : 0);
}

std::size_t spoken_number(unsigned v, Language lang) {
  switch (lang) {
    case Language::kZh: return zh_number(v);
    case Language::kEn: return en_number(v);
    case Language::kDe: return de_number(v);
    case Language::kEs: return es_number(v);
  }
  return 0;
}

std::size_t word_rule(const Word& w, Language lang) {
  switch (lang) {
    case Language::kZh:
    case Language::kEn: return english_syllables(w);
    case Language::kDe: return german_syllables(w);
    case Language::kEs: return spanish_syllables(w);
  }
  return 0;
}

struct RawToken {
  Word cps;
  TokenKind kind;
};

std::vector<RawToken> tokenize_cps(const std::u32string& cps) {
  using text::CharClass;
  std::vector<RawToken> out;
  const auto n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    const auto cls = text::classify(cps[i]);
    switch (cls) {
      case CharClass::kSpace:
        ++i;
        break;
      case CharClass::kHan:
        out.push_back({Word(1, cps[i]), TokenKind::kIdeograph});
        ++i;
        break;
      case CharClass::kLatin: {
        std::size_t j = i + 1;
        while (j < n) {
          const auto c = text::classify(cps[j]);
          if (c == CharClass::kLatin) {
            ++j;
          } else if (c == CharClass::kApostrophe && j + 1 < n &&
                     text::classify(cps[j + 1]) == CharClass::kLatin) {
            j += 2;
          } else {
            break;
          }
        }
        out.push_back({cps.substr(i, j - i), TokenKind::kWord});
        i = j;
        break;
      }
      case CharClass::kDigit: {
        std::size_t j = i + 1;
        while (j < n) {
          if (text::is_digit(cps[j])) {
            ++j;
          } else if (cps[j] == ',' && j + 3 < n && text::is_digit(cps[j + 1]) &&
                     text::is_digit(cps[j + 2]) && text::is_digit(cps[j + 3]) &&
                     (j + 4 == n || !text::is_digit(cps[j + 4]))) {
            j += 4;  // thousands separator: 1,000
          } else {
            break;
          }
        }
        out.push_back({cps.substr(i, j - i), TokenKind::kNumber});
        i = j;
        break;
      }
      case CharClass::kApostrophe:
      case CharClass::kPunct:
        out.push_back({Word(1, cps[i]), TokenKind::kPunct});
        ++i;
        break;
      case CharClass::kOther: {
        std::size_t j = i + 1;
        while (j < n && text::classify(cps[j]) == CharClass::kOther) ++j;
        out.push_back({cps.substr(i, j - i), TokenKind::kUnknown});
        i = j;
        break;
      }
    }
  }
  return out;
}

std::size_t token_syllables(const RawToken& t, Language lang, std::size_t& unknown) {
  switch (t.kind) {
    case TokenKind::kIdeograph: return 1;
    case TokenKind::kWord: return word_rule(t.cps, lang);
    case TokenKind::kNumber: return number_syllables(text::encode_utf8(t.cps), lang).value;
    case TokenKind::kPunct: return 0;
    case TokenKind::kUnknown:
      ++unknown;
      return 0;
  }
  return 0;
}

}  // namespace

Language parse_language(std::string_view code) {
  std::string lower;
  for (char c : code) lower.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
  if (lower == "zh") return Language::kZh;
  if (lower == "en") return Language::kEn;
  if (lower == "de") return Language::kDe;
  if (lower == "es") return Language::kEs;
  throw Error(ErrorCode::kUnsupportedLanguage,
              "unsupported language code '" + std::string(code) + "' (expected zh, en, de or es)");
}

std::string_view language_code(Language lang) {
  switch (lang) {
    case Language::kZh: return "zh";
    case Language::kEn: return "en";
    case Language::kDe: return "de";
    case Language::kEs: return "es";
  }
  return "";
}

std::string_view language_name(Language lang) {
  switch (lang) {
    case Language::kZh: return "Chinese";
    case Language::kEn: return "English";
    case Language::kDe: return "German";
    case Language::kEs: return "Spanish";
  }
  return "";
}

const LanguageProfile& language_profile(Language lang) {
  return kProfiles[static_cast<std::size_t>(lang)];
}

std::vector<Token> tokenize(std::string_view text_in, Language /*lang*/) {
  std::vector<Token> out;
  for (auto& t : tokenize_cps(text::decode_utf8(text_in))) {
    out.push_back({text::encode_utf8(t.cps), t.kind});
  }
  return out;
}

SyllableCount number_syllables(std::string_view digits, Language lang) {
  std::string clean;
  for (char32_t cp : text::decode_utf8(digits)) {
    if (text::is_digit(cp)) clean.push_back(static_cast<char>(text::fold_latin(cp)));
  }
  if (clean.empty()) return {};
  const bool leading_zero = clean.size() > 1 && clean.front() == '0';
  if (clean.size() <= 4 && !leading_zero) {
    return {spoken_number(static_cast<unsigned>(std::stoul(clean)), lang)};
  }
  std::size_t total = 0;
  for (char c : clean) total += spoken_number(static_cast<unsigned>(c - '0'), lang);
  return {total};
}

SyllableDetail count_syllables_detailed(std::string_view text_in, Language lang) {
  SyllableDetail detail;
  for (const auto& t : tokenize_cps(text::decode_utf8(text_in))) {
    detail.count.value += token_syllables(t, lang, detail.unknown_tokens);
  }
  if (detail.unknown_tokens > 0) {
    g_unknown_warnings.fetch_add(detail.unknown_tokens, std::memory_order_relaxed);
  }
  return detail;
}

SyllableCount count_syllables(std::string_view text_in, Language lang) {
  return count_syllables_detailed(text_in, lang).count;
}

SyllableCount count_word_syllables(std::string_view word, Language lang) {
  return count_syllables_detailed(word, lang).count;
}

std::uint64_t unknown_symbol_warnings() {
  return g_unknown_warnings.load(std::memory_order_relaxed);
}

}  // namespace tempo
