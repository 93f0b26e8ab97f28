#include "tempo/tagger.hpp"

#include <array>

#include "tempo/assets.hpp"
#include "tempo/error.hpp"
#include "tempo/text.hpp"

namespace tempo {

namespace {

PosTag parse_tag(std::string_view code) {
  static const std::array<std::pair<std::string_view, PosTag>, 15> kCodes = {{
      {"n", PosTag::kNoun},         {"nr", PosTag::kProperNoun}, {"m", PosTag::kNumeral},
      {"q", PosTag::kMeasure},      {"v", PosTag::kVerb},        {"vx", PosTag::kAuxiliary},
      {"a", PosTag::kAdjective},    {"d", PosTag::kAdverb},      {"r", PosTag::kPronoun},
      {"p", PosTag::kPreposition},  {"c", PosTag::kConjunction}, {"u", PosTag::kParticle},
      {"y", PosTag::kParticle},     {"e", PosTag::kInterjection}, {"f", PosTag::kLocative},
  }};
  for (const auto& [k, tag] : kCodes) {
    if (k == code) return tag;
  }
  if (code == "t") return PosTag::kTime;
  throw Error(ErrorCode::kTagger, "unknown lexicon tag '" + std::string(code) + "'");
}

bool is_cn_numeral(char32_t c) {
  static constexpr std::u32string_view kDigits = U"零一二三四五六七八九十百千万亿两几";
  return kDigits.find(c) != std::u32string_view::npos;
}

}  // namespace

std::string_view pos_tag_name(PosTag tag) {
  switch (tag) {
    case PosTag::kNoun: return "noun";
    case PosTag::kProperNoun: return "proper_noun";
    case PosTag::kNumeral: return "numeral";
    case PosTag::kMeasure: return "measure";
    case PosTag::kVerb: return "verb";
    case PosTag::kAuxiliary: return "auxiliary";
    case PosTag::kAdjective: return "adjective";
    case PosTag::kAdverb: return "adverb";
    case PosTag::kPronoun: return "pronoun";
    case PosTag::kPreposition: return "preposition";
    case PosTag::kConjunction: return "conjunction";
    case PosTag::kParticle: return "particle";
    case PosTag::kInterjection: return "interjection";
    case PosTag::kLocative: return "locative";
    case PosTag::kTime: return "time";
    case PosTag::kPunct: return "punct";
    case PosTag::kOther: return "other";
  }
  return "other";
}

LexiconTagger::LexiconTagger(std::string_view tsv) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < tsv.size()) {
    auto end = tsv.find('\n', pos);
    if (end == std::string_view::npos) end = tsv.size();
    const auto line = tsv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kTagger, "lexicon line " + std::to_string(line_no) + " lacks a tab");
    }
    std::u32string word;
    for (char32_t c : text::decode_utf8(line.substr(0, tab))) word.push_back(text::fold_latin(c));
    const auto tag = parse_tag(text::trim(line.substr(tab + 1)));
    max_len_ = std::max(max_len_, word.size());
    lexicon_.emplace(std::move(word), tag);  // first entry wins
  }
}

std::shared_ptr<const LexiconTagger> LexiconTagger::bundled() {
  static const auto instance = [] {
    const auto bytes = find_asset("lexicon/zh_lexicon.tsv");
    if (!bytes) throw Error(ErrorCode::kTagger, "bundled lexicon asset is missing");
    return std::make_shared<const LexiconTagger>(*bytes);
  }();
  return instance;
}

std::vector<TaggedToken> LexiconTagger::tag(std::string_view input) const {
  using text::CharClass;
  const auto cps = text::decode_utf8(input);
  std::vector<TaggedToken> out;
  const auto emit = [&](std::size_t from, std::size_t to, PosTag tag) {
    out.push_back({text::encode_utf8(std::u32string_view(cps).substr(from, to - from)), tag});
  };
  std::size_t i = 0;
  std::size_t unknown_start = std::u32string::npos;
  const auto flush_unknown = [&](std::size_t upto) {
    if (unknown_start == std::u32string::npos) return;
    emit(unknown_start, upto, upto - unknown_start >= 2 ? PosTag::kNoun : PosTag::kOther);
    unknown_start = std::u32string::npos;
  };

  while (i < cps.size()) {
    const auto cls = text::classify(cps[i]);
    if (cls == CharClass::kHan) {
      std::size_t best = 0;
      PosTag best_tag = PosTag::kOther;
      const std::size_t limit = std::min(max_len_, cps.size() - i);
      for (std::size_t len = limit; len >= 1; --len) {
        bool all_han = true;
        for (std::size_t k = 0; k < len; ++k) all_han = all_han && text::is_han(cps[i + k]);
        if (!all_han) continue;
        auto it = lexicon_.find(cps.substr(i, len));
        if (it != lexicon_.end()) {
          best = len;
          best_tag = it->second;
          break;
        }
      }
      if (best == 0 && is_cn_numeral(cps[i])) {
        std::size_t j = i;
        while (j < cps.size() && is_cn_numeral(cps[j])) ++j;
        best = j - i;
        best_tag = PosTag::kNumeral;
      }
      if (best == 0) {
        if (unknown_start == std::u32string::npos) unknown_start = i;
        ++i;
        continue;
      }
      flush_unknown(i);
      emit(i, i + best, best_tag);
      i += best;
      continue;
    }
    flush_unknown(i);
    if (cls == CharClass::kSpace) {
      ++i;
    } else if (cls == CharClass::kLatin) {
      std::size_t j = i;
      std::u32string folded;
      while (j < cps.size() && (text::is_latin_letter(cps[j]) ||
                                (text::classify(cps[j]) == CharClass::kApostrophe && j + 1 < cps.size() &&
                                 text::is_latin_letter(cps[j + 1])))) {
        folded.push_back(text::fold_latin(cps[j]));
        ++j;
      }
      PosTag tag;
      if (auto it = lexicon_.find(folded); it != lexicon_.end()) {
        tag = it->second;
      } else {
        tag = text::fold_latin(cps[i]) != cps[i] ? PosTag::kProperNoun : PosTag::kNoun;
      }
      emit(i, j, tag);
      i = j;
    } else if (cls == CharClass::kDigit) {
      std::size_t j = i;
      while (j < cps.size() && text::is_digit(cps[j])) ++j;
      emit(i, j, PosTag::kNumeral);
      i = j;
    } else if (cls == CharClass::kPunct || cls == CharClass::kApostrophe) {
      emit(i, i + 1, PosTag::kPunct);
      ++i;
    } else {
      emit(i, i + 1, PosTag::kOther);
      ++i;
    }
  }
  flush_unknown(cps.size());
  return out;
}

}  // namespace tempo
