#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tempo {

enum class PosTag {
  kNoun,
  kProperNoun,
  kNumeral,
  kMeasure,
  kVerb,
  kAuxiliary,
  kAdjective,
  kAdverb,
  kPronoun,
  kPreposition,
  kConjunction,
  kParticle,
  kInterjection,
  kLocative,
  kTime,
  kPunct,
  kOther,
};

std::string_view pos_tag_name(PosTag tag);

struct TaggedToken {
  std::string text;
  PosTag tag;
};

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<TaggedToken> tag(std::string_view text) const = 0;
};

// Forward maximum matching over a word<TAB>tag lexicon. Out-of-lexicon runs of
// two or more Han characters are tagged as nouns, single ones as kOther;
// Latin words not in the lexicon are proper nouns when capitalized and nouns
// otherwise; digit runs and Chinese numeral runs are numerals.
class LexiconTagger : public PosTagger {
 public:
  explicit LexiconTagger(std::string_view tsv);

  // The lexicon compiled into the library (assets/lexicon/zh_lexicon.tsv).
  static std::shared_ptr<const LexiconTagger> bundled();

  std::vector<TaggedToken> tag(std::string_view text) const override;
  std::size_t size() const { return lexicon_.size(); }

 private:
  std::unordered_map<std::u32string, PosTag> lexicon_;
  std::size_t max_len_ = 1;
};

}  // namespace tempo
