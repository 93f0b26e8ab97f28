#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "support.hpp"
#include "tempo/error.hpp"
#include "tempo/syllable.hpp"
#include "tempo/text.hpp"

using namespace tempo;

TEST_CASE("utf8 round trip and classification") {
  const std::string s = "Grüße 你好 123 ４５";
  CHECK(text::encode_utf8(text::decode_utf8(s)) == s);
  CHECK(text::classify(U'你') == text::CharClass::kHan);
  CHECK(text::classify(U'ü') == text::CharClass::kLatin);
  CHECK(text::classify(U'４') == text::CharClass::kDigit);
  CHECK(text::classify(U'，') == text::CharClass::kPunct);
  CHECK(text::fold_latin(U'Ä') == U'ä');
  CHECK(text::decode_utf8("\xff") == std::u32string(1, U'�'));
}

TEST_CASE("language codes") {
  CHECK(parse_language("ZH") == Language::kZh);
  CHECK(language_code(Language::kEs) == "es");
  CHECK_THROWS_AS(parse_language("fr"), Error);
  try {
    parse_language("fr");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedLanguage);
  }
}

TEST_CASE("density table") {
  CHECK(language_profile(Language::kZh).syllable_rate == doctest::Approx(5.18));
  CHECK(language_profile(Language::kEn).syllable_rate == doctest::Approx(6.19));
  CHECK(language_profile(Language::kDe).syllable_rate == doctest::Approx(5.97));
  CHECK(language_profile(Language::kEs).syllable_rate == doctest::Approx(7.82));
  CHECK(language_profile(Language::kZh).info_density == doctest::Approx(0.94));
  CHECK(language_profile(Language::kEn).info_density == doctest::Approx(0.91));
  CHECK(language_profile(Language::kDe).info_density == doctest::Approx(0.79));
  CHECK(language_profile(Language::kEs).info_density == doctest::Approx(0.63));
  CHECK(language_profile(Language::kEn).theoretical_expansion_from_zh == doctest::Approx(1.03));
  CHECK(language_profile(Language::kDe).theoretical_expansion_from_zh == doctest::Approx(1.19));
  CHECK(language_profile(Language::kEs).theoretical_expansion_from_zh == doctest::Approx(1.49));
}

TEST_CASE("zh counts ideographs") {
  CHECK(count_syllables("两人之间的关系越来越亲密", Language::kZh).value == 12);
  CHECK(count_syllables("你好，世界！", Language::kZh).value == 4);
  CHECK(count_syllables("", Language::kZh).value == 0);
  CHECK(count_syllables("，。！", Language::kZh).value == 0);
}

TEST_CASE("en words") {
  CHECK(count_word_syllables("the", Language::kEn).value == 1);
  CHECK(count_word_syllables("relationship", Language::kEn).value == 4);
  CHECK(count_word_syllables("increasingly", Language::kEn).value == 4);
  CHECK(count_word_syllables("intimate", Language::kEn).value == 3);
  CHECK(count_word_syllables("table", Language::kEn).value == 2);
  CHECK(count_word_syllables("make", Language::kEn).value == 1);
  CHECK(count_word_syllables("don't", Language::kEn).value == 1);
}

TEST_CASE("en rule against the frozen pronunciation oracle") {
  const auto oracle = testing::load_json("en_syllable_oracle.json");
  REQUIRE(oracle.size() == 200);
  std::size_t hits = 0;
  for (const auto& entry : oracle) {
    const auto word = entry[0].get<std::string>();
    const auto got = count_word_syllables(word, Language::kEn).value;
    bool ok = false;
    for (const auto& allowed : entry[1]) ok = ok || allowed.get<std::size_t>() == got;
    if (ok) {
      ++hits;
    } else {
      MESSAGE(word << " counted " << got);
    }
  }
  CHECK(hits >= 190);
}

TEST_CASE("de and es nuclei") {
  CHECK(count_word_syllables("Haus", Language::kDe).value == 1);
  CHECK(count_word_syllables("Beziehung", Language::kDe).value == 3);
  CHECK(count_word_syllables("Freundschaft", Language::kDe).value == 2);
  CHECK(count_word_syllables("Boot", Language::kDe).value == 1);
  CHECK(count_word_syllables("ciudad", Language::kEs).value == 2);
  CHECK(count_word_syllables("relación", Language::kEs).value == 3);
  CHECK(count_word_syllables("día", Language::kEs).value == 2);
  CHECK(count_word_syllables("poeta", Language::kEs).value == 3);
}

TEST_CASE("numbers are spoken") {
  CHECK(number_syllables("2024", Language::kEn).value == 6);
  CHECK(number_syllables("100", Language::kEs).value == 1);
  CHECK(number_syllables("101", Language::kEs).value == 4);
  CHECK(number_syllables("21", Language::kDe).value == 4);
  CHECK(number_syllables("15", Language::kZh).value == 2);
  CHECK(number_syllables("110", Language::kZh).value == 4);
  CHECK(number_syllables("1005", Language::kZh).value == 4);
  // digit by digit past 9999 and with leading zeros
  CHECK(number_syllables("12345", Language::kEn).value ==
        number_syllables("1", Language::kEn).value + number_syllables("2", Language::kEn).value +
            number_syllables("3", Language::kEn).value + number_syllables("4", Language::kEn).value +
            number_syllables("5", Language::kEn).value);
  CHECK(number_syllables("007", Language::kEn).value == 2 + 2 + 2);
  CHECK(count_syllables("1,000 people", Language::kEn).value == count_syllables("1000 people", Language::kEn).value);
}

TEST_CASE("unknown scripts count zero and warn") {
  const auto before = unknown_symbol_warnings();
  const auto d = count_syllables_detailed("hello мир", Language::kEn);
  CHECK(d.count.value == 2);
  CHECK(d.unknown_tokens == 1);
  CHECK(unknown_symbol_warnings() > before);
}

TEST_CASE("property: additivity over whitespace-separated words") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> words = {"the", "bond", "between", "them", "growing", "closer",
                                          "intimate", "relationship", "two", "more", "Haus", "día"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string a, b;
    for (int i = 0; i < 4; ++i) a += words[rng() % words.size()] + " ";
    for (int i = 0; i < 3; ++i) b += words[rng() % words.size()] + " ";
    CHECK(count_syllables(a + b, Language::kEn) ==
          count_syllables(a, Language::kEn) + count_syllables(b, Language::kEn));
  }
}

TEST_CASE("property: whitespace and punctuation invariance") {
  const std::string s = "The bond between them is growing closer";
  const auto base = count_syllables(s, Language::kEn);
  CHECK(count_syllables("  The  bond between\tthem is growing closer.  ", Language::kEn) == base);
  CHECK(count_syllables("The bond, between them; is growing closer!", Language::kEn) == base);
  CHECK(count_syllables("两人 之间，的关系越来越亲密。", Language::kZh).value == 12);
}

TEST_CASE("concurrent counting is consistent") {
  const std::string s = "The relationship between the two is becoming increasingly intimate.";
  const auto want = count_syllables(s, Language::kEn);
  std::vector<std::thread> ts;
  std::atomic<int> bad{0};
  for (int t = 0; t < 8; ++t) {
    ts.emplace_back([&] {
      for (int i = 0; i < 500; ++i) {
        if (count_syllables(s, Language::kEn) != want) ++bad;
      }
    });
  }
  for (auto& t : ts) t.join();
  CHECK(bad.load() == 0);
}

TEST_CASE("reference rows") {
  const auto t = tempo::testing::load_json("reference_rows.json");
  CHECK(count_syllables(t["source"]["text"].get<std::string>(), Language::kZh).value == 12);
  std::size_t exact = 0;
  for (const auto& row : t["rows"]) {
    exact += count_syllables(row["text"].get<std::string>(), Language::kEn).value ==
             row["syllables"].get<std::size_t>();
  }
  // Two rows are out of reach for any per-word counter; see the next case.
  CHECK(exact == 9);
}

TEST_CASE("reference rows 10 and 11 contradict row 9 under standard pronunciations") {
  const auto t = tempo::testing::load_json("reference_rows.json");
  auto published = [&](std::size_t i) { return t["rows"][i]["syllables"].get<int>(); };
  auto words = [](std::initializer_list<const char*> ws) {
    int n = 0;
    for (const char* w : ws) n += static_cast<int>(count_word_syllables(w, Language::kEn).value);
    return n;
  };
  // Dictionary pronunciations: between 2, them 1, closer 2, their 1, tighter 2.
  CHECK(words({"between"}) == 2);
  CHECK(words({"them"}) == 1);
  CHECK(words({"closer"}) == 2);
  CHECK(words({"their"}) == 1);
  CHECK(words({"tighter"}) == 2);

  // Row 9, "Bond between them grows closer." = 7, fixes bond + grows.
  const int bond_grows = published(8) - 2 - 1 - 2;
  CHECK(bond_grows == 2);
  // Row 10, "Their bond grows closer." = 6, then needs a two-syllable "their".
  CHECK(published(9) - bond_grows - 2 == 2);
  // Row 11, "Bond grows tighter." = 3, needs a one-syllable "tighter".
  CHECK(published(10) - bond_grows == 1);
}
