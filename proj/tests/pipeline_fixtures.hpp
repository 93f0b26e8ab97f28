#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tempo/pipeline.hpp"
#include "tempo/text.hpp"

namespace tempo::testing {

inline const std::u32string& han_pool() {
  static const std::u32string pool =
      U"天地人山水风云雨雪花草木日月星光明时间世界生活工作学习朋友家里城市道路"
      U"游戏电影旅行音乐故事角色战斗任务宝箱地图城堡森林河流海洋飞机火车汽车";
  return pool;
}

inline std::string random_han(std::mt19937_64& rng, std::size_t n) {
  std::u32string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(han_pool()[rng() % han_pool().size()]);
  return text::encode_utf8(s);
}

// A standalone record over `text` lasting `duration` seconds.
inline BenchRecord single_record(const std::string& id, const std::string& text, double duration,
                                 Domain domain = Domain::kGeneral) {
  Video v{id, domain, {{text, 0.0, duration, domain}}};
  auto r = build_records(std::span<const Video>(&v, 1), Language::kZh).front();
  r.id = id;
  return r;
}

// `per_domain` clean, distinct records for each of the five domains, with ids
// of the form "<domain>-<n>".
inline std::vector<BenchRecord> domain_corpus(std::size_t per_domain, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<BenchRecord> out;
  for (auto d : {Domain::kGaming, Domain::kFilmTv, Domain::kTravel, Domain::kAcgn, Domain::kGeneral}) {
    for (std::size_t i = 0; i < per_domain; ++i) {
      const std::size_t n = 12 + rng() % 10;
      out.push_back(single_record(std::string(domain_name(d)) + "-" + std::to_string(i),
                                  random_han(rng, n), static_cast<double>(n) / 5.0, d));
    }
  }
  return out;
}

}  // namespace tempo::testing
