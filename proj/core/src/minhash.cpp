#include "tempo/minhash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "tempo/error.hpp"
#include "tempo/text.hpp"

namespace tempo {

void MinHashConfig::validate() const {
  if (shingle_k == 0) throw Error(ErrorCode::kInvalidArgument, "shingle_k must be >= 1");
  if (bands == 0 || rows == 0 || bands * rows != num_perm) {
    throw Error(ErrorCode::kInvalidBanding,
                "bands (" + std::to_string(bands) + ") x rows (" + std::to_string(rows) +
                    ") must equal num_perm (" + std::to_string(num_perm) + ")");
  }
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dedup threshold must lie in (0, 1]");
  }
}

double MinHashConfig::lsh_threshold() const {
  return std::pow(1.0 / static_cast<double>(bands), 1.0 / static_cast<double>(rows));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::uint64_t> shingle_hashes(std::string_view input, std::size_t k) {
  std::u32string cps;
  for (char32_t c : text::decode_utf8(input)) {
    if (text::classify(c) == text::CharClass::kSpace) continue;
    cps.push_back(text::fold_latin(c));
  }
  std::vector<std::uint64_t> out;
  if (cps.empty()) return out;
  const std::u32string_view view(cps);
  if (cps.size() < k) {
    out.push_back(text::fnv1a64(text::encode_utf8(view)));
    return out;
  }
  out.reserve(cps.size() - k + 1);
  for (std::size_t i = 0; i + k <= cps.size(); ++i) {
    out.push_back(text::fnv1a64(text::encode_utf8(view.substr(i, k))));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double jaccard(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::uint64_t> minhash_signature(std::span<const std::uint64_t> shingles,
                                             const MinHashConfig& cfg) {
  std::vector<std::uint64_t> sig(cfg.num_perm, std::numeric_limits<std::uint64_t>::max());
  for (std::size_t p = 0; p < cfg.num_perm; ++p) {
    const std::uint64_t salt = splitmix64(cfg.seed + p);
    for (std::uint64_t h : shingles) sig[p] = std::min(sig[p], splitmix64(h ^ salt));
  }
  return sig;
}

double estimated_jaccard(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "signatures differ in length");
  }
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

std::vector<std::size_t> dedup_indices(std::span<const std::string> texts, const MinHashConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<std::uint64_t>> kept_shingles(texts.size());
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  std::vector<std::size_t> survivors;

  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto shingles = shingle_hashes(texts[i], cfg.shingle_k);
    const auto sig = minhash_signature(shingles, cfg);
    std::vector<std::uint64_t> keys(cfg.bands);
    for (std::size_t b = 0; b < cfg.bands; ++b) {
      std::uint64_t h = splitmix64(b);
      for (std::size_t r = 0; r < cfg.rows; ++r) h = splitmix64(h ^ sig[b * cfg.rows + r]);
      keys[b] = h;
    }

    bool duplicate = false;
    for (std::size_t b = 0; b < cfg.bands && !duplicate; ++b) {
      auto it = buckets.find(keys[b]);
      if (it == buckets.end()) continue;
      for (std::size_t j : it->second) {
        if (jaccard(shingles, kept_shingles[j]) >= cfg.threshold) {
          duplicate = true;
          break;
        }
      }
    }
    if (duplicate) continue;
    survivors.push_back(i);
    for (auto key : keys) buckets[key].push_back(i);
    kept_shingles[i] = std::move(shingles);
  }
  return survivors;
}

}  // namespace tempo
