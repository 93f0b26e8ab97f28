#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tempo {

struct MinHashConfig {
  std::size_t shingle_k = 3;
  std::size_t num_perm = 128;
  std::size_t bands = 16;
  std::size_t rows = 8;
  double threshold = 0.8;  // exact shingle Jaccard required to merge a colliding pair
  std::uint64_t seed = 0x5eed;

  // Error(kInvalidBanding) unless bands * rows == num_perm and all are > 0.
  void validate() const;
  // Similarity at which a pair shares a band with probability about 1/2.
  double lsh_threshold() const;
};

std::uint64_t splitmix64(std::uint64_t x);

// Sorted, unique hashes of the k-character shingles of `text` (whitespace
// removed, Latin folded). Texts shorter than k form a single shingle.
std::vector<std::uint64_t> shingle_hashes(std::string_view text, std::size_t k);
double jaccard(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);
std::vector<std::uint64_t> minhash_signature(std::span<const std::uint64_t> shingles,
                                             const MinHashConfig& cfg);
double estimated_jaccard(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

// Indices of the texts that survive deduplication, ascending. Candidates come
// from LSH band collisions and merge when their exact shingle Jaccard reaches
// cfg.threshold; the earliest text of a cluster survives.
std::vector<std::size_t> dedup_indices(std::span<const std::string> texts, const MinHashConfig& cfg);

}  // namespace tempo
