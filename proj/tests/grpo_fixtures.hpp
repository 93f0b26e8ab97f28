#pragma once

#include <algorithm>
#include <initializer_list>
#include <string>
#include <vector>

#include "tempo/grpo.hpp"

namespace tempo::testing {

// One prompt per source length s. Candidates cover target lengths s/2 .. 3s/2,
// so rho moves in steps of 1/s. Quality rises with rho until it saturates at
// `saturation`, so shorter outputs cost some quality. The initial policy is a
// Gaussian over rho centred on a verbose 1.2, which is where an untuned
// translator tends to sit.
inline std::vector<CandidatePool> length_pools(std::initializer_list<int> lengths,
                                               double short_saturation, int short_max,
                                               double saturation = 0.8,
                                               double prior_center = 1.2,
                                               double prior_width = 0.2) {
  std::vector<CandidatePool> pools;
  for (int s : lengths) {
    CandidatePool p;
    p.id = "s" + std::to_string(s);
    p.source_syllables = SyllableCount{static_cast<std::size_t>(s)};
    const double sat = s <= short_max ? short_saturation : saturation;
    for (int t = (s + 1) / 2; t <= (3 * s) / 2; ++t) {
      const double rho = static_cast<double>(t) / s;
      p.candidates.push_back({rho, 0.9 * std::min(1.0, rho / sat)});
      const double z = (rho - prior_center) / prior_width;
      p.initial_logits.push_back(-0.5 * z * z);
    }
    pools.push_back(std::move(p));
  }
  return pools;
}

// Every prompt has at least one candidate inside [0.8, 0.9].
inline std::vector<CandidatePool> convergence_pools() {
  return length_pools({5, 6, 7, 9, 11, 13, 16, 20, 24, 30}, 0.8, 0);
}

// Short and long sources mixed. For s in {3, 4, 6} no target length lands in
// [0.8, 0.9]; s = 5 hits 0.8 exactly.
inline std::vector<CandidatePool> ablation_pools() {
  return length_pools({3, 4, 5, 6, 8, 10, 12, 16, 20, 24, 28, 32}, 0.6, 4);
}

inline double mean_source_syllables(const std::vector<CandidatePool>& pools) {
  double sum = 0.0;
  for (const auto& p : pools) sum += static_cast<double>(p.source_syllables.value);
  return sum / static_cast<double>(pools.size());
}

}  // namespace tempo::testing
