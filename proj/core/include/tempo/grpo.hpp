#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tempo/reward.hpp"
#include "tempo/syllable.hpp"

namespace tempo {

struct Candidate {
  double rho = 0.0;
  double quality = 0.0;
};

struct CandidatePool {
  std::string id;
  SyllableCount source_syllables;
  std::vector<Candidate> candidates;
  std::vector<double> initial_logits;  // empty means uniform

  void validate() const;
};

std::vector<double> softmax(std::span<const double> logits);

// Temperature-1 softmax policy with one logit vector per prompt.
class SoftmaxPolicy {
 public:
  SoftmaxPolicy() = default;
  explicit SoftmaxPolicy(std::vector<std::vector<double>> logits) : logits_(std::move(logits)) {}

  std::size_t prompts() const { return logits_.size(); }
  const std::vector<double>& logits(std::size_t prompt) const { return logits_.at(prompt); }
  std::vector<double>& logits(std::size_t prompt) { return logits_.at(prompt); }
  std::vector<double> probabilities(std::size_t prompt) const { return softmax(logits_.at(prompt)); }

 private:
  std::vector<std::vector<double>> logits_;
};

struct GRPOConfig {
  std::size_t group_size = 8;
  double clip_epsilon = 0.2;
  double kl_beta = 0.0;
  double learning_rate = 0.1;
  std::size_t steps = 500;
  std::uint64_t seed = 42;
  std::size_t updates_per_step = 1;  // >1 reuses each group, so clipping can engage
  double quality_noise_std = 0.0;    // Gaussian noise on observed quality, clamped to [0, 1]

  void validate() const;
};

struct AdvantageBatch {
  std::vector<double> rewards;
  std::vector<double> advantages;
  double group_mean = 0.0;
  double group_std = 0.0;  // population
};

// Error(kInvalidArgument) when fewer than two rewards are given.
AdvantageBatch normalize_advantages(std::span<const double> rewards);

// min(r * A, clip(r, 1 - eps, 1 + eps) * A)
double clipped_term(double prob_ratio, double advantage, double epsilon);

// KL(p || q) over a discrete support; Error(kSupportMismatch) on size mismatch.
double kl_divergence(std::span<const double> p, std::span<const double> q);
double kl_term(const SoftmaxPolicy& policy, const SoftmaxPolicy& reference, std::size_t prompt);

double entropy(std::span<const double> p);
double total_variation(std::span<const double> p, std::span<const double> q);

struct StepStats {
  std::size_t step = 0;
  double mean_rho = 0.0;     // mean sampled rho over all prompts
  double expected_rho = 0.0;  // mean over prompts of the policy's expected rho, after the update
  double mean_reward = 0.0;  // mean composite reward of the sampled candidates
  double entropy = 0.0;      // mean policy entropy over prompts, after the update
  double grad_norm = 0.0;    // L2 norm of the surrogate gradient over all logits
  double kl = 0.0;           // mean KL(pi || P0) over prompts, after the update
};

struct SimulationResult {
  std::vector<StepStats> trajectory;
  SoftmaxPolicy final_policy;
  SoftmaxPolicy reference;
};

// Seeded GRPO over discrete candidate pools. Each step draws group_size
// candidates per prompt from the current policy, scores them with the
// composite reward, normalizes advantages within the group and takes a
// gradient ascent step on the clipped surrogate (minus beta * KL when beta > 0).
SimulationResult simulate_training(std::span<const CandidatePool> pools,
                                   const LengthRewardConfig& reward_cfg,
                                   const RewardWeights& weights, const GRPOConfig& cfg);

// First step index whose expected_rho lies inside `bounds`, or trajectory size.
// The policy expectation is used because a single group's sample mean is too
// noisy to mark the moment the policy itself reaches the interval.
std::size_t steps_to_entry(std::span<const StepStats> trajectory, const RatioBounds& bounds);

nlohmann::json to_json(const StepStats& s);
CandidatePool pool_from_json(const nlohmann::json& j);
GRPOConfig grpo_config_from_json(const nlohmann::json& j, GRPOConfig base = {});

}  // namespace tempo
