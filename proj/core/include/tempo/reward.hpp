#pragma once

#include <numbers>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tempo/syllable.hpp"

namespace tempo {

struct RatioBounds {
  double lower = 0.8;
  double upper = 0.9;

  bool contains(double rho) const { return rho >= lower && rho <= upper; }
  void validate() const;
  friend bool operator==(const RatioBounds&, const RatioBounds&) = default;
};

// Calibrated target intervals: en [0.8, 0.9], de [0.9, 1.0], es [1.0, 1.1].
// zh has no calibrated interval and throws Error(kUnsupportedLanguage).
RatioBounds default_bounds(Language target);

struct DynamicBoundsConfig {
  double alpha1 = 0.4;
  double alpha2 = 0.5;
  double corpus_mean_syllables = 0.0;  // mu; must be set explicitly

  void validate() const;
};

enum class LengthRewardMode { kDynamic, kStatic, kAutonomous };

std::string_view mode_name(LengthRewardMode mode);
LengthRewardMode parse_mode(std::string_view name);

// kFarBound follows the published definition delta = max(|rho-L|, |rho-R|).
// kNearBound is the distance to the closest bound, kept for comparison runs.
enum class DeltaRule { kFarBound, kNearBound };

struct LengthRewardConfig {
  LengthRewardMode mode = LengthRewardMode::kStatic;
  double k = 300.0;
  double theta = std::numbers::pi;
  RatioBounds bounds{};
  std::optional<DynamicBoundsConfig> dynamic;
  DeltaRule delta_rule = DeltaRule::kFarBound;

  void validate() const;
};

struct RewardWeights {
  double lambda_len = 0.5;
  double lambda_qual = 0.5;

  void validate() const;
};

struct RewardBreakdown {
  double rho = 0.0;
  RatioBounds bounds_used{};
  double length_reward = 0.0;
  double quality_reward = 0.0;
  double composite = 0.0;
  LengthRewardMode mode = LengthRewardMode::kStatic;
};

// alpha1 + alpha2 * sqrt(sigma / mu) below the corpus mean, 1 at or above it.
double gamma_factor(SyllableCount src_syllables, const DynamicBoundsConfig& cfg);

RatioBounds dynamic_bounds(SyllableCount src_syllables, const RatioBounds& base,
                           const DynamicBoundsConfig& cfg);

double length_reward_interval(double rho, const RatioBounds& bounds, double k,
                              DeltaRule rule = DeltaRule::kFarBound);

// min(cos(theta * rho), 0)
double length_reward_auto(double rho, double theta);

RewardBreakdown composite_reward(SyllableCount src, SyllableCount tgt, double quality,
                                 const RewardWeights& weights, const LengthRewardConfig& cfg);

// Same as composite_reward when rho is already known; src is still needed for
// the dynamic relaxation.
RewardBreakdown composite_reward_from_rho(double rho, SyllableCount src, double quality,
                                          const RewardWeights& weights,
                                          const LengthRewardConfig& cfg);

nlohmann::json to_json(const RatioBounds& b);
nlohmann::json to_json(const RewardBreakdown& b);

}  // namespace tempo
