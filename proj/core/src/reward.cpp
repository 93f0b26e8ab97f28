#include "tempo/reward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tempo/error.hpp"
#include "tempo/expansion.hpp"

namespace tempo {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::kConfig, msg); }

}  // namespace

void RatioBounds::validate() const {
  if (!(lower > 0.0) || !(lower <= upper) || !std::isfinite(upper)) {
    config_error("bounds must satisfy 0 < lower <= upper, got [" + std::to_string(lower) + ", " +
                 std::to_string(upper) + "]");
  }
}

RatioBounds default_bounds(Language target) {
  switch (target) {
    case Language::kEn: return {0.8, 0.9};
    case Language::kDe: return {0.9, 1.0};
    case Language::kEs: return {1.0, 1.1};
    case Language::kZh: break;
  }
  throw Error(ErrorCode::kUnsupportedLanguage, "no calibrated ratio bounds for target language zh");
}

void DynamicBoundsConfig::validate() const {
  if (!(corpus_mean_syllables > 0.0) || !std::isfinite(corpus_mean_syllables)) {
    config_error("dynamic bounds need corpus_mean > 0");
  }
  if (alpha1 < 0.0 || alpha2 < 0.0) config_error("alpha1 and alpha2 must be non-negative");
  if (alpha1 + alpha2 > 1.0) config_error("alpha1 + alpha2 must not exceed 1");
}

std::string_view mode_name(LengthRewardMode mode) {
  switch (mode) {
    case LengthRewardMode::kDynamic: return "dynamic";
    case LengthRewardMode::kStatic: return "static";
    case LengthRewardMode::kAutonomous: return "autonomous";
  }
  return "";
}

LengthRewardMode parse_mode(std::string_view name) {
  if (name == "dynamic") return LengthRewardMode::kDynamic;
  if (name == "static") return LengthRewardMode::kStatic;
  if (name == "autonomous") return LengthRewardMode::kAutonomous;
  config_error("unknown reward mode '" + std::string(name) + "'");
}

void LengthRewardConfig::validate() const {
  bounds.validate();
  if (!(k > 0.0)) config_error("k must be > 0");
  if (!(theta > 0.0)) config_error("theta must be > 0");
  if (mode == LengthRewardMode::kDynamic) {
    if (!dynamic) config_error("mode 'dynamic' requires a dynamic bounds config (corpus_mean)");
    dynamic->validate();
  }
}

void RewardWeights::validate() const {
  if (!(lambda_len >= 0.0) || !(lambda_qual >= 0.0)) {
    config_error("reward weights must be non-negative");
  }
}

double gamma_factor(SyllableCount src_syllables, const DynamicBoundsConfig& cfg) {
  const double sigma = static_cast<double>(src_syllables.value);
  if (sigma >= cfg.corpus_mean_syllables) return 1.0;
  return cfg.alpha1 + cfg.alpha2 * std::sqrt(sigma / cfg.corpus_mean_syllables);
}

RatioBounds dynamic_bounds(SyllableCount src_syllables, const RatioBounds& base,
                           const DynamicBoundsConfig& cfg) {
  return {base.lower * gamma_factor(src_syllables, cfg), base.upper};
}

double length_reward_interval(double rho, const RatioBounds& bounds, double k, DeltaRule rule) {
  if (bounds.contains(rho)) return 1.0;
  const double dl = std::abs(rho - bounds.lower);
  const double du = std::abs(rho - bounds.upper);
  const double delta = rule == DeltaRule::kFarBound ? std::max(dl, du) : std::min(dl, du);
  return std::exp(-k * delta * delta);
}

double length_reward_auto(double rho, double theta) { return std::min(std::cos(theta * rho), 0.0); }

RewardBreakdown composite_reward_from_rho(double rho, SyllableCount src, double quality,
                                          const RewardWeights& weights,
                                          const LengthRewardConfig& cfg) {
  if (!std::isfinite(quality)) throw Error(ErrorCode::kInvalidArgument, "quality must be finite");
  RewardBreakdown out;
  out.rho = rho;
  out.mode = cfg.mode;
  out.quality_reward = quality;
  switch (cfg.mode) {
    case LengthRewardMode::kDynamic:
      if (!cfg.dynamic) config_error("mode 'dynamic' requires a dynamic bounds config (corpus_mean)");
      out.bounds_used = dynamic_bounds(src, cfg.bounds, *cfg.dynamic);
      out.length_reward = length_reward_interval(rho, out.bounds_used, cfg.k, cfg.delta_rule);
      break;
    case LengthRewardMode::kStatic:
      out.bounds_used = cfg.bounds;
      out.length_reward = length_reward_interval(rho, out.bounds_used, cfg.k, cfg.delta_rule);
      break;
    case LengthRewardMode::kAutonomous:
      out.bounds_used = cfg.bounds;
      out.length_reward = length_reward_auto(rho, cfg.theta);
      break;
  }
  out.composite = weights.lambda_len * out.length_reward + weights.lambda_qual * out.quality_reward;
  return out;
}

RewardBreakdown composite_reward(SyllableCount src, SyllableCount tgt, double quality,
                                 const RewardWeights& weights, const LengthRewardConfig& cfg) {
  return composite_reward_from_rho(syllable_ratio(src, tgt), src, quality, weights, cfg);
}

nlohmann::json to_json(const RatioBounds& b) { return {{"lower", b.lower}, {"upper", b.upper}}; }

nlohmann::json to_json(const RewardBreakdown& b) {
  return {{"rho", b.rho},
          {"bounds_used", to_json(b.bounds_used)},
          {"length_reward", b.length_reward},
          {"quality_reward", b.quality_reward},
          {"composite", b.composite},
          {"mode", mode_name(b.mode)}};
}

}  // namespace tempo
