#include "tempo/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "tempo/error.hpp"

namespace tempo {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); }

// Deterministic across standard libraries: only the raw engine output is used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::size_t categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) return k;
    }
    return probs.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

void CandidatePool::validate() const {
  if (candidates.size() < 2) invalid("pool '" + id + "' needs at least two candidates");
  for (const auto& c : candidates) {
    if (!(c.rho >= 0.0) || !std::isfinite(c.rho)) invalid("pool '" + id + "' has a negative rho");
    if (!(c.quality >= 0.0 && c.quality <= 1.0)) {
      invalid("pool '" + id + "' has a quality outside [0, 1]");
    }
  }
  if (!initial_logits.empty() && initial_logits.size() != candidates.size()) {
    invalid("pool '" + id + "' initial_logits length differs from candidate count");
  }
}

void GRPOConfig::validate() const {
  if (group_size < 2) invalid("group_size must be >= 2");
  if (!(clip_epsilon >= 0.0)) invalid("clip_epsilon must be >= 0");
  if (!(kl_beta >= 0.0)) invalid("kl_beta must be >= 0");
  if (!(learning_rate > 0.0)) invalid("learning_rate must be > 0");
  if (updates_per_step == 0) invalid("updates_per_step must be >= 1");
  if (!(quality_noise_std >= 0.0)) invalid("quality_noise_std must be >= 0");
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - m);
    z += p[k];
  }
  for (auto& v : p) v /= z;
  return p;
}

AdvantageBatch normalize_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) invalid("advantage normalization needs a group of at least two");
  AdvantageBatch out;
  out.rewards.assign(rewards.begin(), rewards.end());
  const double n = static_cast<double>(rewards.size());
  double sum = 0.0;
  for (double r : rewards) sum += r;
  out.group_mean = sum / n;
  double ss = 0.0;
  for (double r : rewards) ss += (r - out.group_mean) * (r - out.group_mean);
  out.group_std = std::sqrt(ss / n);
  out.advantages.assign(rewards.size(), 0.0);
  if (out.group_std > 0.0) {
    for (std::size_t i = 0; i < rewards.size(); ++i) {
      out.advantages[i] = (rewards[i] - out.group_mean) / out.group_std;
    }
  }
  return out;
}

double clipped_term(double prob_ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(prob_ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(prob_ratio * advantage, clipped * advantage);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kSupportMismatch, "distributions have different support sizes");
  }
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (q[k] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[k] * std::log(p[k] / q[k]);
  }
  return std::max(kl, 0.0);
}

double kl_term(const SoftmaxPolicy& policy, const SoftmaxPolicy& reference, std::size_t prompt) {
  if (policy.prompts() != reference.prompts()) {
    throw Error(ErrorCode::kSupportMismatch, "policies cover different prompt sets");
  }
  return kl_divergence(policy.probabilities(prompt), reference.probabilities(prompt));
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kSupportMismatch, "distributions have different support sizes");
  }
  double tv = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) tv += std::abs(p[k] - q[k]);
  return 0.5 * tv;
}

SimulationResult simulate_training(std::span<const CandidatePool> pools,
                                   const LengthRewardConfig& reward_cfg,
                                   const RewardWeights& weights, const GRPOConfig& cfg) {
  if (pools.empty()) invalid("simulation needs at least one candidate pool");
  for (const auto& p : pools) p.validate();
  cfg.validate();
  reward_cfg.validate();

  std::vector<std::vector<double>> init;
  for (const auto& p : pools) {
    init.push_back(p.initial_logits.empty() ? std::vector<double>(p.candidates.size(), 0.0)
                                            : p.initial_logits);
  }
  SimulationResult out;
  out.reference = SoftmaxPolicy(init);
  SoftmaxPolicy policy(init);
  std::vector<std::vector<double>> ref_probs;
  for (std::size_t p = 0; p < pools.size(); ++p) ref_probs.push_back(out.reference.probabilities(p));

  Rng rng(cfg.seed);
  const std::size_t G = cfg.group_size;
  std::vector<std::size_t> picks(G);
  std::vector<double> rewards(G);
  out.trajectory.reserve(cfg.steps);

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    StepStats stats;
    stats.step = step;
    double grad_sq = 0.0;
    for (std::size_t p = 0; p < pools.size(); ++p) {
      const auto& pool = pools[p];
      const auto old_probs = policy.probabilities(p);
      double rho_sum = 0.0, reward_sum = 0.0;
      for (std::size_t i = 0; i < G; ++i) {
        picks[i] = rng.categorical(old_probs);
        const auto& c = pool.candidates[picks[i]];
        double q = c.quality;
        if (cfg.quality_noise_std > 0.0) {
          q = std::clamp(q + cfg.quality_noise_std * rng.normal(), 0.0, 1.0);
        }
        rewards[i] =
            composite_reward_from_rho(c.rho, pool.source_syllables, q, weights, reward_cfg).composite;
        rho_sum += c.rho;
        reward_sum += rewards[i];
      }
      stats.mean_rho += rho_sum / static_cast<double>(G);
      stats.mean_reward += reward_sum / static_cast<double>(G);
      const auto adv = normalize_advantages(rewards);

      auto& logits = policy.logits(p);
      const std::size_t K = logits.size();
      std::vector<double> grad(K);
      for (std::size_t u = 0; u < cfg.updates_per_step; ++u) {
        const auto probs = softmax(logits);
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < G; ++i) {
          const double a = adv.advantages[i];
          if (a == 0.0) continue;
          const std::size_t y = picks[i];
          const double r = probs[y] / old_probs[y];
          const double clipped = std::clamp(r, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
          if (r * a > clipped * a) continue;  // clipped branch is active: no gradient
          const double scale = a * r / static_cast<double>(G);
          for (std::size_t k = 0; k < K; ++k) grad[k] -= scale * probs[k];
          grad[y] += scale;
        }
        if (cfg.kl_beta > 0.0) {
          const double kl = kl_divergence(probs, ref_probs[p]);
          for (std::size_t k = 0; k < K; ++k) {
            if (probs[k] <= 0.0) continue;
            const double d = probs[k] * (std::log(probs[k]) - std::log(ref_probs[p][k]) - kl);
            grad[k] -= cfg.kl_beta * d;
          }
        }
        if (u == 0) {
          for (double g : grad) grad_sq += g * g;
        }
        for (std::size_t k = 0; k < K; ++k) logits[k] += cfg.learning_rate * grad[k];
      }
      const auto new_probs = softmax(logits);
      for (std::size_t k = 0; k < K; ++k) stats.expected_rho += new_probs[k] * pool.candidates[k].rho;
      stats.entropy += entropy(new_probs);
      stats.kl += kl_divergence(new_probs, ref_probs[p]);
    }
    const double n = static_cast<double>(pools.size());
    stats.mean_rho /= n;
    stats.mean_reward /= n;
    stats.expected_rho /= n;
    stats.entropy /= n;
    stats.kl /= n;
    stats.grad_norm = std::sqrt(grad_sq);
    out.trajectory.push_back(stats);
  }
  out.final_policy = std::move(policy);
  return out;
}

std::size_t steps_to_entry(std::span<const StepStats> trajectory, const RatioBounds& bounds) {
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (bounds.contains(trajectory[i].expected_rho)) return i;
  }
  return trajectory.size();
}

nlohmann::json to_json(const StepStats& s) {
  return {{"step", s.step},         {"mean_rho", s.mean_rho},   {"expected_rho", s.expected_rho},
          {"mean_reward", s.mean_reward}, {"entropy", s.entropy}, {"grad_norm", s.grad_norm},
          {"kl", s.kl}};
}

CandidatePool pool_from_json(const nlohmann::json& j) {
  CandidatePool p;
  try {
    p.id = j.at("id").get<std::string>();
    p.source_syllables = SyllableCount{j.at("source_syllables").get<std::size_t>()};
    for (const auto& c : j.at("candidates")) {
      p.candidates.push_back({c.at("rho").get<double>(), c.at("quality").get<double>()});
    }
    if (j.contains("initial_logits")) p.initial_logits = j["initial_logits"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed candidate pool: ") + e.what());
  }
  p.validate();
  return p;
}

GRPOConfig grpo_config_from_json(const nlohmann::json& j, GRPOConfig base) {
  try {
    if (j.contains("group_size")) base.group_size = j["group_size"].get<std::size_t>();
    if (j.contains("clip_epsilon")) base.clip_epsilon = j["clip_epsilon"].get<double>();
    if (j.contains("kl_beta")) base.kl_beta = j["kl_beta"].get<double>();
    if (j.contains("learning_rate")) base.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("steps")) base.steps = j["steps"].get<std::size_t>();
    if (j.contains("seed")) base.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("updates_per_step")) base.updates_per_step = j["updates_per_step"].get<std::size_t>();
    if (j.contains("quality_noise_std")) base.quality_noise_std = j["quality_noise_std"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed grpo config: ") + e.what());
  }
  base.validate();
  return base;
}

}  // namespace tempo
