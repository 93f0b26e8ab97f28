#include <doctest.h>

#include <cmath>
#include <random>

#include "grpo_fixtures.hpp"
#include "support.hpp"
#include "tempo/error.hpp"
#include "tempo/grpo.hpp"

using namespace tempo;
using tempo::testing::convergence_pools;

namespace {

LengthRewardConfig dynamic_cfg(const std::vector<CandidatePool>& pools) {
  LengthRewardConfig rc;
  rc.mode = LengthRewardMode::kDynamic;
  rc.dynamic = DynamicBoundsConfig{0.4, 0.5, tempo::testing::mean_source_syllables(pools)};
  return rc;
}

double tail_mean_rho(const SimulationResult& r, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = r.trajectory.size() - n; i < r.trajectory.size(); ++i) {
    sum += r.trajectory[i].mean_rho;
  }
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("advantage examples") {
  auto a = normalize_advantages(std::vector<double>{0.0, 1.0});
  CHECK(a.advantages[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(a.advantages[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.group_mean == 0.5);
  CHECK(a.group_std == 0.5);

  auto c = normalize_advantages(std::vector<double>{0.7, 0.7, 0.7, 0.7});
  for (double v : c.advantages) CHECK(v == 0.0);
  CHECK(c.group_std == 0.0);

  auto t = normalize_advantages(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(t.advantages[0] == doctest::Approx(-1.224744871391589).epsilon(1e-12));
  CHECK(t.advantages[1] == doctest::Approx(0.0));
  CHECK(t.advantages[2] == doctest::Approx(1.224744871391589).epsilon(1e-12));

  CHECK_THROWS_AS(normalize_advantages(std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(normalize_advantages(std::vector<double>{}), Error);
}

TEST_CASE("advantages sum to zero with unit population std") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> r(2 + rng() % 15);
    for (auto& v : r) v = u(rng);
    const auto a = normalize_advantages(r);
    REQUIRE(a.advantages.size() == r.size());
    double sum = 0.0, ss = 0.0;
    for (double v : a.advantages) sum += v;
    for (double v : a.advantages) ss += v * v;
    CHECK(std::abs(sum) < 1e-9);
    CHECK(std::abs(std::sqrt(ss / static_cast<double>(r.size())) - 1.0) < 1e-9);
  }
}

TEST_CASE("clipped term examples and oracle") {
  CHECK(clipped_term(1.5, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(clipped_term(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
  for (double a : {-2.0, -0.3, 0.0, 0.4, 5.0}) CHECK(clipped_term(1.0, a, 0.2) == a);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ratio(0.01, 3.0), adv(-4.0, 4.0), eps(0.0, 0.5);
  for (int i = 0; i < 10000; ++i) {
    const double r = ratio(rng), a = adv(rng), e = eps(rng);
    const double lo = 1.0 - e, hi = 1.0 + e;
    const double c = r < lo ? lo : (r > hi ? hi : r);
    const double want = r * a < c * a ? r * a : c * a;
    CHECK(clipped_term(r, a, e) == want);
    CHECK(clipped_term(r, a, e) <= r * a);
  }
}

TEST_CASE("kl divergence") {
  const std::vector<double> p{0.9, 0.1}, q{0.5, 0.5};
  CHECK(kl_divergence(p, q) == doctest::Approx(0.9 * std::log(1.8) + 0.1 * std::log(0.2)).epsilon(1e-12));
  CHECK(kl_divergence(p, q) == doctest::Approx(0.3681).epsilon(1e-3));
  CHECK(kl_divergence(q, q) == 0.0);
  CHECK_THROWS_AS(kl_divergence(p, std::vector<double>{1.0}), Error);

  SoftmaxPolicy a({{0.0, 1.0, 2.0}}), b({{0.0, 1.0, 2.0}}), c({{0.0, 0.0}});
  CHECK(kl_term(a, b, 0) == 0.0);
  try {
    kl_term(a, c, 0);
    FAIL("expected support mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSupportMismatch);
  }
}

TEST_CASE("softmax sums to one") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 20.0);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> logits(2 + rng() % 30);
    for (auto& v : logits) v = n(rng);
    double s = 0.0;
    for (double v : softmax(logits)) s += v;
    CHECK(std::abs(s - 1.0) < 1e-9);
  }
}

TEST_CASE("pool and config validation") {
  CandidatePool p{"x", SyllableCount{4}, {{0.8, 0.5}}, {}};
  CHECK_THROWS_AS(p.validate(), Error);
  p.candidates.push_back({-0.1, 0.5});
  CHECK_THROWS_AS(p.validate(), Error);
  p.candidates.back() = {0.9, 1.5};
  CHECK_THROWS_AS(p.validate(), Error);
  p.candidates.back() = {0.9, 1.0};
  CHECK_NOTHROW(p.validate());
  p.initial_logits = {0.0};
  CHECK_THROWS_AS(p.validate(), Error);

  GRPOConfig g;
  CHECK(g.clip_epsilon == 0.2);
  CHECK(g.kl_beta == 0.0);
  g.group_size = 1;
  CHECK_THROWS_AS(g.validate(), Error);

  CHECK_THROWS_AS(simulate_training({}, LengthRewardConfig{}, RewardWeights{}, GRPOConfig{}), Error);
}

TEST_CASE("identical rewards leave logits unchanged") {
  std::vector<CandidatePool> pools{
      {"flat", SyllableCount{10}, {{0.85, 0.5}, {0.85, 0.5}, {0.85, 0.5}}, {0.3, -0.2, 0.1}}};
  GRPOConfig g;
  g.steps = 200;
  const auto r = simulate_training(pools, LengthRewardConfig{}, RewardWeights{}, g);
  CHECK(r.final_policy.logits(0) == pools[0].initial_logits);
  for (const auto& s : r.trajectory) CHECK(s.grad_norm == 0.0);
}

TEST_CASE("simulation is deterministic per seed") {
  const auto pools = convergence_pools();
  GRPOConfig g;
  g.steps = 120;
  g.quality_noise_std = 0.05;
  const auto a = simulate_training(pools, LengthRewardConfig{}, RewardWeights{}, g);
  const auto b = simulate_training(pools, LengthRewardConfig{}, RewardWeights{}, g);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    CHECK(to_json(a.trajectory[i]).dump() == to_json(b.trajectory[i]).dump());
  }
  g.seed = 43;
  const auto c = simulate_training(pools, LengthRewardConfig{}, RewardWeights{}, g);
  CHECK(to_json(c.trajectory.back()).dump() != to_json(a.trajectory.back()).dump());
}

TEST_CASE("seed 42 converges into bounds and matches the golden trajectory") {
  const auto pools = convergence_pools();
  GRPOConfig g;
  g.seed = 42;
  const auto r = simulate_training(pools, dynamic_cfg(pools), RewardWeights{}, g);
  REQUIRE(r.trajectory.size() == 500);
  const double tail = tail_mean_rho(r, 100);
  CHECK(tail >= 0.8);
  CHECK(tail <= 0.9);

  const auto golden = tempo::testing::load_json("grpo_seed42_trajectory.json");
  for (const auto& want : golden.at("steps")) {
    const auto& got = r.trajectory.at(want.at("step").get<std::size_t>());
    for (const char* key : {"mean_rho", "expected_rho", "mean_reward", "entropy", "grad_norm", "kl"}) {
      INFO(key << " at step " << got.step);
      CHECK(to_json(got).at(key).get<double>() ==
            doctest::Approx(want.at(key).get<double>()).epsilon(1e-9));
    }
  }
}

TEST_CASE("larger beta keeps the policy closer to the reference") {
  const auto pools = convergence_pools();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    double prev = INFINITY;
    for (double beta : {0.0, 0.01, 0.05, 1.0, 10.0}) {
      GRPOConfig g;
      g.seed = seed;
      g.kl_beta = beta;
      const auto r = simulate_training(pools, LengthRewardConfig{}, RewardWeights{}, g);
      const double kl = r.trajectory.back().kl;
      INFO("seed " << seed << " beta " << beta);
      CHECK(kl <= prev);
      prev = kl;
      if (beta == 10.0) {
        for (std::size_t p = 0; p < pools.size(); ++p) {
          CHECK(total_variation(r.final_policy.probabilities(p), r.reference.probabilities(p)) <= 0.05);
        }
      }
    }
  }
}

TEST_CASE("steps to entry uses the policy expectation") {
  std::vector<StepStats> traj(4);
  traj[0].expected_rho = 1.1;
  traj[1].expected_rho = 0.95;
  traj[1].mean_rho = 0.85;
  traj[2].expected_rho = 0.88;
  traj[3].expected_rho = 0.86;
  CHECK(steps_to_entry(traj, {0.8, 0.9}) == 2);
  CHECK(steps_to_entry(std::span(traj).first(2), {0.8, 0.9}) == 2);
}

TEST_CASE("pool and config json") {
  const auto j = nlohmann::json::parse(
      R"({"id":"p","source_syllables":12,"candidates":[{"rho":0.8,"quality":0.6},{"rho":1.1,"quality":0.9}]})");
  const auto p = pool_from_json(j);
  CHECK(p.id == "p");
  CHECK(p.source_syllables.value == 12);
  CHECK(p.candidates.size() == 2);
  CHECK_THROWS_AS(pool_from_json(nlohmann::json::parse(R"({"id":"p"})")), Error);

  const auto g = grpo_config_from_json(nlohmann::json::parse(R"({"kl_beta":0.05,"steps":10})"));
  CHECK(g.kl_beta == 0.05);
  CHECK(g.steps == 10);
  CHECK_THROWS_AS(grpo_config_from_json(nlohmann::json::parse(R"({"learning_rate":0})")), Error);
}
