#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <thread>

#include <httplib.h>

#include "service_fixtures.hpp"
#include "support.hpp"
#include "tempo/error.hpp"
#include "tempo/expansion.hpp"
#include "tempo/service.hpp"

using namespace tempo;
using tempo::testing::mock_clients;
using tempo::testing::mock_settings;
using tempo::testing::reward_batch;

namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
  return [vars](std::string_view k) -> std::optional<std::string> {
    auto it = vars.find(std::string(k));
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

const EnvLookup kNoEnv = env_of({});

}  // namespace

TEST_CASE("reward batch equals in-process scoring") {
  const auto settings = mock_settings();
  RewardService svc(settings, mock_clients(), kNoEnv);
  const auto body = reward_batch(30, 7);
  const auto resp = svc.score_batch(body);
  REQUIRE(resp.status == 200);
  CHECK(resp.body.at("schema_version") == kSchemaVersion);
  CHECK(resp.body.at("config_hash") == config_hash(settings));

  const auto local_clients = mock_clients();
  const auto& results = resp.body.at("results");
  REQUIRE(results.size() == 30);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    CHECK(r.at("id") == body["items"][i]["id"]);
    const auto item = reward_item_from_json(body["items"][i]);
    if (i == 7) {
      ++errors;
      CHECK(r.at("ok") == false);
      CHECK(r.at("error").at("code") == "retry_exhausted");
      CHECK(r.at("error").at("status") == 502);
      CHECK_THROWS_AS(score_item(item, settings, local_clients), Error);
      continue;
    }
    REQUIRE(r.at("ok") == true);
    const auto want = to_json(score_item(item, settings, local_clients).breakdown);
    for (const char* key : {"rho", "length_reward", "quality_reward", "composite"}) {
      CHECK(r.at("breakdown").at(key).get<double>() == want.at(key).get<double>());
    }
    CHECK(r.at("breakdown").at("bounds_used") == want.at("bounds_used"));
    CHECK(r.contains("quality") == (i % 3 != 0));
  }
  CHECK(errors == 1);
}

TEST_CASE("precomputed quality passes straight through") {
  auto settings = mock_settings();
  RewardService svc(settings, QualityClients{}, kNoEnv);
  const nlohmann::json body = {{"items",
                                {{{"id", "a"},
                                  {"source", "天命人超度了金池长老的冤魂"},
                                  {"translation", "The Destined One freed the ghost"},
                                  {"lang_pair", "zh-en"},
                                  {"precomputed_quality", 0.75}}}}};
  const auto resp = svc.score_batch(body);
  REQUIRE(resp.status == 200);
  const auto& b = resp.body["results"][0]["breakdown"];
  const auto lib = composite_reward(count_syllables("天命人超度了金池长老的冤魂", Language::kZh),
                                    count_syllables("The Destined One freed the ghost", Language::kEn), 0.75,
                                    settings.weights, settings.length_for(Language::kEn));
  CHECK(b["composite"].get<double>() == lib.composite);
  CHECK(b["rho"].get<double>() == lib.rho);
}

TEST_CASE("order is preserved and results do not depend on request order") {
  RewardService svc(mock_settings(), mock_clients(), kNoEnv);
  auto body = reward_batch(40, 100, 9);
  const auto first = svc.score_batch(body).body["results"];
  std::vector<std::size_t> perm(40);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(3));
  nlohmann::json shuffled = {{"items", nlohmann::json::array()}};
  for (auto i : perm) shuffled["items"].push_back(body["items"][i]);
  const auto second = svc.score_batch(shuffled).body["results"];
  for (std::size_t k = 0; k < perm.size(); ++k) {
    CHECK(second[k].at("id") == shuffled["items"][k]["id"]);
    CHECK(second[k].dump() == first[perm[k]].dump());
  }
}

TEST_CASE("batch faults stay per item") {
  RewardService svc(mock_settings(), mock_clients(), kNoEnv);
  auto body = reward_batch(3, 1);
  body["items"][0].erase("precomputed_quality");
  const auto resp = svc.score_batch(body);
  REQUIRE(resp.status == 200);
  const auto& r = resp.body["results"];
  CHECK(r[0]["ok"] == true);
  CHECK(r[1]["ok"] == false);
  CHECK(r[2]["ok"] == true);

  body["items"][2]["lang_pair"] = "zh-fr";
  const auto bad_item = svc.score_batch(body).body["results"][2];
  CHECK(bad_item["ok"] == false);
  CHECK(bad_item["error"]["status"] == 400);
  CHECK(bad_item["id"] == "item-2");

  auto zh_target = reward_batch(1, 9);
  zh_target["items"][0]["lang_pair"] = "en-zh";
  CHECK(svc.score_batch(zh_target).body["results"][0]["error"]["code"] == "unsupported_language");
}

TEST_CASE("malformed bodies are rejected") {
  auto settings = mock_settings();
  settings.max_batch = 5;
  RewardService svc(settings, mock_clients(), kNoEnv);
  CHECK(svc.score_batch(nlohmann::json::array()).status == 400);
  CHECK(svc.score_batch({{"items", 3}}).status == 400);
  CHECK(svc.score_batch(reward_batch(6, 99)).status == 400);
  const auto empty = svc.score_batch({{"items", nlohmann::json::array()}});
  CHECK(empty.status == 200);
  CHECK(empty.body["results"].empty());
  CHECK(svc.roundtrip({{"nope", 1}}).status == 400);
}

TEST_CASE("item error status mapping") {
  CHECK(item_error_status(ErrorCode::kRetryExhausted) == 502);
  CHECK(item_error_status(ErrorCode::kTransport) == 502);
  CHECK(item_error_status(ErrorCode::kParse) == 502);
  CHECK(item_error_status(ErrorCode::kEmptyCompletion) == 502);
  CHECK(item_error_status(ErrorCode::kInvalidArgument) == 400);
  CHECK(item_error_status(ErrorCode::kUnsupportedLanguage) == 400);
}

TEST_CASE("roundtrip diagnostics mirror the library") {
  RewardService svc(mock_settings(), QualityClients{}, kNoEnv);
  const nlohmann::json ident = {{"items",
                                 {{{"source", "大家好"}, {"translation", "大家好"}, {"back_translation", "大家好"},
                                   {"langs", "zh-zh"}}}}};
  // zh targets are fine for diagnostics, which do not need reward bounds
  auto r = svc.roundtrip(ident);
  REQUIRE(r.status == 200);
  CHECK(r.body["report"]["rtp"]["mean"] == 1.0);
  CHECK(r.body["report"]["rtp"]["std"] == 0.0);

  std::mt19937_64 rng(4);
  nlohmann::json mixed = {{"items", nlohmann::json::array()}};
  std::vector<RatioSample> samples;
  for (int i = 0; i < 12; ++i) {
    const auto src = tempo::testing::random_han(rng, 5 + rng() % 10);
    const std::string tr = i % 2 ? "we go to the lake today" : "a really beautiful city";
    nlohmann::json it = {{"source", src}, {"translation", tr}, {"langs", "zh-en"}};
    RatioSample s{count_syllables(src, Language::kZh), count_syllables(tr, Language::kEn), std::nullopt};
    if (i % 4 != 3) {
      const auto bt = tempo::testing::random_han(rng, 4 + rng() % 10);
      it["back_translation"] = bt;
      s.bt = count_syllables(bt, Language::kZh);
    }
    mixed["items"].push_back(it);
    samples.push_back(s);
  }
  const auto resp = svc.roundtrip(mixed);
  REQUIRE(resp.status == 200);
  CHECK(resp.body["report"].dump() == to_json(corpus_report(samples)).dump());
  CHECK(resp.body["items"][3]["rtp"].is_null());
}

TEST_CASE("health") {
  auto settings = mock_settings();
  RewardService ok(settings, mock_clients(), kNoEnv);
  auto h = ok.health();
  CHECK(h.status == 200);
  CHECK(h.body["status"] == "ok");
  CHECK(h.body["config_hash"] == config_hash(settings));

  RewardService again(settings, mock_clients(), kNoEnv);
  CHECK(again.config_hash() == ok.config_hash());

  settings.require_upstream = true;
  auto clients = mock_clients();
  std::static_pointer_cast<ScriptedChatClient>(clients.chat)->set_healthy(false);
  RewardService down(settings, clients, kNoEnv);
  CHECK(down.health().status == 503);

  settings.require_upstream = false;
  RewardService lenient(settings, clients, kNoEnv);
  CHECK(lenient.health().status == 200);
}

TEST_CASE("http round trip with bearer token and request log") {
  auto settings = mock_settings();
  const auto log = std::filesystem::temp_directory_path() / "tempo_service_test_log.jsonl";
  std::filesystem::remove(log);
  settings.request_log = log.string();
  RewardService svc(settings, mock_clients(), env_of({{"TEMPO_SERVICE_TOKEN", "sekret"}}));
  const int port = svc.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread server([&] { svc.listen(); });

  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(10, 0);
  const auto body = reward_batch(10, 4);

  auto unauth = cli.Post("/v1/reward", body.dump(), "application/json");
  REQUIRE(unauth);
  CHECK(unauth->status == 401);

  httplib::Headers auth{{"Authorization", "Bearer sekret"}};
  auto res = cli.Post("/v1/reward", auth, body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto wire = nlohmann::json::parse(res->body);
  CHECK(wire["results"].dump() == svc.score_batch(body).body["results"].dump());

  auto garbage = cli.Post("/v1/reward", auth, "{not json", "application/json");
  REQUIRE(garbage);
  CHECK(garbage->status == 400);

  auto h = cli.Get("/healthz");
  REQUIRE(h);
  CHECK(h->status == 200);
  CHECK(nlohmann::json::parse(h->body)["schema_version"] == kSchemaVersion);

  svc.stop();
  server.join();

  std::ifstream in(log);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line); ++lines) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("latency_ms"));
    CHECK(j.contains("status"));
  }
  CHECK(lines == 4);
  std::filesystem::remove(log);
}
