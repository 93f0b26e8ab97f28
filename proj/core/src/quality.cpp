#include "tempo/quality.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "tempo/assets.hpp"
#include "tempo/error.hpp"
#include "tempo/text.hpp"

namespace tempo {

std::string_view prompt_template(std::string_view name) {
  auto bytes = find_asset(name);
  if (!bytes) throw Error(ErrorCode::kConfig, "unknown prompt template '" + std::string(name) + "'");
  return *bytes;
}

std::string fill_template(std::string_view tmpl,
                          std::span<const std::pair<std::string_view, std::string_view>> values) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      bool replaced = false;
      for (const auto& [key, value] : values) {
        if (tmpl.substr(i + 1, key.size()) == key && i + 1 + key.size() < tmpl.size() &&
            tmpl[i + 1 + key.size()] == '}') {
          out.append(value);
          i += key.size() + 2;
          replaced = true;
          break;
        }
      }
      if (replaced) continue;
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

std::string fluency_prompt(std::string_view context, std::string_view source,
                           std::string_view translation, Language target_lang) {
  const std::array<std::pair<std::string_view, std::string_view>, 4> values = {{
      {"target_lang", language_name(target_lang)},
      {"context", context},
      {"text", source},
      {"translation", translation},
  }};
  return fill_template(prompt_template(kFluencyTemplate), values);
}

std::string genrm_prompt(std::string_view context, std::string_view source,
                         std::string_view translation) {
  const std::array<std::pair<std::string_view, std::string_view>, 3> values = {{
      {"context", context},
      {"current_text", source},
      {"translated_text", translation},
  }};
  return fill_template(prompt_template(kGenRMTemplate), values);
}

void FidelityConfig::validate() const {
  if (!(tau_min <= tau_max)) throw Error(ErrorCode::kConfig, "tau_min must not exceed tau_max");
}

namespace {

ChatClient& require(const std::shared_ptr<ChatClient>& c, const char* what) {
  if (!c) throw Error(ErrorCode::kConfig, std::string("no ") + what + " client configured");
  return *c;
}

}  // namespace

std::string back_translate(std::string_view hypothesis, Language hypothesis_lang,
                           Language source_lang, const QualityClients& clients) {
  const std::array<std::pair<std::string_view, std::string_view>, 3> values = {{
      {"target_lang", language_name(hypothesis_lang)},
      {"source_lang", language_name(source_lang)},
      {"text", hypothesis},
  }};
  ChatRequest req;
  req.user = fill_template(prompt_template(kBackTranslateTemplate), values);
  auto res = clients.chat_call(require(clients.chat, "chat"), req);
  auto out = text::trim(res.text);
  if (out.empty()) throw Error(ErrorCode::kEmptyCompletion, "back-translation came back empty");
  return out;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "vectors have dimensions " +
                                                   std::to_string(u.size()) + " and " +
                                                   std::to_string(v.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

double fidelity_reward(std::string_view source, std::string_view back_translation,
                       const QualityClients& clients, const FidelityConfig& cfg) {
  const auto vx = clients.embed_call(source);
  const auto vb = clients.embed_call(back_translation);
  return std::clamp(cosine_similarity(vx, vb), cfg.tau_min, cfg.tau_max);
}

int parse_fluency_verdict(std::string_view completion) {
  const auto t = text::trim(completion);
  std::string_view s = t;
  if (s.size() >= 4 && s.starts_with("<<") && s.ends_with(">>")) {
    const auto inner = text::trim(s.substr(2, s.size() - 4));
    if (inner == "0") return 0;
    if (inner == "1") return 1;
  }
  throw Error(ErrorCode::kParse, "unparseable fluency verdict: '" + std::string(completion) + "'");
}

int fluency_reward(std::string_view context, std::string_view source,
                   std::string_view translation, Language target_lang,
                   const QualityClients& clients) {
  ChatRequest req;
  req.user = fluency_prompt(context, source, translation, target_lang);
  const auto res = clients.chat_call(require(clients.chat, "chat"), req);
  return parse_fluency_verdict(res.text);
}

namespace {

// Index one past the brace closing the object opened at `open`, or npos.
std::size_t matching_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

GenRMOutput validate_genrm(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "GenRM verdict is not a JSON object");
  if (doc.size() != 2 || !doc.contains("COT") || !doc.contains("score")) {
    throw Error(ErrorCode::kParse, "GenRM verdict must have exactly the fields COT and score");
  }
  const auto& cot = doc["COT"];
  const auto& score = doc["score"];
  if (!cot.is_string()) throw Error(ErrorCode::kParse, "GenRM field COT must be a string");
  if (!score.is_number_integer()) {
    throw Error(ErrorCode::kParse, "GenRM field score must be the integer 0 or 1");
  }
  const auto value = score.get<std::int64_t>();
  if (value != 0 && value != 1) {
    throw Error(ErrorCode::kParse, "GenRM score " + std::to_string(value) + " is not 0 or 1");
  }
  return {cot.get<std::string>(), static_cast<int>(value)};
}

}  // namespace

GenRMOutput parse_genrm(std::string_view completion) {
  for (std::size_t pos = completion.find('{'); pos != std::string_view::npos;
       pos = completion.find('{', pos + 1)) {
    const auto end = matching_brace(completion, pos);
    if (end == std::string_view::npos) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(completion.substr(pos, end - pos));
    } catch (const nlohmann::json::exception&) {
      continue;
    }
    return validate_genrm(doc);
  }
  throw Error(ErrorCode::kParse, "no JSON object found in GenRM completion");
}

std::string serialize_genrm(const GenRMOutput& out) {
  nlohmann::ordered_json doc;
  doc["COT"] = out.cot;
  doc["score"] = out.score;
  return doc.dump();
}

namespace {

GenRMResult judge(ChatClient& client, std::string_view context, std::string_view source,
                  std::string_view translation, const QualityClients& clients) {
  ChatRequest req;
  req.user = genrm_prompt(context, source, translation);
  const auto res = clients.chat_call(client, req);
  GenRMResult out;
  out.output = parse_genrm(res.text);
  out.reward = out.output.score;
  return out;
}

}  // namespace

GenRMResult genrm_reward(std::string_view context, std::string_view source,
                         std::string_view translation, const QualityClients& clients) {
  return judge(require(clients.chat, "chat"), context, source, translation, clients);
}

GenRMResult external_rm_reward(std::string_view context, std::string_view source,
                               std::string_view translation, const QualityClients& clients) {
  auto& client = clients.external_rm ? *clients.external_rm : require(clients.chat, "chat");
  return judge(client, context, source, translation, clients);
}

std::string_view quality_mode_name(QualityMode mode) {
  switch (mode) {
    case QualityMode::kRubric: return "rubric";
    case QualityMode::kReason: return "reason";
    case QualityMode::kExternalRm: return "external_rm";
  }
  return "";
}

QualityMode parse_quality_mode(std::string_view name) {
  if (name == "rubric") return QualityMode::kRubric;
  if (name == "reason") return QualityMode::kReason;
  if (name == "external_rm") return QualityMode::kExternalRm;
  throw Error(ErrorCode::kConfig, "unknown quality mode '" + std::string(name) + "'");
}

std::string_view combiner_name(RubricCombiner c) {
  return c == RubricCombiner::kProduct ? "product" : "weighted_mean";
}

RubricCombiner parse_combiner(std::string_view name) {
  if (name == "product") return RubricCombiner::kProduct;
  if (name == "weighted_mean") return RubricCombiner::kWeightedMean;
  throw Error(ErrorCode::kConfig, "unknown rubric combiner '" + std::string(name) + "'");
}

void QualityConfig::validate() const {
  fidelity.validate();
  if (!(fidelity_weight >= 0.0 && fidelity_weight <= 1.0)) {
    throw Error(ErrorCode::kConfig, "fidelity_weight must lie in [0, 1]");
  }
}

double combine_rubric(double r_bt, int r_flu, const QualityConfig& cfg) {
  if (cfg.combiner == RubricCombiner::kProduct) return r_bt * static_cast<double>(r_flu);
  return cfg.fidelity_weight * r_bt + (1.0 - cfg.fidelity_weight) * static_cast<double>(r_flu);
}

QualityResult quality_reward(const QualityInputs& in, const QualityConfig& cfg,
                             const QualityClients& clients) {
  QualityResult out;
  switch (cfg.mode) {
    case QualityMode::kRubric: {
      out.back_translation = in.back_translation
                                 ? *in.back_translation
                                 : back_translate(in.translation, in.target_lang, in.source_lang,
                                                  clients);
      out.fidelity = fidelity_reward(in.source, *out.back_translation, clients, cfg.fidelity);
      out.fluency = fluency_reward(in.context, in.source, in.translation, in.target_lang, clients);
      out.value = combine_rubric(*out.fidelity, *out.fluency, cfg);
      break;
    }
    case QualityMode::kReason: {
      auto r = genrm_reward(in.context, in.source, in.translation, clients);
      out.verdict = r.output;
      out.value = static_cast<double>(r.reward);
      break;
    }
    case QualityMode::kExternalRm: {
      auto r = external_rm_reward(in.context, in.source, in.translation, clients);
      out.verdict = r.output;
      out.value = static_cast<double>(r.reward);
      break;
    }
  }
  return out;
}

nlohmann::json to_json(const QualityResult& r) {
  nlohmann::json j = {{"value", r.value}};
  if (r.back_translation) j["back_translation"] = *r.back_translation;
  if (r.fidelity) j["fidelity"] = *r.fidelity;
  if (r.fluency) j["fluency"] = *r.fluency;
  if (r.verdict) j["verdict"] = {{"COT", r.verdict->cot}, {"score", r.verdict->score}};
  return j;
}

}  // namespace tempo
