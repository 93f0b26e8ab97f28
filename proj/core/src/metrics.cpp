#include "tempo/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tempo/error.hpp"
#include "tempo/expansion.hpp"
#include "tempo/text.hpp"

namespace tempo {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); }

using Ngram = std::vector<std::string_view>;

std::map<Ngram, std::size_t> count_ngrams(const std::vector<std::string>& toks, std::size_t n) {
  std::map<Ngram, std::size_t> out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    Ngram g(toks.begin() + static_cast<std::ptrdiff_t>(i),
            toks.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++out[g];
  }
  return out;
}

}  // namespace

std::string LangPair::code() const {
  return std::string(language_code(source)) + "-" + std::string(language_code(target));
}

LangPair parse_lang_pair(std::string_view code) {
  const auto sep = code.find_first_of("-_");
  if (sep == std::string_view::npos) invalid("language pair '" + std::string(code) + "' lacks a separator");
  return {parse_language(code.substr(0, sep)), parse_language(code.substr(sep + 1))};
}

void BleuConfig::validate() const {
  if (max_ngram < 1) throw Error(ErrorCode::kConfig, "max_ngram must be >= 1");
  if (smoothing == BleuSmoothing::kAddEpsilon && !(epsilon > 0.0)) {
    throw Error(ErrorCode::kConfig, "smoothing epsilon must be > 0");
  }
}

nlohmann::json BleuConfig::to_json() const {
  return {{"max_ngram", max_ngram},
          {"smoothing", smoothing == BleuSmoothing::kNone ? "none" : "add_epsilon"},
          {"epsilon", epsilon},
          {"tokenization", tokenization == BleuTokenization::kCharacter ? "character" : "whitespace_punct"},
          {"effective_order", effective_order}};
}

BleuConfig bleu_config_for(Language reference_lang, BleuConfig base) {
  base.tokenization = reference_lang == Language::kZh ? BleuTokenization::kCharacter
                                                      : BleuTokenization::kWhitespacePunct;
  return base;
}

std::vector<std::string> bleu_tokens(std::string_view input, BleuTokenization tokenization) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char32_t c : text::decode_utf8(input)) {
    const auto cls = text::classify(c);
    if (cls == text::CharClass::kSpace) {
      flush();
      continue;
    }
    const bool standalone = tokenization == BleuTokenization::kCharacter ||
                            cls == text::CharClass::kPunct || cls == text::CharClass::kHan;
    if (standalone) {
      flush();
      std::string one;
      text::append_utf8(one, c);
      out.push_back(std::move(one));
    } else {
      text::append_utf8(cur, c);
    }
  }
  flush();
  return out;
}

double bleu(std::string_view candidate, std::string_view reference, const BleuConfig& cfg) {
  cfg.validate();
  const auto cand = bleu_tokens(candidate, cfg.tokenization);
  const auto ref = bleu_tokens(reference, cfg.tokenization);
  if (cand.empty() || ref.empty()) return 0.0;

  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= cfg.max_ngram; ++n) {
    if (cand.size() < n) {
      if (cfg.effective_order) break;
      return 0.0;
    }
    const auto cand_counts = count_ngrams(cand, n);
    const auto ref_counts = count_ngrams(ref, n);
    std::size_t matches = 0;
    for (const auto& [g, c] : cand_counts) {
      if (auto it = ref_counts.find(g); it != ref_counts.end()) matches += std::min(c, it->second);
    }
    const double total = static_cast<double>(cand.size() - n + 1);
    double p;
    if (matches > 0) {
      p = static_cast<double>(matches) / total;
    } else if (cfg.smoothing == BleuSmoothing::kAddEpsilon) {
      p = cfg.epsilon / total;
    } else {
      return 0.0;
    }
    log_sum += std::log(p);
    ++orders;
  }
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return std::clamp(bp * std::exp(log_sum / static_cast<double>(orders)), 0.0, 1.0);
}

double bleu_rho(double bleu_value, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) invalid("BLEU-rho needs rho > 0");
  return bleu_value / rho;
}

double bleu_rho(std::string_view source, std::string_view back_translation, double rho,
                const BleuConfig& cfg) {
  if (!(rho > 0.0) || !std::isfinite(rho)) invalid("BLEU-rho needs rho > 0");
  return bleu_rho(bleu(back_translation, source, cfg), rho);
}

int bt_cerr(const BenchRecord& record, std::string_view back_translation,
            const QualityClients& clients, double threshold, const PosTagger& tagger) {
  if (record.core_events.empty()) return 1;
  const auto matches = match_core_events(record.core_events, back_translation, clients, threshold, tagger);
  return std::all_of(matches.begin(), matches.end(), [](bool b) { return b; }) ? 1 : 0;
}

EvalRow eval_row_from_json(const nlohmann::json& j) {
  EvalRow row;
  try {
    row.record_id = j.at("record_id").get<std::string>();
    row.source = j.at("source").get<std::string>();
    row.translation = j.at("translation").get<std::string>();
    row.back_translation = j.at("back_translation").get<std::string>();
    row.lang_pair = parse_lang_pair(j.at("lang_pair").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed eval row: ") + e.what());
  }
  return row;
}

EvalSample evaluate_sample(const EvalRow& row, const BenchRecord& record, const EvalOptions& opts,
                           const QualityClients& clients, const PosTagger& tagger) {
  const auto [src_lang, tgt_lang] = row.lang_pair;
  auto it = record.budget_bounds.find(tgt_lang);
  if (it == record.budget_bounds.end()) {
    throw Error(ErrorCode::kUnsupportedLanguage,
                "record " + record.id + " has no budget bounds for " + std::string(language_code(tgt_lang)));
  }
  EvalSample s;
  s.record_id = row.record_id;
  s.lang_pair = row.lang_pair;
  s.rho = syllable_ratio(count_syllables(row.source, src_lang), count_syllables(row.translation, tgt_lang));
  s.bounds = it->second;
  s.in_bounds = s.bounds.contains(s.rho);
  const auto cfg = bleu_config_for(src_lang, opts.bleu);
  s.bleu = bleu(row.back_translation, row.source, cfg);
  s.bleu_rho = s.rho > 0.0 ? bleu_rho(s.bleu, s.rho) : 0.0;
  s.bt_cerr = bt_cerr(record, row.back_translation, clients, opts.event_threshold, tagger);
  s.output_tokens = bleu_tokens(row.translation, tgt_lang == Language::kZh
                                                     ? BleuTokenization::kCharacter
                                                     : BleuTokenization::kWhitespacePunct)
                        .size();
  if (opts.external) {
    const double v = opts.external->score(row.source, row.translation);
    if (!(v >= 0.0 && v <= 1.0)) {
      invalid("external scorer " + opts.external->name() + " returned a value outside [0, 1]");
    }
    s.external_score = v;
  }
  return s;
}

namespace {

EvalAggregate aggregate(std::span<const EvalSample* const> samples) {
  EvalAggregate a;
  a.n = samples.size();
  double ext_sum = 0.0;
  std::size_t ext_n = 0;
  bool shared = true;
  for (const auto* s : samples) {
    a.mean_bleu += s->bleu;
    a.mean_bleu_rho += s->bleu_rho;
    a.bt_cerr += s->bt_cerr;
    a.in_bounds_fraction += s->in_bounds ? 1.0 : 0.0;
    a.mean_rho += s->rho;
    a.avg_output_tokens += static_cast<double>(s->output_tokens);
    if (s->external_score) {
      ext_sum += *s->external_score;
      ++ext_n;
    }
    shared = shared && s->bounds == samples.front()->bounds;
  }
  const double n = static_cast<double>(a.n);
  a.mean_bleu /= n;
  a.mean_bleu_rho /= n;
  a.bt_cerr /= n;
  a.in_bounds_fraction /= n;
  a.mean_rho /= n;
  a.avg_output_tokens /= n;
  if (ext_n > 0) a.mean_external = ext_sum / static_cast<double>(ext_n);
  if (shared) {
    a.bounds = samples.front()->bounds;
    a.corpus_in_bounds = a.bounds->contains(a.mean_rho);
  }
  return a;
}

}  // namespace

EvalReport aggregate_report(std::span<const EvalSample> samples) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyInput, "cannot aggregate an empty sample set");
  std::vector<const EvalSample*> all;
  std::map<std::string, std::vector<const EvalSample*>> groups;
  for (const auto& s : samples) {
    all.push_back(&s);
    groups[s.lang_pair.code()].push_back(&s);
  }
  EvalReport r;
  r.overall = aggregate(all);
  for (const auto& [code, group] : groups) r.by_lang_pair[code] = aggregate(group);
  return r;
}

nlohmann::json to_json(const EvalSample& s) {
  nlohmann::json j = {{"record_id", s.record_id},
                      {"lang_pair", s.lang_pair.code()},
                      {"rho", s.rho},
                      {"bounds", to_json(s.bounds)},
                      {"in_bounds", s.in_bounds},
                      {"bleu", s.bleu},
                      {"bleu_rho", s.bleu_rho},
                      {"bt_cerr", s.bt_cerr},
                      {"output_tokens", s.output_tokens}};
  if (s.external_score) j["external_score"] = *s.external_score;
  return j;
}

nlohmann::json to_json(const EvalAggregate& a) {
  nlohmann::json j = {{"n", a.n},
                      {"mean_bleu", a.mean_bleu},
                      {"mean_bleu_rho", a.mean_bleu_rho},
                      {"bt_cerr", a.bt_cerr},
                      {"in_bounds_fraction", a.in_bounds_fraction},
                      {"mean_rho", a.mean_rho},
                      {"avg_output_tokens", a.avg_output_tokens}};
  j["mean_external"] = a.mean_external ? nlohmann::json(*a.mean_external) : nlohmann::json(nullptr);
  j["corpus_in_bounds"] = a.corpus_in_bounds ? nlohmann::json(*a.corpus_in_bounds) : nlohmann::json(nullptr);
  j["bounds"] = a.bounds ? to_json(*a.bounds) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json by = nlohmann::json::object();
  for (const auto& [code, a] : r.by_lang_pair) by[code] = to_json(a);
  return {{"overall", to_json(r.overall)}, {"by_lang_pair", by}};
}

}  // namespace tempo
