#include "cli.hpp"

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tempo/error.hpp"
#include "tempo/grpo.hpp"
#include "tempo/metrics.hpp"
#include "tempo/pipeline.hpp"
#include "tempo/service.hpp"
#include "tempo/syllable.hpp"

namespace tempo::cli {

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string lang;
  std::string in;
  std::string out;
  std::size_t jobs = 0;
};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTransport:
    case ErrorCode::kRetryExhausted:
    case ErrorCode::kEmptyCompletion:
    case ErrorCode::kParse:
    case ErrorCode::kIo:
      return kRuntime;
    default:
      return kValidation;
  }
}

void write_error(std::ostream& err, std::string_view code, const std::string& message,
                 const std::string& usage = {}) {
  nlohmann::json e = {{"code", code}, {"message", message}};
  if (!usage.empty()) e["usage"] = usage;
  err << nlohmann::json{{"error", e}, {"schema_version", kSchemaVersion}}.dump() << '\n';
}

std::string read_all(const Common& c, Io& io) {
  if (c.in.empty() || c.in == "-") {
    std::ostringstream ss;
    ss << io.in.rdbuf();
    return ss.str();
  }
  std::ifstream f(c.in, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open input " + c.in);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) out.push_back(line);
  }
  return out;
}

nlohmann::json parse_json(const std::string& text, const std::string& where) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    invalid(where + " is not valid JSON: " + e.what());
  }
}

std::vector<nlohmann::json> read_jsonl(const Common& c, Io& io) {
  std::vector<nlohmann::json> out;
  std::size_t n = 0;
  for (const auto& line : lines_of(read_all(c, io))) {
    out.push_back(parse_json(line, "input line " + std::to_string(++n)));
  }
  return out;
}

// Writes to --out when given, otherwise to the io stream.
class Sink {
 public:
  Sink(const Common& c, Io& io) {
    if (!c.out.empty() && c.out != "-") {
      file_.open(c.out, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error(ErrorCode::kIo, "cannot write " + c.out);
      os_ = &file_;
    } else {
      os_ = &io.out;
    }
  }
  std::ostream& operator*() { return *os_; }
  void line(const nlohmann::json& j) { *os_ << j.dump() << '\n'; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

Settings settings_of(const Common& c, Io& io) {
  std::optional<std::filesystem::path> file;
  if (!c.config.empty()) file = c.config;
  return load_settings(file, io.env);
}

QualityClients clients_of(const Settings& s, Io& io) {
  return io.clients ? *io.clients : make_quality_clients(s, io.env);
}

// ---------------------------------------------------------------------------

int cmd_count(const Common& c, const std::vector<std::string>& texts, Io& io) {
  const Language default_lang = parse_language(c.lang.empty() ? "zh" : c.lang);
  std::vector<std::pair<std::string, Language>> inputs;
  if (!texts.empty()) {
    for (const auto& t : texts) inputs.emplace_back(t, default_lang);
  } else {
    for (const auto& line : lines_of(read_all(c, io))) {
      const auto first = line.find_first_not_of(" \t");
      if (line[first] == '{') {
        const auto j = parse_json(line, "input line");
        if (!j.contains("text") || !j["text"].is_string()) invalid("count input objects need a 'text' string");
        const auto lang = j.contains("lang") ? parse_language(j["lang"].get<std::string>()) : default_lang;
        inputs.emplace_back(j["text"].get<std::string>(), lang);
      } else {
        inputs.emplace_back(line, default_lang);
      }
    }
  }
  Sink out(c, io);
  for (const auto& [text, lang] : inputs) {
    out.line({{"text", text},
              {"lang", language_code(lang)},
              {"syllables", count_syllables(text, lang).value},
              {"schema_version", kSchemaVersion}});
  }
  return kOk;
}

int cmd_diagnose(const Common& c, Io& io) {
  auto items = nlohmann::json::array();
  for (auto j : read_jsonl(c, io)) {
    if (!j.contains("langs") && !c.lang.empty()) j["langs"] = c.lang;
    items.push_back(std::move(j));
  }
  auto report = roundtrip_diagnostics(items);
  report["schema_version"] = kSchemaVersion;
  Sink out(c, io);
  out.line(report);
  return kOk;
}

int cmd_reward(const Common& c, Io& io) {
  auto settings = settings_of(c, io);
  if (c.jobs > 0) settings.workers = c.jobs;
  RewardService svc(settings, clients_of(settings, io), io.env);
  auto items = read_jsonl(c, io);
  for (auto& j : items) {
    if (j.is_object() && !j.contains("lang_pair") && !c.lang.empty()) j["lang_pair"] = c.lang;
  }
  Sink out(c, io);
  int worst = kOk;
  for (std::size_t start = 0; start < items.size(); start += settings.max_batch) {
    const auto end = std::min(items.size(), start + settings.max_batch);
    nlohmann::json batch = {{"items", nlohmann::json(std::vector<nlohmann::json>(
                                          items.begin() + static_cast<std::ptrdiff_t>(start),
                                          items.begin() + static_cast<std::ptrdiff_t>(end)))}};
    const auto resp = svc.score_batch(batch);
    if (resp.status != 200) {
      const auto& e = resp.body["error"];
      throw Error(ErrorCode::kInvalidArgument, e.value("message", "batch rejected"));
    }
    for (auto r : resp.body["results"]) {
      if (!r["ok"].get<bool>()) {
        worst = std::max(worst, r["error"]["status"].get<int>() >= 500 ? int(kRuntime) : int(kValidation));
      }
      r["config_hash"] = svc.config_hash();
      r["schema_version"] = kSchemaVersion;
      out.line(r);
    }
  }
  return worst;
}

int cmd_simulate(const Common& c, std::optional<std::size_t> steps, std::optional<double> beta, Io& io) {
  const auto doc = parse_json(read_all(c, io), "pool spec");
  const auto& pools_json = doc.is_array() ? doc : doc.value("pools", nlohmann::json());
  if (!pools_json.is_array()) invalid("pool spec must be an array of pools or an object with 'pools'");
  std::vector<CandidatePool> pools;
  for (const auto& p : pools_json) pools.push_back(pool_from_json(p));

  GRPOConfig g;
  if (doc.is_object() && doc.contains("grpo")) g = grpo_config_from_json(doc["grpo"]);
  if (c.seed) g.seed = *c.seed;
  if (steps) g.steps = *steps;
  if (beta) g.kl_beta = *beta;
  g.validate();

  const auto settings = settings_of(c, io);
  const auto target = parse_language(c.lang.empty() ? "en" : c.lang);
  const auto reward_cfg = settings.length_for(target);
  const auto result = simulate_training(pools, reward_cfg, settings.weights, g);
  Sink out(c, io);
  for (const auto& s : result.trajectory) {
    auto j = to_json(s);
    j["schema_version"] = kSchemaVersion;
    out.line(j);
  }
  return kOk;
}

int cmd_build_bench(const Common& c, std::optional<std::size_t> quota, std::optional<double> pause,
                    const std::string& manifest_path, Io& io) {
  BuildConfig cfg;
  if (!c.lang.empty()) cfg.source_lang = parse_language(c.lang);
  cfg.filter.script = cfg.source_lang;
  if (c.seed) cfg.seed = *c.seed;
  if (c.jobs > 0) cfg.jobs = c.jobs;
  if (pause) cfg.pause_threshold_s = *pause;
  if (quota) {
    for (auto d : {Domain::kGaming, Domain::kFilmTv, Domain::kTravel, Domain::kAcgn, Domain::kGeneral}) {
      cfg.quotas[d] = *quota;
    }
  }
  std::vector<TranscriptInput> transcripts;
  for (const auto& j : read_jsonl(c, io)) transcripts.push_back(transcript_from_json(j));
  const auto result = build_bench(transcripts, cfg, *LexiconTagger::bundled());

  Sink out(c, io);
  for (const auto& r : result.records) out.line(to_json(r));

  std::string mpath = manifest_path;
  if (mpath.empty() && !c.out.empty() && c.out != "-") mpath = c.out + ".manifest.json";
  if (!mpath.empty()) {
    auto m = result.manifest.to_json();
    m["config"] = cfg.to_json();
    m["schema_version"] = kSchemaVersion;
    std::ofstream f(mpath, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + mpath);
    f << m.dump(2) << '\n';
  }
  return kOk;
}

int cmd_eval(const Common& c, const std::string& records_path, std::optional<double> threshold, Io& io) {
  std::map<std::string, BenchRecord> records;
  std::size_t n = 0;
  for (const auto& line : lines_of(read_file(records_path))) {
    auto r = record_from_json(parse_json(line, records_path + " line " + std::to_string(++n)));
    records.emplace(r.id, std::move(r));
  }
  const auto settings = settings_of(c, io);
  auto clients = clients_of(settings, io);
  std::string embedding = "configured";
  if (!clients.embedding) {
    clients.embedding = std::make_shared<HashingEmbeddingClient>();
    embedding = "hashing";
  }
  EvalOptions opts;
  opts.event_threshold = threshold.value_or(settings.event_match_threshold);
  const auto& tagger = *LexiconTagger::bundled();

  std::vector<EvalSample> samples;
  for (const auto& j : read_jsonl(c, io)) {
    const auto row = eval_row_from_json(j);
    auto it = records.find(row.record_id);
    if (it == records.end()) invalid("no bench record with id " + row.record_id);
    samples.push_back(evaluate_sample(row, it->second, opts, clients, tagger));
  }
  nlohmann::json per = nlohmann::json::array();
  for (const auto& s : samples) per.push_back(to_json(s));
  Sink out(c, io);
  out.line({{"report", to_json(aggregate_report(samples))},
            {"samples", per},
            {"bleu", opts.bleu.to_json()},
            {"event_threshold", opts.event_threshold},
            {"embedding", embedding},
            {"schema_version", kSchemaVersion}});
  return kOk;
}

std::atomic<RewardService*> g_serving{nullptr};

extern "C" void on_signal(int) {
  if (auto* s = g_serving.load()) s->stop();
}

int cmd_serve(const Common& c, std::optional<std::string> host, std::optional<int> port, Io& io) {
  auto settings = settings_of(c, io);
  if (host) settings.host = *host;
  if (port) settings.port = *port;
  if (c.jobs > 0) settings.workers = c.jobs;
  RewardService svc(settings, clients_of(settings, io), io.env);
  const int bound = svc.bind(settings.host, settings.port);
  io.out << nlohmann::json{{"listening", settings.host},
                           {"port", bound},
                           {"config_hash", svc.config_hash()},
                           {"schema_version", kSchemaVersion}}
                .dump()
         << std::endl;
  g_serving.store(&svc);
  auto prev_int = std::signal(SIGINT, on_signal);
  auto prev_term = std::signal(SIGTERM, on_signal);
  svc.listen();
  std::signal(SIGINT, prev_int);
  std::signal(SIGTERM, prev_term);
  g_serving.store(nullptr);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, Io& io) {
  CLI::App app{"Syllable-budgeted translation rewards, diagnostics and benchmark tooling", "tempo"};
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--config", c.config, "Settings JSON file");
  app.add_option("--lang", c.lang, "Language code (count, simulate, build-bench) or pair such as zh-en");
  app.add_option("--in", c.in, "Input file (default: standard input)");
  app.add_option("--out", c.out, "Output file (default: standard output)");
  app.add_option("--jobs", c.jobs, "Worker threads for parallel stages");

  auto* count = app.add_subcommand("count", "Count syllables of text arguments or input lines");
  std::vector<std::string> texts;
  count->add_option("text", texts, "Texts to count; reads input lines when absent");

  auto* diagnose = app.add_subcommand("diagnose", "Forward, backward and roundtrip expansion ratios");

  auto* reward = app.add_subcommand("reward", "Score reward items (JSONL) with the composite reward");

  auto* simulate = app.add_subcommand("simulate", "Run the GRPO simulator over a pool spec");
  std::optional<std::size_t> steps;
  std::optional<double> beta;
  simulate->add_option("--steps", steps, "Training steps");
  simulate->add_option("--beta", beta, "KL penalty coefficient");

  auto* build = app.add_subcommand("build-bench", "Build benchmark records from timed transcripts");
  std::optional<std::size_t> quota;
  std::optional<double> pause;
  std::string manifest;
  build->add_option("--quota", quota, "Records per domain");
  build->add_option("--pause", pause, "Pause threshold in seconds");
  build->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json)");

  auto* eval = app.add_subcommand("eval", "Evaluate translations against bench records");
  std::string records_path;
  std::optional<double> threshold;
  eval->add_option("--records", records_path, "Bench records JSONL")->required();
  eval->add_option("--threshold", threshold, "Core-event match threshold");

  auto* serve = app.add_subcommand("serve", "Run the HTTP reward service");
  std::optional<std::string> host;
  std::optional<int> port;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    io.out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    write_error(io.err, "usage", e.what(), sub ? sub->help() : app.help());
    return kValidation;
  }

  try {
    if (count->parsed()) return cmd_count(c, texts, io);
    if (diagnose->parsed()) return cmd_diagnose(c, io);
    if (reward->parsed()) return cmd_reward(c, io);
    if (simulate->parsed()) return cmd_simulate(c, steps, beta, io);
    if (build->parsed()) return cmd_build_bench(c, quota, pause, manifest, io);
    if (eval->parsed()) return cmd_eval(c, records_path, threshold, io);
    if (serve->parsed()) return cmd_serve(c, host, port, io);
  } catch (const Error& e) {
    write_error(io.err, error_code_name(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    write_error(io.err, "internal", e.what());
    return kRuntime;
  }
  return kValidation;
}

}  // namespace tempo::cli
