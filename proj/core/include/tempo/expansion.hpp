#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "tempo/syllable.hpp"

namespace tempo {

struct RatioSample {
  SyllableCount src;
  SyllableCount tgt;
  std::optional<SyllableCount> bt;
};

// sigma(tgt) / max(sigma(src), 1)
double syllable_ratio(SyllableCount src, SyllableCount tgt);

double forward_ratio(const RatioSample& s);
// Throw Error(kMissingBackTranslation) when s.bt is empty.
double backward_ratio(const RatioSample& s);
double roundtrip_ratio(const RatioSample& s);

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // population
  double median = 0.0;
  std::size_t n = 0;
};

MetricStats describe(std::span<const double> values);

struct CorpusReport {
  MetricStats fwd;
  MetricStats bwd;
  MetricStats rtp;
  double frac_rtp_gt_one = 0.0;
  std::size_t n = 0;  // rtp-eligible samples
};

// Forward statistics use every sample; backward and roundtrip statistics use
// only samples carrying a back-translation count.
CorpusReport corpus_report(std::span<const RatioSample> samples);

nlohmann::json to_json(const MetricStats& m);
nlohmann::json to_json(const CorpusReport& r);

// Scatter-ready rows: src, tgt, bt (or null), fwd, bwd, rtp.
nlohmann::json plot_data(std::span<const RatioSample> samples);

}  // namespace tempo
