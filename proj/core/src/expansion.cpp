#include "tempo/expansion.hpp"

#include <algorithm>
#include <cmath>

#include "tempo/error.hpp"

namespace tempo {

namespace {

const SyllableCount& require_bt(const RatioSample& s) {
  if (!s.bt) {
    throw Error(ErrorCode::kMissingBackTranslation, "sample has no back-translation count");
  }
  return *s.bt;
}

}  // namespace

double syllable_ratio(SyllableCount src, SyllableCount tgt) {
  return static_cast<double>(tgt.value) / static_cast<double>(std::max<std::size_t>(src.value, 1));
}

double forward_ratio(const RatioSample& s) { return syllable_ratio(s.src, s.tgt); }

double backward_ratio(const RatioSample& s) { return syllable_ratio(s.tgt, require_bt(s)); }

double roundtrip_ratio(const RatioSample& s) { return syllable_ratio(s.src, require_bt(s)); }

MetricStats describe(std::span<const double> values) {
  MetricStats m;
  m.n = values.size();
  if (values.empty()) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(m.n);
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean) * (v - m.mean);
  m.std = std::sqrt(ss / static_cast<double>(m.n));
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto mid = m.n / 2;
  m.median = m.n % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return m;
}

CorpusReport corpus_report(std::span<const RatioSample> samples) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyInput, "corpus_report needs at least one sample");
  std::vector<double> fwd, bwd, rtp;
  fwd.reserve(samples.size());
  std::size_t above = 0;
  for (const auto& s : samples) {
    fwd.push_back(forward_ratio(s));
    if (s.bt) {
      bwd.push_back(backward_ratio(s));
      rtp.push_back(roundtrip_ratio(s));
      if (rtp.back() > 1.0) ++above;
    }
  }
  CorpusReport r;
  r.fwd = describe(fwd);
  r.bwd = describe(bwd);
  r.rtp = describe(rtp);
  r.n = rtp.size();
  r.frac_rtp_gt_one = rtp.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(rtp.size());
  return r;
}

nlohmann::json to_json(const MetricStats& m) {
  return {{"mean", m.mean}, {"std", m.std}, {"median", m.median}, {"n", m.n}};
}

nlohmann::json to_json(const CorpusReport& r) {
  return {{"fwd", to_json(r.fwd)},
          {"bwd", to_json(r.bwd)},
          {"rtp", to_json(r.rtp)},
          {"frac_rtp_gt_one", r.frac_rtp_gt_one},
          {"n", r.n}};
}

nlohmann::json plot_data(std::span<const RatioSample> samples) {
  auto rows = nlohmann::json::array();
  for (const auto& s : samples) {
    nlohmann::json row = {{"src", s.src.value}, {"tgt", s.tgt.value}, {"fwd", forward_ratio(s)}};
    if (s.bt) {
      row["bt"] = s.bt->value;
      row["bwd"] = backward_ratio(s);
      row["rtp"] = roundtrip_ratio(s);
    } else {
      row["bt"] = nullptr;
      row["bwd"] = nullptr;
      row["rtp"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tempo
