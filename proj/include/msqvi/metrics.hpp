#pragma once

// Glycaemic summaries of CGM traces sampled every 5 minutes.
//
// LBGI/HBGI use the symmetrizing transform of Kovatchev et al.:
// f(BG) = 1.509 ((ln BG)^1.084 - 5.381), rl = 10 min(f, 0)^2,
// rh = 10 max(f, 0)^2, averaged over samples.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "msqvi/errors.hpp"

namespace msqvi {

struct GlycaemicSummary {
  double bg_mean = 0;
  double bg_min = 0;
  double bg_max = 0;
  double pct_target = 0;        // [70, 180]
  double pct_mild_hypo = 0;     // [50, 70)
  double pct_severe_hypo = 0;   // < 50
  double pct_mild_hyper = 0;    // (180, 250]
  double pct_severe_hyper = 0;  // > 250
  double lbgi = 0;
  double hbgi = 0;
  double tdi = 0;  // U/day
  double tdg = 0;  // mg/day
};

inline double bg_risk_transform(double bg) {
  if (!(bg > 0)) throw DimensionError("cgm", "readings must be positive");
  return 1.509 * (std::pow(std::log(bg), 1.084) - 5.381);
}

/// Summaries of equal-length traces; `sample_minutes` converts dose sums to
/// per-day totals.
inline GlycaemicSummary summarize_trace(std::span<const double> cgm, std::span<const double> insulin,
                                        std::span<const double> glucagon,
                                        double sample_minutes = 5.0) {
  if (cgm.empty()) throw DimensionError("cgm", "trace is empty");
  if (insulin.size() != cgm.size() || glucagon.size() != cgm.size())
    throw DimensionError("traces", "cgm, insulin and glucagon must have equal length");
  GlycaemicSummary s;
  const double n = static_cast<double>(cgm.size());
  std::size_t target = 0, mild_hypo = 0, severe_hypo = 0, mild_hyper = 0, severe_hyper = 0;
  double rl = 0, rh = 0;
  for (double bg : cgm) {
    const double f = bg_risk_transform(bg);
    rl += 10 * std::pow(std::min(f, 0.0), 2);
    rh += 10 * std::pow(std::max(f, 0.0), 2);
    if (bg < 50) ++severe_hypo;
    else if (bg < 70) ++mild_hypo;
    else if (bg <= 180) ++target;
    else if (bg <= 250) ++mild_hyper;
    else ++severe_hyper;
  }
  s.pct_target = 100.0 * static_cast<double>(target) / n;
  s.pct_mild_hypo = 100.0 * static_cast<double>(mild_hypo) / n;
  s.pct_severe_hypo = 100.0 * static_cast<double>(severe_hypo) / n;
  s.pct_mild_hyper = 100.0 * static_cast<double>(mild_hyper) / n;
  s.pct_severe_hyper = 100.0 * static_cast<double>(severe_hyper) / n;
  s.lbgi = rl / n;
  s.hbgi = rh / n;
  s.bg_mean = std::accumulate(cgm.begin(), cgm.end(), 0.0) / n;
  s.bg_min = *std::min_element(cgm.begin(), cgm.end());
  s.bg_max = *std::max_element(cgm.begin(), cgm.end());
  s.bg_mean = std::clamp(s.bg_mean, s.bg_min, s.bg_max);
  const double days = n * sample_minutes / 1440.0;
  s.tdi = std::accumulate(insulin.begin(), insulin.end(), 0.0) / days;
  s.tdg = std::accumulate(glucagon.begin(), glucagon.end(), 0.0) / days;
  return s;
}

/// Field-wise mean of per-trial summaries.
inline GlycaemicSummary average(std::span<const GlycaemicSummary> trials) {
  if (trials.empty()) throw DimensionError("trials", "nothing to average");
  GlycaemicSummary m;
  auto acc = [&](double GlycaemicSummary::*f) {
    double t = 0;
    for (const auto& s : trials) t += s.*f;
    m.*f = t / static_cast<double>(trials.size());
  };
  for (auto f : {&GlycaemicSummary::bg_mean, &GlycaemicSummary::bg_min, &GlycaemicSummary::bg_max,
                 &GlycaemicSummary::pct_target, &GlycaemicSummary::pct_mild_hypo,
                 &GlycaemicSummary::pct_severe_hypo, &GlycaemicSummary::pct_mild_hyper,
                 &GlycaemicSummary::pct_severe_hyper, &GlycaemicSummary::lbgi,
                 &GlycaemicSummary::hbgi, &GlycaemicSummary::tdi, &GlycaemicSummary::tdg})
    acc(f);
  return m;
}

inline void write_summary_header(std::ostream& os) {
  os << "subject,phase,algorithm,bg_mean,bg_min,bg_max,pct_target,pct_mild_hypo,pct_severe_hypo,"
        "pct_mild_hyper,pct_severe_hyper,lbgi,hbgi,tdi,tdg\n";
}

inline void write_summary_row(std::ostream& os, const std::string& subject, const std::string& phase,
                              const std::string& algorithm, const GlycaemicSummary& s) {
  os << subject << ',' << phase << ',' << algorithm << ',' << s.bg_mean << ',' << s.bg_min << ','
     << s.bg_max << ',' << s.pct_target << ',' << s.pct_mild_hypo << ',' << s.pct_severe_hypo
     << ',' << s.pct_mild_hyper << ',' << s.pct_severe_hyper << ',' << s.lbgi << ',' << s.hbgi
     << ',' << s.tdi << ',' << s.tdg << '\n';
}

}  // namespace msqvi
