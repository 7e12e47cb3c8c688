#pragma once

// End-to-end detection: distillation followed by localization, plus the CSV
// renderings of every intermediate result.

#include <optional>
#include <string>
#include <vector>

#include "netcpd/cusum.hpp"
#include "netcpd/distill.hpp"
#include "netcpd/localize.hpp"
#include "netcpd/text_io.hpp"
#include "netcpd/threshold.hpp"

namespace netcpd {

enum class Refine { Susvt, Naive, None };

inline const char* to_string(Refine r) {
  switch (r) {
    case Refine::Susvt: return "susvt";
    case Refine::Naive: return "naive";
    case Refine::None: return "none";
  }
  return "?";
}

struct DetectOptions {
  DistillOptions distill;
  Refine refine = Refine::Susvt;
  LocalizeParams localize;
};

struct DetectionReport {
  DistillOutcome distill;
  Refine refine = Refine::Susvt;
  std::vector<int> eta_hat;
  std::optional<LocalizeTrace> trace;  ///< present for Refine::Susvt
};

/// Localizes within already distilled intervals.
inline std::vector<int> localize(const CusumEngine& engine, const DistillResult& result, Refine refine,
                                 const LocalizeParams& params, unsigned threads,
                                 std::optional<LocalizeTrace>* trace = nullptr) {
  switch (refine) {
    case Refine::Susvt: {
      auto [eta, tr] = localize_susvt(engine, result, params, threads);
      if (trace) *trace = std::move(tr);
      return eta;
    }
    case Refine::Naive: return localize_naive(engine, result);
    case Refine::None: break;
  }
  std::vector<int> mid;
  for (const auto& iv : result.intervals) mid.push_back((iv.l + iv.r) / 2);
  return mid;
}

inline DetectionReport detect(const CusumEngine& engine, const DetectOptions& opt) {
  DetectionReport rep;
  rep.refine = opt.refine;
  rep.distill = run_distillation(engine, opt.distill);
  rep.eta_hat = localize(engine, rep.distill.result, opt.refine, opt.localize, opt.distill.threads, &rep.trace);
  return rep;
}

inline DetectionReport detect(const AdjacencySequence& seq, const DetectOptions& opt) {
  return detect(CusumEngine(seq), opt);
}

// ---------------------------------------------------------------------------
// CSV renderings. All LF-terminated, '.' decimal separator.

inline std::string signals_csv(const std::vector<SignalRecord>& records) {
  std::string out = "m,s,e,signal\n";
  for (std::size_t m = 0; m < records.size(); ++m) {
    const auto& r = records[m];
    out += std::to_string(m + 1) + "," + std::to_string(r.s) + "," + std::to_string(r.e) + "," + text::fmt(r.signal) + "\n";
  }
  return out;
}

/// Per-record clustering diagnostics. rho, delta and label are blank for
/// records left out of the clustering and when the clustering was degenerate.
inline std::string threshold_csv(const std::vector<SignalRecord>& records, const ThresholdDiagnostics& diag) {
  std::string out = "m,s,e,signal,rho,delta,label\n";
  const auto& dp = diag.clusters;
  std::vector<long> slot(records.size(), -1);
  for (std::size_t c = 0; c < diag.clustered.size(); ++c) slot[diag.clustered[c]] = static_cast<long>(c);
  for (std::size_t m = 0; m < records.size(); ++m) {
    const auto& r = records[m];
    out += std::to_string(m + 1) + "," + std::to_string(r.s) + "," + std::to_string(r.e) + "," + text::fmt(r.signal);
    if (dp && slot[m] >= 0) {
      const auto c = static_cast<std::size_t>(slot[m]);
      out += "," + text::fmt(dp->rho[c]) + "," + text::fmt(dp->delta[c]) + "," + std::to_string(dp->labels[c]);
    } else {
      out += ",,,";
    }
    out += "\n";
  }
  return out;
}

inline std::string threshold_summary_csv(const ThresholdDiagnostics& diag) {
  std::string out = "tau_ref,h,e_T,bandwidth,boundary,tau_selected,fallback_used\n";
  out += text::fmt(diag.ref.tau_ref) + "," + std::to_string(diag.ref.h) + "," + text::fmt(diag.ref.e_T) + ",";
  out += diag.clusters ? text::fmt(diag.clusters->bandwidth) : std::string();
  out += ",";
  out += diag.boundary ? text::fmt(*diag.boundary) : std::string();
  out += "," + text::fmt(diag.tau_selected) + "," + (diag.fallback_used ? "true" : "false") + "\n";
  return out;
}

inline std::string change_points_csv(const DetectionReport& rep) {
  std::string out = "k,eta_hat,l,r\n";
  const auto& iv = rep.distill.result.intervals;
  for (std::size_t k = 0; k < rep.eta_hat.size(); ++k) {
    out += std::to_string(k + 1) + "," + std::to_string(rep.eta_hat[k]) + "," + std::to_string(iv[k].l) + "," +
           std::to_string(iv[k].r) + "\n";
  }
  return out;
}

inline std::string trace_csv(const LocalizeTrace& trace) {
  std::string out = "k,l,r,s,e,v,delta_hat,delta_tilde,eta_star,eta_hat,fallback\n";
  for (const auto& st : trace.steps) {
    out += std::to_string(st.k) + "," + std::to_string(st.l) + "," + std::to_string(st.r) + "," + std::to_string(st.s) +
           "," + std::to_string(st.e) + "," + std::to_string(st.v) + "," + text::fmt(st.delta_hat) + "," +
           text::fmt(st.delta_tilde) + "," + std::to_string(st.eta_star) + "," + std::to_string(st.eta_hat) + "," +
           (st.fallback ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace netcpd
