// Acceptance run: one PASS/FAIL line per criterion on stdout, progress on
// stderr. Exit status is nonzero when any criterion fails.
//
//   netcpd_acceptance [criterion ...]   (default: all of 1..7)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "netcpd/netcpd.hpp"
#include "oracles.hpp"

using namespace netcpd;

namespace {

constexpr int kM = 500;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 3) { return text::fixed(v, digits); }

void progress(const std::string& what, int r, int reps) {
  std::cerr << "  " << what << " rep " << (r + 1) << "/" << reps << "\r" << std::flush;
  if (r + 1 == reps) std::cerr << "\n";
}

DistillOptions paper_distill(std::uint64_t seed, Norm norm = Norm::Operator) {
  DistillOptions opt;
  opt.M = kM;
  opt.norm = norm;
  opt.seed = seed;
  return opt;
}

struct RepResult {
  EvalRow row;
  std::vector<int> truth;
  std::vector<int> eta_hat;
};

/// Simulates rep r of a scenario and runs the full pipeline with the default
/// parameters.
RepResult run_rep(int id, int n, int T, std::uint64_t base, int r, Norm norm = Norm::Operator) {
  const std::uint64_t seed = derive_seed(base, static_cast<std::uint64_t>(r));
  const auto sim = simulate(scenario(id, n, T, seed), seed);
  const auto t0 = std::chrono::steady_clock::now();
  DetectOptions opt;
  opt.distill = paper_distill(derive_seed(seed, 1), norm);
  const auto rep = detect(sim.seq, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {evaluate(sim.truth.change_points, rep.eta_hat, T, secs), sim.truth.change_points, rep.eta_hat};
}

// Scenario 3 operator-norm runs are shared by criteria 1 and 5.
std::vector<RepResult> scenario3_runs;

const std::vector<RepResult>& scenario3(int reps) {
  while (static_cast<int>(scenario3_runs.size()) < reps) {
    const int r = static_cast<int>(scenario3_runs.size());
    progress("scenario 3 n=50", r, reps);
    scenario3_runs.push_back(run_rep(3, 50, 160, 0x53330001, r));
  }
  return scenario3_runs;
}

Verdict criterion1() {
  const int reps = 50;
  const auto& runs = scenario3(reps);
  std::vector<EvalRow> rows;
  for (int r = 0; r < reps; ++r) rows.push_back(runs[static_cast<std::size_t>(r)].row);
  const auto tab = summarize(rows);
  const auto correct = tab.k_diff_counts[2];
  const double h = tab.mean_hausdorff.value_or(100.0);
  const bool pass = correct * 10 >= static_cast<std::size_t>(reps) * 9 && h <= 1.0 && tab.mean_ari >= 0.97;
  return {pass, "K_hat=K " + std::to_string(correct) + "/" + std::to_string(reps) + " (need >= 90%), mean H*100/T " +
                    (tab.mean_hausdorff ? fmt(h) : std::string("blank")) + " (need <= 1.0), mean ARI " +
                    fmt(tab.mean_ari) + " (need >= 0.97), mean time " + fmt(tab.mean_runtime, 2) + " s"};
}

Verdict criterion2() {
  const int reps = 50;
  std::vector<EvalRow> rows;
  for (int r = 0; r < reps; ++r) {
    progress("scenario 2 n=50", r, reps);
    rows.push_back(run_rep(2, 50, 160, 0x53320001, r).row);
  }
  const auto tab = summarize(rows);
  const auto correct = tab.k_diff_counts[2];
  const bool pass = correct * 10 >= static_cast<std::size_t>(reps) * 9 && tab.mean_hausdorff_star &&
                    *tab.mean_hausdorff_star <= 0.5;
  return {pass, "K_hat=K " + std::to_string(correct) + "/" + std::to_string(reps) +
                    " (need >= 90%), mean H*100/T over correct-K reps " +
                    (tab.mean_hausdorff_star ? fmt(*tab.mean_hausdorff_star) : std::string("blank")) +
                    " (need <= 0.5)"};
}

Verdict criterion3() {
  const double k50 = *diagnostics(scenario(2, 50, 160, 1)).kappa;
  const double k150 = *diagnostics(scenario(2, 150, 160, 1)).kappa;
  // independent evaluation of the operator norm via Jacobi sweeps
  const auto q1 = detail::block_mean(50, *default_rho(50), scenario_q1());
  const auto q2 = detail::block_mean(50, *default_rho(50), scenario_q2());
  const double j50 = oracle::spectral_norm(q1 - q2);
  const bool pass = std::abs(k50 - 4.66) <= 0.01 && std::abs(k150 - 5.30) <= 0.01 && std::abs(j50 - k50) < 1e-8;
  return {pass, "kappa(n=50) " + fmt(k50, 4) + " (want 4.66 +- 0.01), kappa(n=150) " + fmt(k150, 4) +
                    " (want 5.30 +- 0.01)"};
}

Verdict criterion4() {
  const int reps = 30, n = 150, T = 160;
  double h_susvt = 0, h_naive = 0;
  int used = 0;
  for (int r = 0; r < reps; ++r) {
    progress("scenario 2 n=150", r, reps);
    const std::uint64_t seed = derive_seed(0x53340001, static_cast<std::uint64_t>(r));
    const auto sim = simulate(scenario(2, n, T, seed), seed);
    const CusumEngine engine(sim.seq);
    const auto dist = run_distillation(engine, paper_distill(derive_seed(seed, 1)));
    if (dist.result.k_hat != static_cast<int>(sim.truth.change_points.size())) continue;
    const auto a = localize_susvt(engine, dist.result).first;
    const auto b = localize_naive(engine, dist.result);
    h_susvt += hausdorff(sim.truth.change_points, a, T) * 100.0;
    h_naive += hausdorff(sim.truth.change_points, b, T) * 100.0;
    ++used;
  }
  if (used == 0) return {false, "no rep with K_hat = K"};
  h_susvt /= used;
  h_naive /= used;
  return {h_susvt <= h_naive, "mean H*100/T susvt " + fmt(h_susvt) + " vs naive " + fmt(h_naive) + " over " +
                                   std::to_string(used) + "/" + std::to_string(reps) + " correct-K reps"};
}

Verdict criterion5() {
  const int reps = 30;
  const auto& op = scenario3(reps);
  int op_correct = 0, fro_wrong = 0;
  for (int r = 0; r < reps; ++r) {
    progress("scenario 3 n=50 frobenius", r, reps);
    op_correct += op[static_cast<std::size_t>(r)].row.k_diff == 0;
    fro_wrong += run_rep(3, 50, 160, 0x53330001, r, Norm::Frobenius).row.k_diff != 0;
  }
  const bool pass = fro_wrong * 2 >= reps && op_correct * 10 >= reps * 9;
  return {pass, "Frobenius K_hat!=K " + std::to_string(fro_wrong) + "/" + std::to_string(reps) +
                    " (need >= 50%), operator K_hat=K " + std::to_string(op_correct) + "/" + std::to_string(reps) +
                    " (need >= 90%)"};
}

Verdict criterion6() {
  const int reps = 20, n = 150, T = 160;
  int separated = 0;
  double worst_free = 0, worst_change = 1e300, sum_tau = 0;
  for (int r = 0; r < reps; ++r) {
    progress("scenario 3 n=150 threshold", r, reps);
    const std::uint64_t seed = derive_seed(0x53360001, static_cast<std::uint64_t>(r));
    const auto sim = simulate(scenario(3, n, T, seed), seed);
    const CusumEngine engine(sim.seq);
    const auto dist = run_distillation(engine, paper_distill(derive_seed(seed, 1)));
    const double tau = dist.tau;
    const auto& eta = sim.truth.change_points;
    const double margin = sim.truth.diag.delta / 8.0;
    double max_free = 0, min_change = 1e300;
    for (const auto& rec : dist.records) {
      // (s, e] mixes regimes when it holds both eta - 1 and eta
      bool contains = false, far = true;
      for (int k : eta) {
        const int boundary = k - 1;
        if (rec.s < boundary && boundary < rec.e) contains = true;
        if (std::abs(rec.s - boundary) < margin || std::abs(rec.e - boundary) < margin) far = false;
      }
      if (!contains)
        max_free = std::max(max_free, rec.signal);
      else if (far)
        min_change = std::min(min_change, rec.signal);
    }
    separated += max_free < tau && tau < min_change;
    worst_free = std::max(worst_free, max_free / tau);
    worst_change = std::min(worst_change, min_change / tau);
    sum_tau += tau;
  }
  return {separated * 10 >= reps * 9,
          "tau separates in " + std::to_string(separated) + "/" + std::to_string(reps) +
              " reps (need >= 90%); mean tau " + fmt(sum_tau / reps) + ", worst max(free)/tau " + fmt(worst_free) +
              ", worst min(change)/tau " + fmt(worst_change)};
}

// ---------------------------------------------------------------------------
// Criterion 7: property suites.

struct Checks {
  std::vector<std::string> failed;
  void expect(bool ok, const std::string& name) {
    if (!ok) failed.push_back(name);
  }
};

void prop_distill(Checks& c) {
  Rng rng(0xD1571);
  bool agree = true, ordered = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int size = static_cast<int>(rng.uniform_int(0, 12));
    const int T = static_cast<int>(rng.uniform_int(2, 60));
    std::vector<std::pair<int, int>> iv;
    std::vector<SignalRecord> rec;
    for (int k = 0; k < size; ++k) {
      int a = static_cast<int>(rng.uniform_int(0, T - 1));
      int b = static_cast<int>(rng.uniform_int(a + 1, T));
      iv.emplace_back(a, b);
      rec.push_back({a, b, 1.0});
    }
    const auto res = distill(rec);
    agree = agree && res.k_hat == oracle::max_disjoint(iv);
    for (const auto& d : res.intervals) ordered = ordered && d.l < d.r;
  }
  c.expect(agree, "distill vs max-disjoint oracle");
  c.expect(ordered, "distill l_j < r_j");
}

void prop_linalg(Checks& c) {
  std::mt19937_64 gen(0x11A1);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const auto a = oracle::random_symmetric(2 + k % 15, gen);
    worst = std::max(worst, std::abs(operator_norm(SymMatrix::from_dense(a)) - oracle::spectral_norm(a)));
  }
  c.expect(worst < 1e-8, "operator_norm vs Jacobi oracle (max err " + fmt(worst, 12) + ")");

  bool idem = true, clip = true;
  for (int k = 0; k < 50; ++k) {
    const auto m = SymMatrix::from_dense(4.0 * oracle::random_symmetric(9, gen));
    const auto once = usvt(m, 1.0 + 0.05 * k, ClipBound::unbounded());
    const auto twice = usvt(once, 1.0 + 0.05 * k, ClipBound::unbounded());
    idem = idem && (once.dense() - twice.dense()).cwiseAbs().maxCoeff() < 1e-9;
    const double level = 0.1 + 0.02 * k;
    const auto clipped = usvt(m, 0.5, ClipBound::at(level));
    clip = clip && clipped.dense().cwiseAbs().maxCoeff() <= level;
  }
  c.expect(idem, "usvt idempotence");
  c.expect(clip, "usvt clip bound");
}

void prop_cusum(Checks& c) {
  std::mt19937_64 gen(0xC05);
  const int T = 24;
  const std::vector<Eigen::MatrixXd> flat(T, oracle::random_symmetric(5, gen));
  std::vector<Eigen::MatrixXd> seq;
  for (int t = 0; t < T; ++t) seq.push_back(oracle::random_symmetric(5, gen));
  const std::vector<Eigen::MatrixXd> rev(seq.rbegin(), seq.rend());
  const CusumEngine ef(flat), fwd(seq), bwd(rev);
  double zero = 0, anti = 0;
  for (int s = 0; s < T; ++s)
    for (int e = s + 2; e <= T; ++e)
      for (int t = s + 1; t < e; ++t) {
        zero = std::max(zero, ef.cusum(s, t, e).dense().cwiseAbs().maxCoeff());
        anti = std::max(anti, (fwd.cusum(s, t, e).dense() + bwd.cusum(T - e, T - t, T - s).dense()).cwiseAbs().maxCoeff());
      }
  c.expect(zero <= 1e-12, "cusum of constant sequence (max " + fmt(zero, 15) + ")");
  c.expect(anti <= 1e-10, "cusum time-reversal antisymmetry");
}

void prop_simulate(Checks& c) {
  const int n = 80, T = 150;
  const double theta = 0.35, m = 0.3;
  ScenarioConfig cfg;
  cfg.n = n;
  cfg.T = T;
  cfg.theta.push_back(Eigen::MatrixXd::Constant(n, n, theta));
  cfg.mixing.assign(T - 1, m);
  const auto sim = simulate(cfg, 0x5171);
  const double pairs = n * (n + 1) / 2.0;
  bool stationary = true;
  for (int t : {1, 2, T / 2, T}) {
    double sum = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) sum += sim.seq.at(t, i, j);
    stationary = stationary && std::abs(sum / pairs - theta) <= 3 * std::sqrt(theta * (1 - theta) / pairs);
  }
  c.expect(stationary, "simulate mean stationarity (3 sigma)");
  double num = 0, den = 0;
  for (int t = 1; t < T; ++t)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double a = sim.seq.at(t, i, j) - theta, b = sim.seq.at(t + 1, i, j) - theta;
        num += a * b;
        den += a * a;
      }
  // standard error of the lag-1 estimate is about 1/sqrt(pairs * T) ~ 0.002
  c.expect(std::abs(num / den - (1 - m)) < 0.02, "simulate lag-1 autocorrelation " + fmt(num / den) + " vs " + fmt(1 - m));
}

void prop_metrics(Checks& c) {
  std::mt19937_64 gen(0x3E7);
  bool h_ok = true, a_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int T = 20 + trial;
    std::uniform_int_distribution<int> cnt(1, 5), pos(2, T);
    auto draw = [&] {
      std::set<int> s;
      const int k = cnt(gen);
      while (static_cast<int>(s.size()) < k) s.insert(pos(gen));
      return std::vector<int>(s.begin(), s.end());
    };
    const auto a = draw(), b = draw();
    h_ok = h_ok && hausdorff(a, b, T) == oracle::hausdorff(a, b, T);
    a_ok = a_ok && std::abs(ari(a, b, T) - oracle::ari_pairs(a, b, T)) < 1e-12;
  }
  c.expect(h_ok, "hausdorff vs brute force");
  c.expect(a_ok, "ari vs pair counting");
}

void prop_dnmt(Checks& c) {
  bool ok = true;
  for (std::uint64_t k = 0; k < 100; ++k) {
    Rng rng(derive_seed(0xD7A7, k));
    const int T = static_cast<int>(rng.uniform_int(1, 10)), n = static_cast<int>(rng.uniform_int(2, 8));
    AdjacencySequence seq(T, n);
    for (int t = 1; t <= T; ++t)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          if (rng.bernoulli(0.4)) seq.set_edge(t, i, j);
    const auto bytes = to_dnmt(seq);
    ok = ok && to_dnmt(from_dnmt(bytes)) == bytes;
  }
  c.expect(ok, "DNMT byte round trip");
}

void prop_threads(Checks& c) {
  const auto sim = simulate(scenario(3, 30, 100, 0x7E4D, {.K = 2, .rho = 0.5}), 0x7E4D);
  auto render = [&](unsigned threads) {
    DetectOptions opt;
    opt.distill = paper_distill(0x7E4E);
    opt.distill.M = 200;
    opt.distill.threads = threads;
    const auto rep = detect(sim.seq, opt);
    std::string out = change_points_csv(rep) + signals_csv(rep.distill.records);
    if (rep.distill.threshold) out += threshold_csv(rep.distill.records, *rep.distill.threshold);
    if (rep.trace) out += trace_csv(*rep.trace);
    return out;
  };
  const auto one = render(1);
  c.expect(one == render(2) && one == render(8), "detect output identical at 1, 2, 8 threads");
}

Verdict criterion7() {
  Checks c;
  prop_distill(c);
  prop_linalg(c);
  prop_cusum(c);
  prop_simulate(c);
  prop_metrics(c);
  prop_dnmt(c);
  prop_threads(c);
  std::string detail = "all property suites hold";
  if (!c.failed.empty()) {
    detail = "failed:";
    for (const auto& f : c.failed) detail += " [" + f + "]";
  }
  return {c.failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7};
  std::vector<int> which;
  for (int a = 1; a < argc; ++a) which.push_back(std::atoi(argv[a]));
  if (which.empty())
    for (int k = 1; k <= 7; ++k) which.push_back(k);

  int failures = 0;
  for (int k : which) {
    if (k < 1 || k > 7) {
      std::cerr << "unknown criterion " << k << "\n";
      return 2;
    }
    std::cerr << "criterion " << k << "...\n";
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << v.detail << " [" << fmt(secs, 0) << " s]"
              << std::endl;
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
