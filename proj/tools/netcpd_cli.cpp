// netcpd: simulate, detect, threshold, benchmark, metrics.
//
// Exit codes: 0 success, 2 usage, 3 input/format/IO, 4 degenerate data.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netcpd/netcpd.hpp"

namespace {

using namespace netcpd;

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitDegenerate = 4;

struct Global {
  unsigned threads = 0;
  bool quiet = false;
};

struct InputArgs {
  std::string path;
  std::string format = "dnmt";
  int T = 0;            // edgelist
  int n = 0;            // edgelist, contacts
  std::int64_t window = 60;  // contacts, seconds
  bool no_self_loops = false;
};

struct DistillArgs {
  int M = 500;
  std::string tau = "auto";
  std::string norm = "operator";
  std::uint64_t seed = 0;
};

struct LocalizeArgs {
  std::string refine = "susvt";
  double tau2_scale = 0.6;
  std::optional<double> tau3;
  double trim = 0.01;
};

void add_input(CLI::App* cmd, InputArgs& in) {
  cmd->add_option("-i,--input", in.path, "Input network sequence")->required();
  cmd->add_option("--format", in.format, "dnmt | edgelist | contacts")
      ->check(CLI::IsMember({"dnmt", "edgelist", "contacts"}));
  cmd->add_option("--T", in.T, "Number of snapshots (edgelist)");
  cmd->add_option("--n", in.n, "Number of nodes (edgelist, contacts)");
  cmd->add_option("--window", in.window, "Aggregation window in seconds (contacts)");
  cmd->add_flag("--no-self-loops", in.no_self_loops, "Reject diagonal entries");
}

void add_distill(CLI::App* cmd, DistillArgs& d) {
  cmd->add_option("--M", d.M, "Number of random intervals")->check(CLI::PositiveNumber);
  cmd->add_option("--tau", d.tau, "'auto' or a fixed positive threshold");
  cmd->add_option("--norm", d.norm, "operator | frobenius")->check(CLI::IsMember({"operator", "frobenius"}));
  cmd->add_option("--seed", d.seed, "Interval sampling seed");
}

void add_localize(CLI::App* cmd, LocalizeArgs& l) {
  cmd->add_option("--refine", l.refine, "susvt | naive | none")->check(CLI::IsMember({"susvt", "naive", "none"}));
  cmd->add_option("--tau2-scale", l.tau2_scale, "Singular value threshold scale");
  cmd->add_option("--tau3", l.tau3, "Grid step factor (default 3/ln T)");
  cmd->add_option("--trim", l.trim, "Trim fraction of the candidate splits");
}

AdjacencySequence load_input(const InputArgs& in) {
  const bool loops = !in.no_self_loops;
  if (in.format == "dnmt") return read_dnmt(in.path, loops);
  if (in.format == "edgelist") {
    if (in.T < 1 || in.n < 1) throw RangeError("--format edgelist requires --T and --n");
    return read_edgelist(in.path, in.T, in.n, loops);
  }
  if (in.n < 1) throw RangeError("--format contacts requires --n");
  return aggregate_contacts(read_contacts(in.path), in.window, in.n);
}

Norm parse_norm(const std::string& s) { return s == "frobenius" ? Norm::Frobenius : Norm::Operator; }

Refine parse_refine(const std::string& s) {
  if (s == "naive") return Refine::Naive;
  if (s == "none") return Refine::None;
  return Refine::Susvt;
}

DistillOptions distill_options(const DistillArgs& d, unsigned threads) {
  DistillOptions opt;
  opt.M = d.M;
  opt.norm = parse_norm(d.norm);
  opt.seed = d.seed;
  opt.threads = threads;
  if (d.tau != "auto") {
    double v = 0;
    if (!text::parse_double(d.tau, v) || !(v > 0)) throw RangeError("--tau must be 'auto' or a positive number");
    opt.tau = v;
  }
  return opt;
}

LocalizeParams localize_params(const LocalizeArgs& l) {
  LocalizeParams p;
  p.tau2_scale = l.tau2_scale;
  p.tau3 = l.tau3;
  p.trim_fraction = l.trim;
  p.validate();
  return p;
}

void emit(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-")
    std::cout << data;
  else
    text::write_file(path, data);
}

std::string join(const std::string& dir, const char* name) { return (std::filesystem::path(dir) / name).string(); }

/// Change-points from either a ground-truth sidecar or a change-points CSV.
struct PointFile {
  std::vector<int> eta;
  std::optional<int> T;
};

PointFile read_points(const std::string& path) {
  const auto data = text::read_file(path);
  const auto rows = text::lines(data);
  if (rows.empty()) throw FormatError("empty file " + path, 1);
  PointFile pf;
  if (rows[0] == "key,value") {
    const auto kv = parse_key_value_csv(data);
    const auto it = kv.find("change_points");
    if (it == kv.end()) throw FormatError("missing change_points key in " + path, 1);
    pf.eta = parse_change_point_list(it->second, 1);
    if (auto t = kv.find("T"); t != kv.end()) {
      std::int64_t v;
      if (!text::parse_int(t->second, v)) throw FormatError("bad T in " + path, 1);
      pf.T = static_cast<int>(v);
    }
    return pf;
  }
  const auto head = text::split(rows[0]);
  std::size_t col = head.size();
  for (std::size_t c = 0; c < head.size(); ++c)
    if (head[c] == "eta_hat" || head[c] == "eta") col = c;
  if (col == head.size()) throw FormatError("no eta_hat column in " + path, 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    const auto f = text::split(rows[r]);
    std::int64_t v;
    if (f.size() <= col || !text::parse_int(f[col], v)) throw FormatError("bad change-point row", r + 1);
    pf.eta.push_back(static_cast<int>(v));
  }
  std::sort(pf.eta.begin(), pf.eta.end());
  return pf;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  int scenario = 3;
  int n = 50;
  int T = 160;
  std::optional<int> K;
  std::optional<double> rho;
  std::uint64_t seed = 0;
  bool no_self_loops = false;
  bool carry = false;
  std::string out;
  std::string truth;
  std::string mixing;
};

ScenarioConfig build_scenario(int id, int n, int T, std::uint64_t seed, std::optional<int> K, std::optional<double> rho,
                              bool no_self_loops, bool carry) {
  ScenarioOptions opt;
  opt.K = K;
  opt.rho = rho;
  opt.self_loops = !no_self_loops;
  opt.carry_kernel_at_change = carry;
  return scenario(id, n, T, seed, opt);
}

int cmd_simulate(const SimulateArgs& a, const Global& g) {
  const auto cfg = build_scenario(a.scenario, a.n, a.T, a.seed, a.K, a.rho, a.no_self_loops, a.carry);
  const auto sim = simulate(cfg, a.seed, resolve_threads(g.threads));
  write_dnmt(sim.seq, a.out);
  write_ground_truth(sim.truth, a.truth.empty() ? a.out + ".truth.csv" : a.truth);
  if (!a.mixing.empty()) {
    std::string csv = "t,m\n";
    for (std::size_t t = 0; t < cfg.mixing.size(); ++t) csv += std::to_string(t + 1) + "," + text::fmt(cfg.mixing[t]) + "\n";
    text::write_file(a.mixing, csv);
  }
  if (!g.quiet)
    std::cerr << "scenario " << a.scenario << ": n=" << a.n << " T=" << a.T
              << " change_points=" << format_change_points(sim.truth.change_points) << "\n";
  return 0;
}

int cmd_detect(const InputArgs& in, const DistillArgs& d, const LocalizeArgs& l, const std::string& out,
               const std::string& diag_dir, const Global& g) {
  const auto seq = load_input(in);
  DetectOptions opt;
  opt.distill = distill_options(d, resolve_threads(g.threads));
  opt.refine = parse_refine(l.refine);
  opt.localize = localize_params(l);
  const auto rep = detect(seq, opt);
  emit(out, change_points_csv(rep));
  if (!diag_dir.empty()) {
    std::filesystem::create_directories(diag_dir);
    text::write_file(join(diag_dir, "signals.csv"), signals_csv(rep.distill.records));
    if (rep.distill.threshold) {
      text::write_file(join(diag_dir, "threshold.csv"), threshold_csv(rep.distill.records, *rep.distill.threshold));
      text::write_file(join(diag_dir, "threshold_summary.csv"), threshold_summary_csv(*rep.distill.threshold));
    }
    if (rep.trace) text::write_file(join(diag_dir, "trace.csv"), trace_csv(*rep.trace));
  }
  if (!g.quiet) {
    std::cerr << "tau=" << text::fmt(rep.distill.tau) << " k_hat=" << rep.eta_hat.size();
    if (rep.distill.threshold && rep.distill.threshold->fallback_used) std::cerr << " (tau_ref fallback)";
    std::cerr << "\n";
  }
  return 0;
}

int cmd_threshold(const InputArgs& in, const DistillArgs& d, const std::string& out, const std::string& summary,
                  const Global& g) {
  const auto seq = load_input(in);
  const unsigned threads = resolve_threads(g.threads);
  const CusumEngine engine(seq);
  const Norm norm = parse_norm(d.norm);
  const auto intervals = sample_intervals(seq.T(), d.M, d.seed);
  const auto records = compute_signals(engine, intervals, norm, threads);
  const auto diag = select_tau(records, engine, norm, threads);
  emit(out, threshold_csv(records, diag));
  if (!summary.empty()) text::write_file(summary, threshold_summary_csv(diag));
  if (!g.quiet)
    std::cerr << "tau_ref=" << text::fmt(diag.ref.tau_ref) << " tau=" << text::fmt(diag.tau_selected)
              << (diag.fallback_used ? " (fallback)" : "") << "\n";
  return 0;
}

struct BenchmarkArgs {
  int scenario = 3;
  int n = 50;
  int T = 160;
  std::optional<int> K;
  std::optional<double> rho;
  int reps = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> methods{"susvt"};
  std::string table = "csv";
  std::string rows;
  std::string out;
  bool no_timing = false;
};

int cmd_benchmark(const BenchmarkArgs& a, const DistillArgs& d, const LocalizeArgs& l, const Global& g) {
  if (a.reps < 1) throw RangeError("--reps must be positive");
  const unsigned threads = resolve_threads(g.threads);
  const auto params = localize_params(l);
  std::vector<std::vector<EvalRow>> rows(a.methods.size());
  std::vector<std::size_t> failed(a.methods.size(), 0);
  std::string row_csv = std::string("rep,method,") + eval_row_csv_header();
  for (int r = 0; r < a.reps; ++r) {
    const std::uint64_t rep_seed = derive_seed(a.seed, static_cast<std::uint64_t>(r));
    try {
      const auto cfg = build_scenario(a.scenario, a.n, a.T, rep_seed, a.K, a.rho, false, false);
      const auto sim = simulate(cfg, rep_seed, threads);
      const CusumEngine engine(sim.seq);
      auto dopt = distill_options(d, threads);
      dopt.seed = derive_seed(rep_seed, 1);
      const auto t0 = std::chrono::steady_clock::now();
      const auto dist = run_distillation(engine, dopt);
      const double t_distill = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      for (std::size_t m = 0; m < a.methods.size(); ++m) {
        try {
          const auto t1 = std::chrono::steady_clock::now();
          const auto eta_hat = localize(engine, dist.result, parse_refine(a.methods[m]), params, threads);
          double secs = t_distill + std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
          if (a.no_timing) secs = 0;
          rows[m].push_back(evaluate(sim.truth.change_points, eta_hat, a.T, secs));
          row_csv += std::to_string(r) + "," + a.methods[m] + "," + eval_row_csv(rows[m].back());
        } catch (const Error& e) {
          ++failed[m];
          if (!g.quiet) std::cerr << "rep " << r << " " << a.methods[m] << " failed: " << e.what() << "\n";
        }
      }
    } catch (const Error& e) {
      for (auto& f : failed) ++f;
      if (!g.quiet) std::cerr << "rep " << r << " failed: " << e.what() << "\n";
    }
    if (!g.quiet) std::cerr << "rep " << (r + 1) << "/" << a.reps << "\n";
  }
  std::vector<BenchmarkTable> tables;
  for (std::size_t m = 0; m < a.methods.size(); ++m) {
    const std::string name = "RID-" + a.methods[m] + (d.norm == "frobenius" ? "-frobenius" : "");
    BenchmarkTable t;
    if (!rows[m].empty()) {
      t = summarize(rows[m], name);
    } else {
      t.method = name;
    }
    t.failed = failed[m];
    tables.push_back(t);
  }
  emit(a.out, a.table == "text" ? to_text(tables) : to_csv(tables));
  if (!a.rows.empty()) text::write_file(a.rows, row_csv);
  return 0;
}

int cmd_metrics(const std::string& truth, const std::string& estimate, std::optional<int> T, const std::string& out) {
  const auto tr = read_points(truth);
  const auto es = read_points(estimate);
  const auto horizon = T ? T : (tr.T ? tr.T : es.T);
  if (!horizon) throw RangeError("--T is required when neither file records it");
  emit(out, std::string(eval_row_csv_header()) + eval_row_csv(evaluate(tr.eta, es.eta, *horizon)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change-point detection for dynamic networks"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--threads", g.threads, "Worker threads (default: NETCPD_THREADS, then all cores)");
  app.add_flag("-q,--quiet", g.quiet, "No progress output on stderr");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate a scenario and write DNMT plus a ground-truth sidecar");
  sim->add_option("--scenario", sa.scenario, "1, 2 or 3")->check(CLI::Range(1, 3));
  sim->add_option("--n", sa.n, "Number of nodes");
  sim->add_option("--T", sa.T, "Number of snapshots");
  sim->add_option("--K", sa.K, "Number of change-points (scenarios 2 and 3)");
  sim->add_option("--rho", sa.rho, "Sparsity parameter");
  sim->add_option("--seed", sa.seed, "Seed");
  sim->add_flag("--no-self-loops", sa.no_self_loops, "Zero diagonal");
  sim->add_flag("--carry-kernel", sa.carry, "Do not redraw edges at change-points");
  sim->add_option("-o,--out", sa.out, "DNMT output path")->required();
  sim->add_option("--truth", sa.truth, "Sidecar path (default <out>.truth.csv)");
  sim->add_option("--mixing", sa.mixing, "Also write the mixing schedule m(t) as CSV");

  InputArgs din;
  DistillArgs dd;
  LocalizeArgs dl;
  std::string dout, ddiag;
  auto* det = app.add_subcommand("detect", "Detect change-points");
  add_input(det, din);
  add_distill(det, dd);
  add_localize(det, dl);
  det->add_option("-o,--out", dout, "Change-points CSV (default stdout)");
  det->add_option("--diagnostics", ddiag, "Directory for signals/threshold/trace CSVs");

  InputArgs tin;
  DistillArgs td;
  std::string tout, tsummary;
  auto* thr = app.add_subcommand("threshold", "Signals, clustering and the selected threshold");
  add_input(thr, tin);
  add_distill(thr, td);
  thr->add_option("-o,--out", tout, "Per-interval CSV (default stdout)");
  thr->add_option("--summary", tsummary, "Summary CSV path");

  BenchmarkArgs ba;
  DistillArgs bd;
  LocalizeArgs bl;
  auto* ben = app.add_subcommand("benchmark", "Repeated simulate/detect/evaluate");
  ben->add_option("--scenario", ba.scenario, "1, 2 or 3")->check(CLI::Range(1, 3));
  ben->add_option("--n", ba.n, "Number of nodes");
  ben->add_option("--T", ba.T, "Number of snapshots");
  ben->add_option("--K", ba.K, "Number of change-points");
  ben->add_option("--rho", ba.rho, "Sparsity parameter");
  ben->add_option("--reps", ba.reps, "Repetitions");
  ben->add_option("--methods", ba.methods, "Refinements to compare: susvt, naive, none")
      ->delimiter(',')
      ->check(CLI::IsMember({"susvt", "naive", "none"}));
  ben->add_option("--table", ba.table, "csv | text")->check(CLI::IsMember({"csv", "text"}));
  ben->add_option("--rows", ba.rows, "Per-rep rows CSV path");
  ben->add_option("-o,--out", ba.out, "Table output (default stdout)");
  ben->add_flag("--no-timing", ba.no_timing, "Report zero runtimes (byte-reproducible tables)");
  ben->add_option("--M", bd.M, "Number of random intervals")->check(CLI::PositiveNumber);
  ben->add_option("--tau", bd.tau, "'auto' or a fixed positive threshold");
  ben->add_option("--norm", bd.norm, "operator | frobenius")->check(CLI::IsMember({"operator", "frobenius"}));
  ben->add_option("--seed", ba.seed, "Base seed; rep r uses a derived seed");
  ben->add_option("--tau2-scale", bl.tau2_scale, "Singular value threshold scale");
  ben->add_option("--tau3", bl.tau3, "Grid step factor");
  ben->add_option("--trim", bl.trim, "Trim fraction");

  std::string mtruth, mest, mout;
  std::optional<int> mT;
  auto* met = app.add_subcommand("metrics", "Compare estimated change-points with the truth");
  met->add_option("--truth", mtruth, "Sidecar or change-points CSV")->required();
  met->add_option("--estimate", mest, "Change-points CSV")->required();
  met->add_option("--T", mT, "Horizon (default from the sidecar)");
  met->add_option("-o,--out", mout, "Output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(sa, g);
    if (*det) return cmd_detect(din, dd, dl, dout, ddiag, g);
    if (*thr) return cmd_threshold(tin, td, tout, tsummary, g);
    if (*ben) return cmd_benchmark(ba, bd, bl, g);
    if (*met) return cmd_metrics(mtruth, mest, mT, mout);
  } catch (const FormatError& e) {
    std::cerr << "netcpd: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "netcpd: " << e.what() << "\n";
    return kExitInput;
  } catch (const DegenerateDataError& e) {
    std::cerr << "netcpd: degenerate data: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const NumericError& e) {
    std::cerr << "netcpd: numerical failure: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const RangeError& e) {
    std::cerr << "netcpd: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "netcpd: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}
