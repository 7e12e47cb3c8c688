#include <gtest/gtest.h>

#include "netcpd/localize.hpp"
#include "netcpd/simulate.hpp"
#include "oracles.hpp"

using namespace netcpd;

namespace {

/// Segment means substituted for samples: block model with a rank-2 jump.
std::vector<Eigen::MatrixXd> noiseless_blocks(int n, int T, const std::vector<int>& eta) {
  const auto q1 = detail::block_mean(n, 0.5, scenario_q1());
  const auto q2 = detail::block_mean(n, 0.5, scenario_q2());
  std::vector<Eigen::MatrixXd> seq;
  for (int t = 1; t <= T; ++t) {
    int seg = 0;
    for (int e : eta) seg += e <= t;
    seq.push_back(seg % 2 == 0 ? q1 : q2);
  }
  return seq;
}

DistillResult one_interval(int l, int r) { return {1, {{l, r}}}; }

}  // namespace

TEST(LocalizeParams, Defaults) {
  LocalizeParams p;
  EXPECT_EQ(p.grid_step(160), 3);
  EXPECT_EQ(p.grid_step(2), 3);
  EXPECT_NEAR(p.tau2(50, 160), 0.6 * (std::sqrt(50.0) + std::sqrt(std::log(160.0))), 1e-12);
  p.tau3 = 1.0 / std::log(160.0);
  EXPECT_EQ(p.grid_step(160), 1);
  p.tau3 = 0.01;
  EXPECT_EQ(p.grid_step(160), 1);
  p.trim_fraction = 0.5;
  EXPECT_THROW(p.validate(), RangeError);
}

TEST(LocalizeNaive, EmptyInput) {
  const AdjacencySequence seq(10, 3);
  EXPECT_TRUE(localize_naive(seq, {}).empty());
}

TEST(LocalizeNaive, ShortIntervalAroundExactJump) {
  const auto seq = noiseless_blocks(9, 30, {16});
  const CusumEngine eng(seq);
  EXPECT_EQ(localize_naive(eng, one_interval(14, 16)), std::vector<int>{16});
  EXPECT_EQ(localize_naive(eng, one_interval(3, 28)), std::vector<int>{16});
}

TEST(LocalizeNaive, FlatProfilePicksSmallestSplit) {
  const std::vector<Eigen::MatrixXd> seq(20, Eigen::MatrixXd::Zero(3, 3));
  const CusumEngine eng(seq);
  EXPECT_EQ(localize_naive(eng, one_interval(4, 12)), std::vector<int>{6});
}

TEST(LocalizeNaive, DegenerateIntervalReturnsMidpoint) {
  const std::vector<Eigen::MatrixXd> seq(20, Eigen::MatrixXd::Identity(3, 3));
  const CusumEngine eng(seq);
  EXPECT_EQ(localize_naive(eng, one_interval(7, 8)), std::vector<int>{8});
}

TEST(LocalizeSusvt, EmptyInput) {
  const AdjacencySequence seq(10, 3);
  auto [eta, trace] = localize_susvt(seq, {});
  EXPECT_TRUE(eta.empty());
  EXPECT_TRUE(trace.steps.empty());
}

TEST(LocalizeSusvt, NoiselessBlocksExact) {
  // Delta = 40, g = 3; every candidate profile is evaluated, no fallback
  const int n = 30, T = 160;
  const std::vector<int> eta{41, 81, 121};
  const auto seq = noiseless_blocks(n, T, eta);
  const CusumEngine eng(seq);
  DistillResult dr{3, {{30, 50}, {72, 90}, {110, 128}}};
  LocalizeParams p;
  p.tau2_scale = 0.05;
  auto [out, trace] = localize_susvt(eng, dr, p);
  EXPECT_EQ(trace.g, 3);
  EXPECT_EQ(out, eta);
  for (const auto& st : trace.steps) {
    EXPECT_FALSE(st.fallback);
    // exhaustive profile: the reported split attains the maximum
    double best = -1e300;
    for (auto [t, v] : st.profile) best = std::max(best, v);
    for (auto [t, v] : st.profile)
      if (t == st.eta_star) {
        EXPECT_EQ(v, best);
      }
  }
}

TEST(LocalizeSusvt, TraceInvariants) {
  const auto cfg = scenario(2, 30, 120, 4, {.K = 2, .rho = 0.6});
  const auto sim = simulate(cfg, 5);
  const CusumEngine eng(sim.seq);
  DistillResult dr{2, {{30, 48}, {75, 90}}};
  auto [out, trace] = localize_susvt(eng, dr);
  ASSERT_EQ(out.size(), 2u);
  for (const auto& st : trace.steps) {
    EXPECT_LT(st.s, st.v);
    EXPECT_LT(st.v, st.e);
    EXPECT_GT(st.eta_hat, st.s);
    EXPECT_LE(st.eta_hat, st.e);
    EXPECT_GT(st.eta_hat, 0);
    EXPECT_LE(st.eta_hat, 120);
  }
  EXPECT_LT(out[0], out[1]);
  auto again = localize_susvt(eng, dr);
  EXPECT_EQ(again.first, out);
  EXPECT_EQ(localize_susvt(eng, dr, {}, 4).first, out);
}

TEST(LocalizeSusvt, PaddingAndParity) {
  LocalizeStep st;
  st.l = 30;
  st.r = 50;
  st.delta_hat = 40;
  susvt_bounds(st, 160, 3);
  EXPECT_EQ(st.s, 27);      // floor(30 - 2.5)
  EXPECT_EQ(st.v, 40);
  // floor(52.5) = 52; floor((52-27-1)/3) = 8 is even, no change
  EXPECT_EQ(st.e, 52);
  st.r = 53;
  susvt_bounds(st, 160, 3);
  // e = 55, floor(27/3) = 9 is odd, extended by g
  EXPECT_EQ(st.e, 58);
  st.r = 158;
  st.l = 150;
  susvt_bounds(st, 160, 3);
  EXPECT_LE(st.e, 160);
  EXPECT_EQ(((st.e - st.s - 1) / 3) % 2, 0);
  EXPECT_DOUBLE_EQ(midpoint_spacing({{30, 50}, {72, 90}, {110, 128}}, 160), 38.0);
  EXPECT_DOUBLE_EQ(midpoint_spacing({{150, 158}}, 160), 7.0);
}

TEST(LocalizeSusvt, ShortIntervalFallsBackToNaive) {
  const auto seq = noiseless_blocks(9, 60, {31});
  const CusumEngine eng(seq);
  auto [out, trace] = localize_susvt(eng, one_interval(29, 32), {.tau2_scale = 0.6, .tau3 = 3.0, .trim_fraction = 0.01});
  ASSERT_EQ(trace.steps.size(), 1u);
  EXPECT_TRUE(trace.steps[0].fallback);
  EXPECT_EQ(out, localize_naive(eng, one_interval(29, 32)));
}

TEST(SusvtSplit, ReducesToPlainInnerProductLocalizer) {
  // tau2 = 0, no clipping, g = 1, no trim: argmax_t <Z^t, Y> with Y the even-grid
  // CUSUM at v and Z^t the odd-grid CUSUM, computed here from explicit subsequences
  std::mt19937_64 gen(17);
  const int T = 60, n = 5;
  std::vector<Eigen::MatrixXd> seq;
  for (int t = 1; t <= T; ++t) {
    Eigen::MatrixXd m = oracle::random_symmetric(n, gen);
    if (t >= 33) m.array() += 0.8;
    seq.push_back(m);
  }
  const CusumEngine eng(seq);
  for (auto [s, e, v] : {std::tuple{10, 50, 30}, std::tuple{4, 58, 31}, std::tuple{20, 45, 33}}) {
    const auto got = susvt_split(eng, s, e, v, 1, 0.0, ClipBound::unbounded(), 0.0);
    ASSERT_TRUE(got);

    std::vector<Eigen::MatrixXd> even, odd;
    for (int t = s + 1; t <= e; t += 2) even.push_back(seq[static_cast<std::size_t>(t - 1)]);
    for (int t = s + 2; t <= e; t += 2) odd.push_back(seq[static_cast<std::size_t>(t - 1)]);
    const int ne = static_cast<int>(even.size()), no = static_cast<int>(odd.size());
    const int jv = (v - s - 1) / 2;
    const Eigen::MatrixXd y = oracle::cusum(even, 0, jv + 1, ne);
    int best_t = -1;
    double best = 0;
    for (int t = s + 1; t <= e; ++t) {
      if (t - s - 2 < 0) continue;
      const int j = (t - s - 2) / 2;
      if (j + 1 >= no) continue;
      const double ip = (oracle::cusum(odd, 0, j + 1, no).cwiseProduct(y)).sum();
      if (best_t < 0 || ip > best) {
        best = ip;
        best_t = t;
      }
    }
    EXPECT_EQ(got->eta_star, best_t);
    double got_best = -1e300;
    for (auto [t, val] : got->profile) got_best = std::max(got_best, val);
    EXPECT_NEAR(got_best, best, 1e-9);
  }
}
