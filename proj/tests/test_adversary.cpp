#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <string>
#include <vector>

#include "hmwm/adversary.hpp"
#include "oracles.hpp"

using namespace hmwm;

TEST_CASE("regressors stack the most recent samples first") {
  AttackDataset data;
  data.y_w = Matrix(5, 2);
  data.y_w << 10, 11, 20, 21, 30, 31, 40, 41, 50, 51;
  data.u = Matrix(5, 1);
  data.u << 100, 200, 300, 400, 500;
  data.labels = {1, 2, 1, 2, 1};

  const auto reg = build_regressors(data, 2);
  REQUIRE(reg.phi.rows() == 3);
  REQUIRE(reg.phi.cols() == (2 + 1) * 2);

  // first regressor predicts step 2 from steps 1 and 0
  Vector row0(6);
  row0 << 20, 21, 10, 11, 200, 100;
  CHECK((reg.phi.row(0).transpose() - row0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(reg.targets(0, 0) == 30);
  CHECK(reg.labels[0] == 1);

  Vector row2(6);
  row2 << 40, 41, 30, 31, 400, 300;
  CHECK((reg.phi.row(2).transpose() - row2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(reg.targets(2, 1) == 51);
  CHECK(reg.labels[2] == 1);

  CHECK_THROWS(build_regressors(data, 0));
  CHECK_THROWS(build_regressors(data, 5));
  data.labels.pop_back();
  CHECK_THROWS(build_regressors(data, 2));
}

namespace {

// three tight blobs far apart: any sane clustering recovers them exactly
RegressorSet blob_set(RandomSource& rng, int per_cluster) {
  RegressorSet reg;
  reg.lag = 1;
  const int n = 3 * per_cluster;
  reg.phi = Matrix(n, 2);
  reg.targets = Matrix(n, 1);
  reg.labels.resize(n);
  const double cx[3] = {0.0, 20.0, -15.0};
  const double cy[3] = {0.0, 5.0, 12.0};
  for (int i = 0; i < n; ++i) {
    const int c = i % 3;
    reg.phi(i, 0) = cx[c] + 0.1 * rng.next_gaussian();
    reg.phi(i, 1) = cy[c] + 0.1 * rng.next_gaussian();
    reg.targets(i, 0) = cx[c] - cy[c] + 0.1 * rng.next_gaussian();
    reg.labels[i] = c + 1;
  }
  return reg;
}

}  // namespace

TEST_CASE("kmeans recovers well-separated clusters exactly") {
  RandomSource rng(17);
  const auto reg = blob_set(rng, 40);
  const auto res = kmeans_attack(reg, 3, 10, rng);
  const auto s = score_clustering(reg.labels, res.assignments);
  CHECK(s.jaccard == doctest::Approx(1.0));
  CHECK(s.rand == doctest::Approx(1.0));
  CHECK_FALSE(res.degenerate);
  CHECK(res.objective < 10.0);

  CHECK_THROWS(kmeans_attack(reg, 0, 10, rng));
  CHECK_THROWS(kmeans_attack(reg, 3, 0, rng));
}

TEST_CASE("klinreg identifies planted affine submodels") {
  // two regimes with identical input statistics but different response maps;
  // distance-based clustering cannot split them, model-based clustering can
  RandomSource rng(23);
  const int n = 300;
  RegressorSet reg;
  reg.lag = 1;
  reg.phi = Matrix(n, 2);
  reg.targets = Matrix(n, 1);
  reg.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    reg.phi(i, 0) = rng.next_gaussian();
    reg.phi(i, 1) = rng.next_gaussian();
    const int c = i % 2;
    const double clean = c == 0 ? 2.0 * reg.phi(i, 0) - reg.phi(i, 1) + 0.5
                                : -1.5 * reg.phi(i, 0) + 0.5 * reg.phi(i, 1) - 1.0;
    reg.targets(i, 0) = clean + 1e-3 * rng.next_gaussian();
    reg.labels[i] = c + 1;
  }

  const auto res = klinreg_attack(reg, 2, 10, rng);
  const auto s = score_clustering(reg.labels, res.assignments);
  CHECK(s.jaccard > 0.95);
  CHECK(res.objective < 1.0);
}

TEST_CASE("clustering attacks are reproducible from the seed") {
  RandomSource ra(5), rb(5);
  const auto rega = blob_set(ra, 20);
  const auto regb = blob_set(rb, 20);
  const auto ka = kmeans_attack(rega, 3, 5, ra);
  const auto kb = kmeans_attack(regb, 3, 5, rb);
  CHECK(ka.assignments == kb.assignments);
  CHECK(ka.objective == kb.objective);
  const auto la = klinreg_attack(rega, 3, 5, ra);
  const auto lb = klinreg_attack(regb, 3, 5, rb);
  CHECK(la.assignments == lb.assignments);
  CHECK(la.objective == lb.objective);
}

TEST_CASE("pair scores match exhaustive enumeration") {
  RandomSource rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 10 + static_cast<int>(rng.next_uniform() * 60);
    const int kt = 2 + static_cast<int>(rng.next_uniform() * 4);
    const int ke = 2 + static_cast<int>(rng.next_uniform() * 4);
    std::vector<int> truth(n), est(n);
    for (int i = 0; i < n; ++i) {
      truth[i] = 1 + static_cast<int>(rng.next_uniform() * kt);
      est[i] = 1 + static_cast<int>(rng.next_uniform() * ke);
    }
    const auto got = score_clustering(truth, est);
    const auto want = oracle::pair_scores_enumerated(truth, est);
    CHECK(got.rand == doctest::Approx(want.rand).epsilon(1e-12));
    CHECK(got.jaccard == doctest::Approx(want.jaccard).epsilon(1e-12));
    CHECK(got.fowlkes_mallows ==
          doctest::Approx(want.fowlkes_mallows).epsilon(1e-12));
  }
}

TEST_CASE("pair score conventions at the degenerate extremes") {
  // identical clusterings: all three scores are exactly one
  const std::vector<int> same = {1, 2, 1, 2, 3};
  auto s = score_clustering(same, same);
  CHECK(s.rand == 1.0);
  CHECK(s.jaccard == 1.0);
  CHECK(s.fowlkes_mallows == 1.0);

  // truth all distinct, estimate all merged: no agreeing grouped pair exists
  const std::vector<int> distinct = {1, 2, 3, 4};
  const std::vector<int> merged = {1, 1, 1, 1};
  s = score_clustering(distinct, merged);
  CHECK(s.rand == 0.0);
  CHECK(s.jaccard == 0.0);
  CHECK(s.fowlkes_mallows == 0.0);

  // both sides group nothing: vacuous agreement
  s = score_clustering(distinct, {5, 6, 7, 8});
  CHECK(s.rand == 1.0);
  CHECK(s.jaccard == 1.0);
  CHECK(s.fowlkes_mallows == 0.0);

  CHECK_THROWS(score_clustering({1, 2}, {1}));
  CHECK_THROWS(score_clustering({1}, {1}));
  CHECK_THROWS(score_clustering({0, 1}, {1, 1}));
}

TEST_CASE("sample bound closed form against small-case arithmetic") {
  // n = ((t-1) N^2 + (t+1) N) / 2, spot-checked by hand
  CHECK(sample_complexity(1, 1).value == 1);
  CHECK(sample_complexity(2, 3).value == (9 + 9) / 2);
  CHECK(sample_complexity(3, 2).value == (8 + 8) / 2);
  CHECK(sample_complexity(4, 6).value == 69);
  CHECK_FALSE(sample_complexity(4, 6).rounded_up);
  CHECK_THROWS(sample_complexity(0, 5));
  CHECK_THROWS(sample_complexity(5, 0));

  // parity argument: the numerator is even for every pair; sweep a grid
  for (int t = 1; t <= 12; ++t)
    for (int N = 1; N <= 12; ++N) CHECK_FALSE(sample_complexity(t, N).rounded_up);
}

TEST_CASE("identification burden at laboratory scale") {
  // six modes, two outputs, two inputs; hypothesis count is modes^lag
  const auto c1 = io_complexity(6, 1, 2, 2);
  CHECK(c1.models == 6);
  CHECK(c1.regressor_dim == 4);
  CHECK(c1.samples == 69);

  const auto c5 = io_complexity(6, 5, 2, 2);
  CHECK(c5.models == 7776);
  CHECK(c5.regressor_dim == 20);
  CHECK(c5.samples == 574510320);

  const auto c10 = io_complexity(6, 10, 2, 2);
  CHECK(c10.models == 60466176);
  CHECK(c10.regressor_dim == 40);
  CHECK(c10.samples == BigInt("71295090820784640"));

  // far past 64-bit range: exact value and its 5-significant-digit rounding
  const auto c15 = io_complexity(6, 15, 2, 2);
  CHECK(c15.models == BigInt("470184984576"));
  CHECK(c15.regressor_dim == 60);
  CHECK(c15.samples == BigInt("6521680631775974700072960"));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", c15.samples.convert_to<double>());
  CHECK(std::string(buf) == "6.5217e+24");

  CHECK_THROWS(io_complexity(0, 1, 2, 2));
  CHECK_THROWS(io_complexity(6, 0, 2, 2));
}
