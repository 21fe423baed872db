#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hmwm/random.hpp"

namespace hmwm {

using BigInt = boost::multiprecision::cpp_int;

// What an eavesdropper on the network links actually sees: the transmitted
// (watermarked) outputs, the inputs, and, for scoring only, the mode that was
// active when each row was produced.
struct AttackDataset {
  Matrix y_w;               // one transmitted output per row
  Matrix u;                 // one input per row, same step indexing
  std::vector<int> labels;  // active mode per row, 1-based
};

// Lagged input-output regressors phi[k] = [y[k-1..k-lag]; u[k-1..k-lag]],
// most recent first, paired with the output they predict and the mode that
// generated it.
struct RegressorSet {
  int lag = 0;
  Matrix phi;
  Matrix targets;
  std::vector<int> labels;
};

RegressorSet build_regressors(const AttackDataset& data, int lag);

struct ClusteringResult {
  std::vector<int> assignments;  // 1-based cluster ids, one per regressor
  double objective = 0.0;        // inertia or summed squared residuals
  int iterations = 0;            // of the best restart
  bool degenerate = false;       // an empty cluster had to be reseeded
};

// Lloyd iterations over the joint vector [phi; y], k-means++ seeding, best
// objective across restarts.
ClusteringResult kmeans_attack(const RegressorSet& reg, int clusters,
                               int restarts, RandomSource& rng);

// Alternating piecewise-affine regression: fit one ridge-regularized affine
// model per cluster, reassign every sample to its best-explaining model,
// repeat until the assignment is stable. Random initial labels; empty
// clusters are reseeded with the worst-fit sample.
ClusteringResult klinreg_attack(const RegressorSet& reg, int clusters,
                                int restarts, RandomSource& rng);

// Pair-counting agreement between an estimated clustering and the truth.
// jaccard is 1 when no pair is grouped by either side, fowlkes_mallows is 0
// when its denominator vanishes.
struct PairScores {
  double rand = 0.0;
  double jaccard = 0.0;
  double fowlkes_mallows = 0.0;
};

PairScores score_clustering(const std::vector<int>& truth,
                            const std::vector<int>& estimate);

// Worst-case sample count for identifying one model out of `models`
// hypotheses with n_theta unknowns each. The closed form is provably an
// integer; rounded_up records the (unreachable) odd-remainder branch.
struct SampleBound {
  BigInt value;
  bool rounded_up = false;
};

SampleBound sample_complexity(const BigInt& n_theta, const BigInt& models);

// Size of the identification problem an eavesdropper faces after `lag` steps
// of watermark switching: hypothesis count grows as modes^lag while the
// per-model unknowns grow only linearly.
struct IoComplexity {
  BigInt models;
  int regressor_dim = 0;
  BigInt samples;
};

IoComplexity io_complexity(int modes, int lag, int outputs, int inputs);

}  // namespace hmwm
