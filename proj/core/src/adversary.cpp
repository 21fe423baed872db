#include "hmwm/adversary.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hmwm {

RegressorSet build_regressors(const AttackDataset& data, int lag) {
  const auto T = data.y_w.rows();
  const auto p = data.y_w.cols();
  const auto m = data.u.cols();
  if (data.u.rows() != T || static_cast<Eigen::Index>(data.labels.size()) != T)
    throw std::invalid_argument("build_regressors: row counts disagree");
  if (lag < 1 || lag >= T)
    throw std::invalid_argument("build_regressors: lag out of range");

  RegressorSet out;
  out.lag = lag;
  const auto rows = T - lag;
  out.phi = Matrix(rows, (p + m) * lag);
  out.targets = Matrix(rows, p);
  out.labels.resize(rows);
  for (Eigen::Index k = lag; k < T; ++k) {
    const auto r = k - lag;
    for (int j = 0; j < lag; ++j) {
      out.phi.block(r, j * p, 1, p) = data.y_w.row(k - 1 - j);
      out.phi.block(r, lag * p + j * m, 1, m) = data.u.row(k - 1 - j);
    }
    out.targets.row(r) = data.y_w.row(k);
    out.labels[r] = data.labels[k];
  }
  return out;
}

namespace {

void check_clustering_args(const RegressorSet& reg, int clusters, int restarts) {
  if (clusters < 1) throw std::invalid_argument("clustering: need at least one cluster");
  if (restarts < 1) throw std::invalid_argument("clustering: need at least one restart");
  if (reg.phi.rows() < clusters)
    throw std::invalid_argument("clustering: fewer samples than clusters");
}

}  // namespace

ClusteringResult kmeans_attack(const RegressorSet& reg, int clusters,
                               int restarts, RandomSource& rng) {
  check_clustering_args(reg, clusters, restarts);
  const auto n = reg.phi.rows();
  Matrix X(n, reg.phi.cols() + reg.targets.cols());
  X << reg.phi, reg.targets;

  ClusteringResult best;
  best.objective = std::numeric_limits<double>::infinity();

  for (int rs = 0; rs < restarts; ++rs) {
    // k-means++ seeding: spread the initial centers by squared distance
    Matrix centers(clusters, X.cols());
    centers.row(0) = X.row(static_cast<Eigen::Index>(rng.next_uniform() * n));
    Vector d2 = (X.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < clusters; ++c) {
      const double total = d2.sum();
      Eigen::Index pick = 0;
      if (total > 0.0) {
        double r = rng.next_uniform() * total;
        for (; pick + 1 < n; ++pick) {
          r -= d2(pick);
          if (r <= 0.0) break;
        }
      } else {
        pick = static_cast<Eigen::Index>(rng.next_uniform() * n);
      }
      centers.row(c) = X.row(pick);
      d2 = d2.cwiseMin((X.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> assign(n, 0);
    bool degenerate = false;
    int iter = 0;
    for (; iter < 300; ++iter) {
      bool changed = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        int arg = 0;
        double bestd = std::numeric_limits<double>::infinity();
        for (int c = 0; c < clusters; ++c) {
          const double d = (X.row(i) - centers.row(c)).squaredNorm();
          if (d < bestd) {
            bestd = d;
            arg = c + 1;
          }
        }
        if (assign[i] != arg) {
          assign[i] = arg;
          changed = true;
        }
      }
      if (!changed && iter > 0) break;

      Matrix sums = Matrix::Zero(clusters, X.cols());
      std::vector<Eigen::Index> counts(clusters, 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(assign[i] - 1) += X.row(i);
        ++counts[assign[i] - 1];
      }
      for (int c = 0; c < clusters; ++c) {
        if (counts[c] == 0) {
          // park the empty center on the sample its current center explains
          // worst, the standard k-means repair
          degenerate = true;
          Eigen::Index far = 0;
          double fd = -1.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (X.row(i) - centers.row(assign[i] - 1)).squaredNorm();
            if (d > fd) {
              fd = d;
              far = i;
            }
          }
          centers.row(c) = X.row(far);
        } else {
          centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
        }
      }
    }

    double obj = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      obj += (X.row(i) - centers.row(assign[i] - 1)).squaredNorm();
    if (obj < best.objective) {
      best.objective = obj;
      best.assignments = assign;
      best.iterations = iter;
      best.degenerate = degenerate;
    }
  }
  return best;
}

ClusteringResult klinreg_attack(const RegressorSet& reg, int clusters,
                                int restarts, RandomSource& rng) {
  check_clustering_args(reg, clusters, restarts);
  const auto n = reg.phi.rows();
  const auto d = reg.phi.cols();
  const auto p = reg.targets.cols();

  // affine design matrix [phi 1]
  Matrix X(n, d + 1);
  X.leftCols(d) = reg.phi;
  X.col(d).setOnes();

  ClusteringResult best;
  best.objective = std::numeric_limits<double>::infinity();

  for (int rs = 0; rs < restarts; ++rs) {
    std::vector<int> assign(n);
    for (Eigen::Index i = 0; i < n; ++i)
      assign[i] = 1 + static_cast<int>(rng.next_uniform() * clusters);

    std::vector<Matrix> W(clusters, Matrix::Zero(d + 1, p));
    bool degenerate = false;
    int iter = 0;
    double obj = 0.0;
    for (; iter < 100; ++iter) {
      // refit: ridge keeps the normal equations solvable for thin clusters
      for (int c = 0; c < clusters; ++c) {
        Matrix G = 1e-8 * Matrix::Identity(d + 1, d + 1);
        Matrix b = Matrix::Zero(d + 1, p);
        Eigen::Index count = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (assign[i] != c + 1) continue;
          G.noalias() += X.row(i).transpose() * X.row(i);
          b.noalias() += X.row(i).transpose() * reg.targets.row(i);
          ++count;
        }
        if (count == 0) {
          degenerate = true;
          // reseed on the worst-explained sample under the current models
          Eigen::Index worst = 0;
          double wd = -1.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            const double r =
                (reg.targets.row(i) - X.row(i) * W[assign[i] - 1]).squaredNorm();
            if (r > wd) {
              wd = r;
              worst = i;
            }
          }
          assign[worst] = c + 1;
          G.noalias() += X.row(worst).transpose() * X.row(worst);
          b.noalias() += X.row(worst).transpose() * reg.targets.row(worst);
        }
        W[c] = G.ldlt().solve(b);
      }

      // reassign each sample to the model that explains it best
      bool changed = false;
      obj = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        int arg = 0;
        double bestr = std::numeric_limits<double>::infinity();
        for (int c = 0; c < clusters; ++c) {
          const double r = (reg.targets.row(i) - X.row(i) * W[c]).squaredNorm();
          if (r < bestr) {
            bestr = r;
            arg = c + 1;
          }
        }
        obj += bestr;
        if (assign[i] != arg) {
          assign[i] = arg;
          changed = true;
        }
      }
      if (!changed) break;
    }

    if (obj < best.objective) {
      best.objective = obj;
      best.assignments = assign;
      best.iterations = iter;
      best.degenerate = degenerate;
    }
  }
  return best;
}

PairScores score_clustering(const std::vector<int>& truth,
                            const std::vector<int>& estimate) {
  const auto n = truth.size();
  if (estimate.size() != n)
    throw std::invalid_argument("score_clustering: length mismatch");
  if (n < 2) throw std::invalid_argument("score_clustering: need at least two samples");

  // contingency-table pair counting; all totals fit comfortably in 64 bits
  // for any horizon this laboratory produces
  int tmax = 0, emax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (truth[i] < 1 || estimate[i] < 1)
      throw std::invalid_argument("score_clustering: labels must be positive");
    tmax = std::max(tmax, truth[i]);
    emax = std::max(emax, estimate[i]);
  }
  Eigen::MatrixX<long long> table = Eigen::MatrixX<long long>::Zero(tmax, emax);
  for (std::size_t i = 0; i < n; ++i) ++table(truth[i] - 1, estimate[i] - 1);

  const auto choose2 = [](long long v) { return v * (v - 1) / 2; };
  long long a = 0;
  for (int i = 0; i < tmax; ++i)
    for (int j = 0; j < emax; ++j) a += choose2(table(i, j));
  long long same_truth = 0, same_est = 0;
  for (int i = 0; i < tmax; ++i) same_truth += choose2(table.row(i).sum());
  for (int j = 0; j < emax; ++j) same_est += choose2(table.col(j).sum());

  const long long total = choose2(static_cast<long long>(n));
  const long long c = same_truth - a;  // grouped by truth only
  const long long d = same_est - a;    // grouped by estimate only
  const long long b = total - a - c - d;

  PairScores s;
  s.rand = static_cast<double>(a + b) / static_cast<double>(total);
  s.jaccard = (a + c + d) == 0
                  ? 1.0
                  : static_cast<double>(a) / static_cast<double>(a + c + d);
  const double denom =
      std::sqrt(static_cast<double>(a + c) * static_cast<double>(a + d));
  s.fowlkes_mallows = denom == 0.0 ? 0.0 : static_cast<double>(a) / denom;
  return s;
}

SampleBound sample_complexity(const BigInt& n_theta, const BigInt& models) {
  if (n_theta < 1 || models < 1)
    throw std::invalid_argument("sample_complexity: arguments must be positive");
  const BigInt numerator = (n_theta - 1) * models * models + (n_theta + 1) * models;
  SampleBound out;
  out.value = numerator / 2;
  // numerator is even for every (n_theta, models) pair: the two terms share
  // the parity of models * (n_theta + 1)
  if (numerator % 2 != 0) {
    out.value += 1;
    out.rounded_up = true;
  }
  return out;
}

IoComplexity io_complexity(int modes, int lag, int outputs, int inputs) {
  if (modes < 1 || lag < 1 || outputs < 1 || inputs < 0)
    throw std::invalid_argument("io_complexity: arguments out of range");
  IoComplexity out;
  out.models = boost::multiprecision::pow(BigInt(modes), static_cast<unsigned>(lag));
  out.regressor_dim = (outputs + inputs) * lag;
  out.samples = sample_complexity(out.regressor_dim, out.models).value;
  return out;
}

}  // namespace hmwm
