#include "hmwm/partition.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hmwm {

int classify(const Partition& partition, const Vector& x) {
  if (partition.cells.empty()) throw std::invalid_argument("classify: empty partition");
  if (x.size() != partition.dim) throw std::invalid_argument("classify: dimension mismatch");
  for (int i = 0; i < partition.size(); ++i)
    if (partition.cells[i].contains(x)) return i + 1;
  // closed cells cover the space; reaching here means rounding pushed a
  // boundary point epsilon outside both neighbours
  int best = 0;
  double best_violation = std::numeric_limits<double>::infinity();
  for (int i = 0; i < partition.size(); ++i) {
    const auto& c = partition.cells[i];
    const double v = (c.H * x - c.h).maxCoeff();
    if (v < best_violation) {
      best_violation = v;
      best = i;
    }
  }
  return best + 1;
}

namespace {

Matrix inverse_sqrt(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (cov + cov.transpose()));
  const Vector lam = es.eigenvalues();
  if (lam.minCoeff() <= 1e-12 * std::max(1.0, lam.maxCoeff()))
    throw std::invalid_argument("build_partition: covariance is singular");
  return es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

Partition slabs_1d(const Vector& mean, const Matrix& cov, int cells) {
  Partition part;
  part.dim = 1;
  part.mean = mean;
  part.whitener = inverse_sqrt(cov);
  const double sigma = std::sqrt(cov(0, 0));
  std::vector<double> bounds(cells - 1);
  for (int j = 1; j < cells; ++j)
    bounds[j - 1] = mean[0] + sigma * normal_quantile(static_cast<double>(j) / cells);
  for (int j = 0; j < cells; ++j) {
    PolyhedralCell cell;
    const bool has_lo = j > 0, has_hi = j + 1 < cells;
    cell.H = Matrix(has_lo + has_hi, 1);
    cell.h = Vector(has_lo + has_hi);
    int row = 0;
    if (has_lo) {
      cell.H(row, 0) = -1.0;
      cell.h(row++) = -bounds[j - 1];
    }
    if (has_hi) {
      cell.H(row, 0) = 1.0;
      cell.h(row) = bounds[j];
    }
    part.cells.push_back(std::move(cell));
  }
  return part;
}

Partition sectors_2d(const Vector& mean, const Matrix& cov, int cells) {
  Partition part;
  part.dim = 2;
  part.mean = mean;
  part.whitener = inverse_sqrt(cov);
  // a standard normal is isotropic after whitening, so equal central angles
  // are equal probabilities regardless of the original covariance
  for (int j = 0; j < cells; ++j) {
    const double a = -std::numbers::pi + 2.0 * std::numbers::pi * j / cells;
    const double b = a + 2.0 * std::numbers::pi / cells;
    Matrix Hz;
    if (cells == 1) {
      Hz = Matrix(0, 2);
    } else {
      // sector {z : angle(z) in [a, b]} as two half-planes through the
      // origin; valid because the central angle never exceeds pi
      Hz = Matrix(2, 2);
      Hz << std::sin(a), -std::cos(a), -std::sin(b), std::cos(b);
    }
    PolyhedralCell cell;
    cell.H = Hz * part.whitener;
    cell.h = cell.H * mean;  // sector apex sits at the anchor point
    part.cells.push_back(std::move(cell));
  }
  return part;
}

}  // namespace

Partition build_partition(const Vector& mean, const Matrix& cov, int cells) {
  const auto dim = mean.size();
  if (cov.rows() != dim || cov.cols() != dim)
    throw std::invalid_argument("build_partition: mean/covariance mismatch");
  if (cells < 1) throw std::invalid_argument("build_partition: need at least one cell");
  if (dim == 1) {
    if (cells == 1) {
      Partition part;
      part.dim = 1;
      part.mean = mean;
      part.whitener = inverse_sqrt(cov);
      part.cells.push_back(PolyhedralCell{Matrix(0, 1), Vector(0)});
      return part;
    }
    return slabs_1d(mean, cov, cells);
  }
  if (dim == 2) return sectors_2d(mean, cov, cells);
  throw std::invalid_argument("build_partition: only 1- and 2-dimensional states are supported");
}

Partition build_partition(const SteadyStats& stats, int cells) {
  return build_partition(stats.mean_xu, stats.cov_xu, cells);
}

SteadyStats steady_stats(const PlantModel& plant, const ControllerConfig& cfg,
                         const Matrix& A_u, const Matrix& B_u) {
  const int n = plant.n(), p = plant.p();
  const auto n_u = A_u.rows();
  if (A_u.cols() != n_u || B_u.rows() != n_u || B_u.cols() != p)
    throw std::invalid_argument("steady_stats: unobservable block dimensions");
  if (spectral_radius(A_u) >= 1.0)
    throw std::invalid_argument("steady_stats: unobservable block must be Schur stable");
  const Matrix Acl = plant.A - plant.B * cfg.K;
  if (spectral_radius(Acl) >= 1.0)
    throw std::invalid_argument("steady_stats: closed loop is unstable");

  SteadyStats s;
  // error covariance attained by the observer in this loop
  if (plant.process_cov.isZero(0.0) && plant.measurement_cov.isZero(0.0)) {
    s.cov_e = Matrix::Zero(n, n);
  } else {
    const Matrix Ae = plant.A - cfg.L * plant.C;
    s.cov_e = solve_discrete_lyapunov(
        Ae, plant.process_cov + cfg.L * plant.measurement_cov * cfg.L.transpose());
  }

  // mean recursion: the estimation error is zero-mean, so the fixed point
  // solves (I - A + B K) mu = B K x_ref + B u_ref
  const Matrix I = Matrix::Identity(n, n);
  s.mean_xp = (I - Acl).lu().solve(plant.B * cfg.K * cfg.x_ref + plant.B * cfg.u_ref);
  s.mean_yp = plant.C * s.mean_xp;

  const Matrix BK = plant.B * cfg.K;
  s.cov_xp = solve_discrete_lyapunov(
      Acl, BK * s.cov_e * BK.transpose() + plant.process_cov);
  s.cov_yp = plant.C * s.cov_xp * plant.C.transpose() + plant.measurement_cov;

  s.mean_xu = (Matrix::Identity(n_u, n_u) - A_u).lu().solve(B_u * s.mean_yp);
  s.cov_xu = solve_discrete_lyapunov(A_u, B_u * s.cov_yp * B_u.transpose());

  // fixed points are recursions; plug back and insist on closure
  const double mean_resid =
      (s.mean_xp - (Acl * s.mean_xp + BK * cfg.x_ref + plant.B * cfg.u_ref)).norm();
  const double cov_resid =
      (Acl * s.cov_xp * Acl.transpose() + BK * s.cov_e * BK.transpose() +
       plant.process_cov - s.cov_xp)
          .norm();
  const double xu_resid =
      (A_u * s.cov_xu * A_u.transpose() + B_u * s.cov_yp * B_u.transpose() - s.cov_xu)
          .norm();
  const double scale = 1.0 + s.cov_xp.norm() + s.mean_xp.norm() + s.cov_xu.norm();
  if (mean_resid + cov_resid + xu_resid > 1e-10 * scale)
    throw std::runtime_error("steady_stats: fixed point residual too large");
  return s;
}

}  // namespace hmwm
