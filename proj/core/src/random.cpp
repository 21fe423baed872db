#include "hmwm/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hmwm {

double RandomSource::next_gaussian() {
  const double u1 = next_uniform_open();
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

Matrix gaussian_factor(const Matrix& cov) {
  if (cov.rows() != cov.cols()) throw std::invalid_argument("covariance must be square");
  const double scale = cov.cwiseAbs().maxCoeff();
  if (!cov.allFinite()) throw std::invalid_argument("covariance has non-finite entries");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale))
    throw std::invalid_argument("covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  Vector lam = es.eigenvalues();
  const double floor = -1e-12 * (1.0 + std::abs(lam.maxCoeff()));
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < floor) throw std::invalid_argument("covariance is not positive semidefinite");
    lam[i] = lam[i] > 0.0 ? std::sqrt(lam[i]) : 0.0;
  }
  return es.eigenvectors() * lam.asDiagonal();
}

Vector sample_gaussian_prefactored(const Vector& mean, const Matrix& factor,
                                   RandomSource& rng) {
  Vector z(factor.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.next_gaussian();
  return mean + factor * z;
}

Vector sample_gaussian(const GaussianSpec& spec, RandomSource& rng) {
  if (spec.mean.size() != spec.cov.rows())
    throw std::invalid_argument("mean/covariance dimension mismatch");
  return sample_gaussian_prefactored(spec.mean, gaussian_factor(spec.cov), rng);
}

Matrix random_orthonormal(int n, RandomSource& rng) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.next_gaussian();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace hmwm
