#include "hmwm/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hmwm {

namespace {

void require_square(const Matrix& A, const char* what) {
  if (A.rows() != A.cols()) throw std::invalid_argument(std::string(what) + ": matrix must be square");
  if (!A.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

Matrix symmetrize(const Matrix& M) { return 0.5 * (M + M.transpose()); }

}  // namespace

double spectral_radius(const Matrix& A) {
  require_square(A, "spectral_radius");
  if (A.rows() == 0) return 0.0;
  return A.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_schur(const Matrix& A, double margin) {
  if (!(margin > 0.0) || margin > 1.0) throw std::invalid_argument("is_schur: margin must be in (0,1]");
  return spectral_radius(A) <= 1.0 - margin;
}

Matrix solve_discrete_lyapunov(const Matrix& A, const Matrix& Q) {
  require_square(A, "solve_discrete_lyapunov");
  require_square(Q, "solve_discrete_lyapunov");
  if (A.rows() != Q.rows()) throw std::invalid_argument("solve_discrete_lyapunov: dimension mismatch");
  if (spectral_radius(A) >= 1.0) throw std::invalid_argument("solve_discrete_lyapunov: A is not Schur stable");
  Matrix P = symmetrize(Q);
  Matrix Aj = A;
  for (int it = 0; it < 200; ++it) {
    const Matrix Pn = P + Aj * P * Aj.transpose();
    if ((Pn - P).norm() <= 1e-13 * (1.0 + Pn.norm())) return symmetrize(Pn);
    P = Pn;
    Aj = Aj * Aj;
  }
  throw std::runtime_error("solve_discrete_lyapunov: no convergence");
}

KalmanSteadyState kalman_steady_state(const Matrix& A, const Matrix& C,
                                      const Matrix& process_cov,
                                      const Matrix& measurement_cov) {
  require_square(A, "kalman_steady_state");
  const auto n = A.rows();
  const auto p = C.rows();
  if (C.cols() != n || process_cov.rows() != n || measurement_cov.rows() != p)
    throw std::invalid_argument("kalman_steady_state: dimension mismatch");
  if (observability_rank(A, C) < n)
    throw std::invalid_argument("kalman_steady_state: (C, A) is not observable");
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(measurement_cov));
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("kalman_steady_state: measurement covariance must be positive definite");
  }

  Matrix P = symmetrize(process_cov);
  bool converged = false;
  for (std::int64_t it = 0; it < 1000000; ++it) {
    const Matrix S = C * P * C.transpose() + measurement_cov;
    const Matrix K = P * C.transpose() * S.ldlt().solve(Matrix::Identity(p, p));
    const Matrix Pn = symmetrize(A * (P - K * C * P) * A.transpose() + process_cov);
    const double step = (Pn - P).norm();
    P = Pn;
    if (step <= 1e-10 * (1.0 + P.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged) throw std::runtime_error("kalman_steady_state: Riccati recursion did not converge");

  const Matrix S = C * P * C.transpose() + measurement_cov;
  KalmanSteadyState out;
  out.gain = P * C.transpose() * S.ldlt().solve(Matrix::Identity(p, p));
  const Matrix Ae = A - out.gain * C;
  if (spectral_radius(Ae) >= 1.0)
    throw std::runtime_error("kalman_steady_state: A - L C is not Schur stable");
  // covariance the observer actually attains with this gain
  out.error_cov = solve_discrete_lyapunov(
      Ae, process_cov + out.gain * measurement_cov * out.gain.transpose());
  out.innovation_cov = C * out.error_cov * C.transpose() + measurement_cov;
  return out;
}

double regularized_gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("regularized_gamma_p: domain");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) {
    // series: P(a,x) = x^a e^-x / Gamma(a) * sum x^k / (a)_k
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
      term *= x / (a + k);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // Lentz continued fraction for Q(a,x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  return 1.0 - q;
}

double chi_square_cdf(int dof, double x) {
  if (dof < 1) throw std::invalid_argument("chi_square_cdf: dof must be positive");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(int dof, double prob) {
  if (dof < 1) throw std::invalid_argument("chi_square_quantile: dof must be positive");
  if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("chi_square_quantile: prob must be in (0,1)");

  const double a = 0.5 * dof;
  // Wilson-Hilferty start
  const double z = normal_quantile(prob);
  const double t = 1.0 - 2.0 / (9.0 * dof) + z * std::sqrt(2.0 / (9.0 * dof));
  double x = dof * t * t * t;
  if (!(x > 0.0)) x = 0.5;

  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double f = chi_square_cdf(dof, x) - prob;
    if (std::abs(f) <= 1e-12) break;
    if (f > 0.0) hi = x; else lo = x;
    const double logpdf = (a - 1.0) * std::log(x) - 0.5 * x - a * std::numbers::ln2 - std::lgamma(a);
    double xn = x - f / std::exp(logpdf);
    if (!(xn > lo) || !(xn < hi))
      xn = std::isinf(hi) ? 2.0 * x : 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 1e-14 * (1.0 + x)) { x = xn; break; }
    x = xn;
  }
  return x;
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("normal_quantile: prob must be in (0,1)");
  // bisection + Newton on Phi(x) = 0.5 erfc(-x/sqrt(2))
  double lo = -42.0, hi = 42.0, x = 0.0;
  for (int it = 0; it < 300; ++it) {
    const double f = 0.5 * std::erfc(-x / std::numbers::sqrt2) - prob;
    if (f > 0.0) hi = x; else lo = x;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    double xn = x - f / pdf;
    if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 1e-15 * (1.0 + std::abs(x))) return xn;
    x = xn;
  }
  return x;
}

int controllability_rank(const Matrix& A, const Matrix& B) {
  require_square(A, "controllability_rank");
  const auto n = A.rows();
  if (B.rows() != n) throw std::invalid_argument("controllability_rank: dimension mismatch");
  Matrix M(n, n * B.cols());
  Matrix X = B;
  for (Eigen::Index k = 0; k < n; ++k) {
    M.middleCols(k * B.cols(), B.cols()) = X;
    X = A * X;
  }
  Eigen::JacobiSVD<Matrix> svd(M);
  const double tol = 1e-8 * svd.singularValues().maxCoeff();
  return static_cast<int>((svd.singularValues().array() > tol).count());
}

int observability_rank(const Matrix& A, const Matrix& C) {
  return controllability_rank(A.transpose(), C.transpose());
}

double condition_number(const Matrix& A) {
  Eigen::JacobiSVD<Matrix> svd(A);
  const auto& s = svd.singularValues();
  if (s.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
  return s.maxCoeff() / s.minCoeff();
}

double min_symmetric_eigenvalue(const Matrix& A) {
  require_square(A, "min_symmetric_eigenvalue");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (A + A.transpose()));
  return es.eigenvalues().minCoeff();
}

}  // namespace hmwm
