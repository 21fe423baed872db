#pragma once

#include "hmwm/random.hpp"

namespace hmwm {

// Largest eigenvalue modulus. Throws on non-square or non-finite input.
double spectral_radius(const Matrix& A);

// true iff spectral_radius(A) <= 1 - margin, margin in (0, 1].
bool is_schur(const Matrix& A, double margin = 1e-9);

// Unique P solving A P A^T - P + Q = 0 for Schur-stable A and symmetric Q.
// Doubling iteration: P_{j+1} = P_j + A_j P_j A_j^T, A_{j+1} = A_j^2, which
// accumulates sum_k A^k Q (A^T)^k with quadratic convergence.
Matrix solve_discrete_lyapunov(const Matrix& A, const Matrix& Q);

struct KalmanSteadyState {
  Matrix gain;            // L, the converged filter gain P C^T (C P C^T + R)^-1
  Matrix innovation_cov;  // covariance of y - C x_hat in steady state under L
  Matrix error_cov;       // steady-state covariance of x - x_hat under L
};

// Iterates the Riccati recursion for the one-step error covariance until the
// step norm falls below 1e-10 (cap 1e6 iterations), then reports the actual
// steady-state error/innovation covariances of the observer run with the
// converged gain (a Lyapunov solve with A - L C), so the chi-square detector
// fed by innovation_cov is calibrated.
KalmanSteadyState kalman_steady_state(const Matrix& A, const Matrix& C,
                                      const Matrix& process_cov,
                                      const Matrix& measurement_cov);

// Regularized lower incomplete gamma P(a, x); series/continued-fraction split.
double regularized_gamma_p(double a, double x);

double chi_square_cdf(int dof, double x);

// Inverse CDF, |CDF(result) - prob| <= 1e-10. Wilson-Hilferty start, Newton
// with bisection guard.
double chi_square_quantile(int dof, double prob);

// Standard normal inverse CDF to ~1e-12.
double normal_quantile(double prob);

// Rank of [B, AB, ..., A^{n-1}B] with SVD tolerance 1e-8 * sigma_max.
int controllability_rank(const Matrix& A, const Matrix& B);
// Rank of [C; CA; ...; CA^{n-1}], same tolerance.
int observability_rank(const Matrix& A, const Matrix& C);

double condition_number(const Matrix& A);

// min eigenvalue of the symmetric part; callers test definiteness with it.
double min_symmetric_eigenvalue(const Matrix& A);

}  // namespace hmwm
