#pragma once

#include <optional>

#include "hmwm/numerics.hpp"

namespace hmwm {

// Discrete-time LTI plant x+ = A x + B u + w, y = C x + v with Gaussian
// process/measurement noise. Noise factors are cached at construction so the
// per-step cost stays flat.
struct PlantModel {
  Matrix A, B, C;
  Matrix process_cov, measurement_cov;
  Matrix process_factor, measurement_factor;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }
};

// Validates dimensions, PSD covariances, controllability and observability.
PlantModel make_plant(Matrix A, Matrix B, Matrix C, Matrix process_cov,
                      Matrix measurement_cov);

// Output-feedback controller: steady-state observer, reference-tracking state
// feedback u = -K (x_hat - x_ref) + u_ref, and a chi-square residual test.
struct ControllerConfig {
  Matrix K;
  Matrix L;
  Vector x_ref, u_ref;
  double detector_alpha = 0.05;
  Matrix innovation_cov;       // zero when the loop is noise-free
  double detector_threshold = 0.0;
  bool detector_enabled = true;
};

// If `gain` is empty the observer gain comes from kalman_steady_state.
// Both A - B K and A - L C must be Schur stable.
ControllerConfig make_controller(const PlantModel& plant, Matrix K, Vector x_ref,
                                 Vector u_ref, double detector_alpha,
                                 std::optional<Matrix> gain = std::nullopt);

struct PlantStep {
  Vector x_next;
  Vector y;
};
// Draws process noise first, then measurement noise (two fixed rng positions
// per call, so traces are reproducible).
PlantStep plant_step(const PlantModel& plant, const Vector& x, const Vector& u,
                     RandomSource& rng);

struct ControllerStep {
  Vector x_hat_next;
  Vector u;
  Vector r;  // innovation y - C x_hat, before the observer update
};
ControllerStep controller_step(const PlantModel& plant, const ControllerConfig& cfg,
                               const Vector& x_hat, const Vector& y);

struct DetectorStep {
  double stat = 0.0;
  bool alarm = false;
};
// stat = r^T S^-1 r against the chi-square quantile at 1 - alpha with p
// degrees of freedom. Throws when S is singular.
DetectorStep detector_step(const ControllerConfig& cfg, const Matrix& innovation_cov,
                           const Vector& r);

}  // namespace hmwm
