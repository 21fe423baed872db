#include "hmwm/plant.hpp"

#include <stdexcept>

namespace hmwm {

PlantModel make_plant(Matrix A, Matrix B, Matrix C, Matrix process_cov,
                      Matrix measurement_cov) {
  const auto n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("plant: A must be square");
  if (B.rows() != n) throw std::invalid_argument("plant: B row count");
  if (C.cols() != n) throw std::invalid_argument("plant: C column count");
  if (process_cov.rows() != n || process_cov.cols() != n)
    throw std::invalid_argument("plant: process covariance shape");
  if (measurement_cov.rows() != C.rows() || measurement_cov.cols() != C.rows())
    throw std::invalid_argument("plant: measurement covariance shape");

  PlantModel plant;
  plant.process_factor = gaussian_factor(process_cov);          // validates PSD
  plant.measurement_factor = gaussian_factor(measurement_cov);  // validates PSD
  plant.A = std::move(A);
  plant.B = std::move(B);
  plant.C = std::move(C);
  plant.process_cov = std::move(process_cov);
  plant.measurement_cov = std::move(measurement_cov);

  if (controllability_rank(plant.A, plant.B) < n)
    throw std::invalid_argument("plant: (A, B) is not controllable");
  if (observability_rank(plant.A, plant.C) < n)
    throw std::invalid_argument("plant: (C, A) is not observable");
  return plant;
}

ControllerConfig make_controller(const PlantModel& plant, Matrix K, Vector x_ref,
                                 Vector u_ref, double detector_alpha,
                                 std::optional<Matrix> gain) {
  const int n = plant.n(), m = plant.m(), p = plant.p();
  if (K.rows() != m || K.cols() != n) throw std::invalid_argument("controller: K shape");
  if (x_ref.size() != n || u_ref.size() != m)
    throw std::invalid_argument("controller: reference dimensions");
  if (!(detector_alpha > 0.0 && detector_alpha < 1.0))
    throw std::invalid_argument("controller: alpha must be in (0,1)");

  ControllerConfig cfg;
  cfg.K = std::move(K);
  cfg.x_ref = std::move(x_ref);
  cfg.u_ref = std::move(u_ref);
  cfg.detector_alpha = detector_alpha;

  const bool noise_free = plant.process_cov.isZero(0.0) && plant.measurement_cov.isZero(0.0);
  if (gain) {
    cfg.L = std::move(*gain);
    if (cfg.L.rows() != n || cfg.L.cols() != p)
      throw std::invalid_argument("controller: L shape");
    if (noise_free) {
      cfg.innovation_cov = Matrix::Zero(p, p);
    } else {
      const Matrix Ae = plant.A - cfg.L * plant.C;
      if (spectral_radius(Ae) >= 1.0)
        throw std::invalid_argument("controller: A - L C is not Schur stable");
      const Matrix q = plant.process_cov +
                       cfg.L * plant.measurement_cov * cfg.L.transpose();
      const Matrix err = solve_discrete_lyapunov(Ae, q);
      cfg.innovation_cov = plant.C * err * plant.C.transpose() + plant.measurement_cov;
    }
  } else {
    if (noise_free)
      throw std::invalid_argument(
          "controller: noise-free plant needs an explicit observer gain");
    auto ks = kalman_steady_state(plant.A, plant.C, plant.process_cov,
                                  plant.measurement_cov);
    cfg.L = std::move(ks.gain);
    cfg.innovation_cov = std::move(ks.innovation_cov);
  }

  if (spectral_radius(plant.A - plant.B * cfg.K) >= 1.0)
    throw std::invalid_argument("controller: A - B K is not Schur stable");
  if (spectral_radius(plant.A - cfg.L * plant.C) >= 1.0)
    throw std::invalid_argument("controller: A - L C is not Schur stable");

  cfg.detector_enabled = !cfg.innovation_cov.isZero(0.0);
  if (cfg.detector_enabled)
    cfg.detector_threshold = chi_square_quantile(p, 1.0 - detector_alpha);
  return cfg;
}

PlantStep plant_step(const PlantModel& plant, const Vector& x, const Vector& u,
                     RandomSource& rng) {
  if (x.size() != plant.n() || u.size() != plant.m())
    throw std::invalid_argument("plant_step: dimension mismatch");
  PlantStep out;
  const Vector w = sample_gaussian_prefactored(Vector::Zero(plant.n()),
                                               plant.process_factor, rng);
  const Vector v = sample_gaussian_prefactored(Vector::Zero(plant.p()),
                                               plant.measurement_factor, rng);
  out.x_next = plant.A * x + plant.B * u + w;
  out.y = plant.C * x + v;
  if (!out.x_next.allFinite() || !out.y.allFinite())
    throw std::runtime_error("plant_step: non-finite state");
  return out;
}

ControllerStep controller_step(const PlantModel& plant, const ControllerConfig& cfg,
                               const Vector& x_hat, const Vector& y) {
  if (x_hat.size() != plant.n() || y.size() != plant.p())
    throw std::invalid_argument("controller_step: dimension mismatch");
  ControllerStep out;
  out.r = y - plant.C * x_hat;
  out.u = -cfg.K * (x_hat - cfg.x_ref) + cfg.u_ref;
  out.x_hat_next = plant.A * x_hat + plant.B * out.u + cfg.L * out.r;
  if (!out.x_hat_next.allFinite())
    throw std::runtime_error("controller_step: non-finite estimate");
  return out;
}

DetectorStep detector_step(const ControllerConfig& cfg, const Matrix& innovation_cov,
                           const Vector& r) {
  if (innovation_cov.rows() != r.size() || innovation_cov.cols() != r.size())
    throw std::invalid_argument("detector_step: dimension mismatch");
  Eigen::LDLT<Matrix> ldlt(innovation_cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 0.0)
    throw std::invalid_argument("detector_step: innovation covariance is singular");
  DetectorStep out;
  out.stat = r.dot(ldlt.solve(r));
  const double threshold =
      cfg.detector_threshold > 0.0
          ? cfg.detector_threshold
          : chi_square_quantile(static_cast<int>(r.size()), 1.0 - cfg.detector_alpha);
  out.alarm = out.stat > threshold;
  return out;
}

}  // namespace hmwm
