#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace hmwm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Deterministic random stream. The engine is mt19937_64 (bit-exact across
// platforms by the standard); uniform and Gaussian draws are mapped from raw
// 64-bit words here instead of going through std::*_distribution, whose output
// is implementation-defined. Identical seeds therefore reproduce identical
// trajectories on any conforming toolchain.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t next_u64() {
    ++position_;
    return engine_();
  }

  // uniform on [0,1), 53-bit resolution
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0,1], so log() below is always finite
  double next_uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Box-Muller, cosine branch only: exactly two words per draw, so the stream
  // position after k draws does not depend on the values drawn.
  double next_gaussian();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return position_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  std::uint64_t position_ = 0;
};

struct GaussianSpec {
  Vector mean;
  Matrix cov;  // symmetric positive semidefinite
};

// PSD square root used for sampling: cov = F F^T. Eigendecomposition handles
// rank-deficient covariances (exactly-zero noise must give exactly the mean).
Matrix gaussian_factor(const Matrix& cov);

Vector sample_gaussian(const GaussianSpec& spec, RandomSource& rng);
Vector sample_gaussian_prefactored(const Vector& mean, const Matrix& factor,
                                   RandomSource& rng);

// Haar-ish orthonormal matrix: QR of a Gaussian matrix with the sign of
// R's diagonal folded into Q, so the draw is unique and deterministic.
Matrix random_orthonormal(int n, RandomSource& rng);

}  // namespace hmwm
