#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hmwm/random.hpp"
#include "hmwm/watermark.hpp"

namespace hmwm {

// Knobs for drawing a bank of watermarking filters. Defaults reproduce the
// shipped laboratory scenario: order 5, two hidden tail coordinates, six
// modes over a two-output plant.
struct DesignSpec {
  int n_w = 5;
  int n_u = 2;
  int p = 2;
  int modes = 6;
  double rho_bar = 0.9;      // ceiling on observable-block eigenvalue magnitude
  double diag_floor = 0.05;  // keeps drawn dynamics away from zero
  double margin = 0.05;      // contraction margin demanded of every gain
  double cond_cap = 1e3;     // feedthrough conditioning bound
  int max_attempts = 100;    // per randomized search loop
};

struct GainDesign {
  Matrix K;
  Matrix X;        // certificate shape, identity in this restriction
  double margin;   // lambda_min(X - (A-BK) X (A-BK)^T)
  int attempts;    // draws consumed, 0 means the zero gain already sufficed
};

// Contraction gain by restricted certificate search: fix X = I and sample
// Gaussian K at geometrically shrinking scales until
// sigma_max(A - B K) <= 1 - margin, which makes X - (A-BK) X (A-BK)^T
// positive definite with at least the returned margin. Shrinking the scale
// drives A - B K toward A, so the search terminates whenever A itself
// contracts; otherwise it throws after max_attempts.
GainDesign solve_gain_lmi(const Matrix& A, const Matrix& B, double margin,
                          int max_attempts, RandomSource& rng);

// Common quadratic certificate for each switched family under arbitrary
// switching, plus per-mode margins -lambda_max(A^T P A - P).
struct StabilityCertificate {
  Matrix P_w, P_q;
  Vector tail_weights;          // diagonal of P_q over the tail coordinates
  Vector margins_w, margins_q;  // one entry per mode
  bool ok = false;
  std::string detail;           // diagnostic when ok is false
};

// P_w = I: every generator is a norm contraction by construction. P_q is
// built level by level over the triangular remover structure: identity on the
// observable block, then one positive weight per tail coordinate chosen by
// log-spaced grid search to maximize the worst-mode margin. The certificate
// is re-verified on the assembled matrices before being reported; on failure
// ok=false with a diagnostic rather than a weakened claim.
StabilityCertificate certify_guas(const WatermarkBank& bank);

// Per-mode draw record, kept so the gain certificates can be re-audited.
struct ModeDesign {
  Matrix A_obs, B_obs, K;
  double lmi_margin = 0.0;
  int gain_attempts = 0;
};

struct DesignResult {
  WatermarkBank bank;
  StabilityCertificate certificate;
  std::vector<ModeDesign> mode_designs;
  std::uint64_t seed = 0;
};

// Randomized bank construction:
//   1. one orthonormal basis shared by every mode;
//   2. per mode, a symmetric observable block with uniformly drawn
//      eigenvalues in +-[diag_floor, rho_bar], a controllable Gaussian input
//      block, a contraction gain, and a well-conditioned Gaussian
//      feedthrough; the output block is C = D K so the inverse filter
//      contracts by the gain's certificate;
//   3. a tail of unobservable coordinates shared by every mode, diagonal
//      entries drawn from +-[diag_floor, sqrt(1/2) - diag_floor];
//   4. inverse filters, a default standard-normal partition over the tail,
//      a structural audit and a stability certificate.
// Throws if the audit or the certificate fails; the result is reproducible
// from the rng seed.
DesignResult design_bank(const DesignSpec& spec, RandomSource& rng);

}  // namespace hmwm
