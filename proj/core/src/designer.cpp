#include "hmwm/designer.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hmwm {

namespace {

Matrix gaussian_matrix(int rows, int cols, RandomSource& rng) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.next_gaussian();
  return g;
}

double signed_uniform(double lo, double hi, RandomSource& rng) {
  const double mag = lo + (hi - lo) * rng.next_uniform();
  return rng.next_uniform() < 0.5 ? -mag : mag;
}

double largest_singular_value(const Matrix& M) {
  return M.jacobiSvd().singularValues()(0);
}

}  // namespace

GainDesign solve_gain_lmi(const Matrix& A, const Matrix& B, double margin,
                          int max_attempts, RandomSource& rng) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n)
    throw std::invalid_argument("solve_gain_lmi: dimension mismatch");
  if (!(margin > 0.0 && margin < 1.0))
    throw std::invalid_argument("solve_gain_lmi: margin must be in (0,1)");

  const double target = 1.0 - margin;
  const auto certify = [&](const Matrix& K, int attempts) -> GainDesign {
    const Matrix M = A - B * K;
    const double sigma = largest_singular_value(M);
    if (sigma > target) throw std::logic_error("solve_gain_lmi: candidate audit");
    // X = I turns the certificate inequality into 1 - sigma^2 > 0
    return {K, Matrix::Identity(n, n), 1.0 - sigma * sigma, attempts};
  };

  double scale = 1.0;
  for (int t = 1; t <= max_attempts; ++t) {
    const Matrix K = scale * gaussian_matrix(static_cast<int>(B.cols()),
                                             static_cast<int>(n), rng);
    if (largest_singular_value(A - B * K) <= target) return certify(K, t);
    scale *= 0.7;
  }
  // scale decayed toward zero without success, so only K = 0 can remain
  if (largest_singular_value(A) <= target)
    return certify(Matrix::Zero(B.cols(), n), 0);
  throw std::runtime_error("solve_gain_lmi: no admissible gain found");
}

namespace {

// -lambda_max(A^T P A - P); positive iff P certifies the mode
double mode_margin(const Matrix& A, const Matrix& P) {
  const Matrix G = A.transpose() * P * A - P;
  return min_symmetric_eigenvalue(-G);
}

}  // namespace

StabilityCertificate certify_guas(const WatermarkBank& bank) {
  StabilityCertificate cert;
  const int n_w = bank.n_w, n_u = bank.n_u;
  const int n_o = bank.observable_dim();
  const int s = bank.size();
  if (s == 0 || n_o <= 0) {
    cert.detail = "empty bank";
    return cert;
  }

  cert.P_w = Matrix::Identity(n_w, n_w);
  cert.margins_w = Vector(s);
  for (int i = 0; i < s; ++i) {
    cert.margins_w(i) = mode_margin(bank.modes[i].A_w, cert.P_w);
    if (cert.margins_w(i) <= 0.0) {
      std::ostringstream os;
      os << "generator mode " << i + 1 << " does not contract (margin "
         << cert.margins_w(i) << ")";
      cert.detail = os.str();
      return cert;
    }
  }

  // triangular build-up: identity over the observable block, then one tail
  // weight at a time; each level must hold simultaneously for every mode
  cert.tail_weights = Vector(n_u);
  Matrix P = Matrix::Identity(n_o, n_o);
  for (int t = 0; t < n_u; ++t) {
    const int dim = n_o + t + 1;
    double best_weight = 0.0, best_margin = -1.0;
    for (int g = 0; g < 121; ++g) {
      const double w = std::pow(10.0, -6.0 + 12.0 * g / 120.0);
      Matrix Pt = Matrix::Zero(dim, dim);
      Pt.topLeftCorner(dim - 1, dim - 1) = P;
      Pt(dim - 1, dim - 1) = w;
      double worst = std::numeric_limits<double>::infinity();
      for (int i = 0; i < s; ++i)
        worst = std::min(worst,
                         mode_margin(bank.modes[i].A_q.topLeftCorner(dim, dim), Pt));
      if (worst > best_margin) {
        best_margin = worst;
        best_weight = w;
      }
    }
    if (best_margin <= 0.0) {
      std::ostringstream os;
      os << "no tail weight certifies remover level " << t + 1
         << " (best margin " << best_margin << ")";
      cert.detail = os.str();
      return cert;
    }
    cert.tail_weights(t) = best_weight;
    Matrix Pn = Matrix::Zero(dim, dim);
    Pn.topLeftCorner(dim - 1, dim - 1) = P;
    Pn(dim - 1, dim - 1) = best_weight;
    P = Pn;
  }
  cert.P_q = P;

  // final audit on the assembled matrices; a grid winner that fails here is
  // reported as a failure, never rounded up to a certificate
  cert.margins_q = Vector(s);
  for (int i = 0; i < s; ++i) {
    cert.margins_q(i) = mode_margin(bank.modes[i].A_q, cert.P_q);
    if (cert.margins_q(i) <= 0.0) {
      std::ostringstream os;
      os << "remover mode " << i + 1 << " fails the final audit (margin "
         << cert.margins_q(i) << ")";
      cert.detail = os.str();
      return cert;
    }
  }
  cert.ok = true;
  cert.detail = "certified";
  return cert;
}

DesignResult design_bank(const DesignSpec& spec, RandomSource& rng) {
  const int n_o = spec.n_w - spec.n_u;
  if (spec.n_w < 1 || spec.n_u < 1 || n_o < 1 || spec.p < 1 || spec.modes < 1)
    throw std::invalid_argument("design_bank: inconsistent dimensions");
  if (!(spec.diag_floor > 0.0 && spec.diag_floor < spec.rho_bar && spec.rho_bar < 1.0))
    throw std::invalid_argument("design_bank: need 0 < diag_floor < rho_bar < 1");
  const double tail_cap = std::sqrt(0.5) - spec.diag_floor;
  if (spec.diag_floor >= tail_cap)
    throw std::invalid_argument("design_bank: diag_floor leaves no room for the tail");

  DesignResult out;
  out.seed = rng.seed();
  WatermarkBank& bank = out.bank;
  bank.n_w = spec.n_w;
  bank.n_u = spec.n_u;
  bank.p = spec.p;

  const Matrix basis = random_orthonormal(n_o, rng);

  // tail drawn once and shared: identical hidden dynamics in every mode is
  // what lets the two sides stay synchronized without communicating
  bank.A_u = Matrix::Zero(spec.n_u, spec.n_u);
  bank.B_u = Matrix(spec.n_u, spec.p);
  for (int t = 0; t < spec.n_u; ++t) {
    bank.A_u(t, t) = signed_uniform(spec.diag_floor, tail_cap, rng);
    bank.B_u.row(t) = gaussian_matrix(1, spec.p, rng);
  }

  for (int i = 0; i < spec.modes; ++i) {
    ModeDesign md;

    Vector eigs(n_o);
    for (int j = 0; j < n_o; ++j)
      eigs(j) = signed_uniform(spec.diag_floor, spec.rho_bar, rng);
    md.A_obs = basis.transpose() * eigs.asDiagonal() * basis;

    int b_tries = 0;
    do {
      md.B_obs = gaussian_matrix(n_o, spec.p, rng);
      if (++b_tries > spec.max_attempts)
        throw std::runtime_error("design_bank: controllable input block not found");
    } while (controllability_rank(md.A_obs, md.B_obs) < n_o);

    const GainDesign gd =
        solve_gain_lmi(md.A_obs, md.B_obs, spec.margin, spec.max_attempts, rng);
    md.K = gd.K;
    md.lmi_margin = gd.margin;
    md.gain_attempts = gd.attempts;

    Matrix D;
    int d_tries = 0;
    do {
      D = gaussian_matrix(spec.p, spec.p, rng);
      if (++d_tries > spec.max_attempts)
        throw std::runtime_error("design_bank: conditioned feedthrough not found");
    } while (condition_number(D) > spec.cond_cap);

    WatermarkMode mode;
    mode.index = i + 1;
    mode.A_w = Matrix::Zero(spec.n_w, spec.n_w);
    mode.A_w.topLeftCorner(n_o, n_o) = md.A_obs;
    mode.A_w.bottomRightCorner(spec.n_u, spec.n_u) = bank.A_u;
    mode.B_w = Matrix(spec.n_w, spec.p);
    mode.B_w.topRows(n_o) = md.B_obs;
    mode.B_w.bottomRows(spec.n_u) = bank.B_u;
    mode.C_w = Matrix::Zero(spec.p, spec.n_w);
    mode.C_w.leftCols(n_o) = D * md.K;  // ties the inverse to the gain certificate
    mode.D_w = D;

    const StateSpace inv = invert_filter({mode.A_w, mode.B_w, mode.C_w, mode.D_w});
    mode.A_q = inv.A;
    mode.B_q = inv.B;
    mode.C_q = inv.C;
    mode.D_q = inv.D;

    bank.modes.push_back(std::move(mode));
    out.mode_designs.push_back(std::move(md));
  }

  // placeholder selector over the tail; callers re-partition once the loop's
  // stationary statistics are known
  bank.partition = build_partition(Vector::Zero(spec.n_u),
                                   Matrix::Identity(spec.n_u, spec.n_u), spec.modes);

  const PairReport audit = verify_pair(bank);
  if (!audit.ok)
    throw std::runtime_error("design_bank: structural audit failed\n" + audit.summary());
  out.certificate = certify_guas(bank);
  if (!out.certificate.ok)
    throw std::runtime_error("design_bank: certification failed: " +
                             out.certificate.detail);
  return out;
}

}  // namespace hmwm
