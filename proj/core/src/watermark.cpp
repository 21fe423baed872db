#include "hmwm/watermark.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hmwm {

StateSpace invert_filter(const StateSpace& g) {
  if (g.D.rows() != g.D.cols()) throw std::invalid_argument("invert_filter: D must be square");
  if (condition_number(g.D) > 1e12)
    throw std::invalid_argument("invert_filter: D is numerically singular");
  StateSpace q;
  q.D = g.D.inverse();
  // zero columns of C stay exactly zero through D^-1 * C, which keeps the
  // inverse's lower-triangular block structure exact rather than approximate
  const Matrix DC = q.D * g.C;
  q.A = g.A - g.B * DC;
  q.B = g.B * q.D;
  q.C = -DC;
  return q;
}

Vector WatermarkMode::theta() const {
  const auto n = A_w.rows();
  const auto p = D_w.rows();
  Matrix block(n + p, n + p);
  block << A_w, B_w, C_w, D_w;
  Matrix rows = block.transpose();  // column-major storage, transposed = row-major walk
  return Eigen::Map<Vector>(rows.data(), rows.size());
}

int select_mode(const WatermarkBank& bank, const Vector& x_u) {
  if (bank.partition.cells.empty())
    throw std::invalid_argument("select_mode: bank has no partition");
  if (bank.partition.size() != bank.size())
    throw std::invalid_argument("select_mode: partition/mode count mismatch");
  return classify(bank.partition, x_u);
}

namespace {

FilterOutput filter_step(const WatermarkBank& bank, FilterState& state,
                         const Vector& input, bool generator) {
  if (state.x.size() != bank.n_w) throw std::invalid_argument("filter step: state dimension");
  if (input.size() != bank.p) throw std::invalid_argument("filter step: input dimension");
  const int mode = select_mode(bank, state.x.tail(bank.n_u));
  const auto& md = bank.modes[mode - 1];
  const Matrix& A = generator ? md.A_w : md.A_q;
  const Matrix& B = generator ? md.B_w : md.B_q;
  const Matrix& C = generator ? md.C_w : md.C_q;
  const Matrix& D = generator ? md.D_w : md.D_q;
  FilterOutput out;
  out.y = C * state.x + D * input;
  out.mode = mode;
  state.x = A * state.x + B * input;
  state.mode = mode;
  if (!state.x.allFinite() || !out.y.allFinite())
    throw std::runtime_error("filter step: non-finite state");
  return out;
}

}  // namespace

FilterOutput generator_step(const WatermarkBank& bank, FilterState& state,
                            const Vector& y_p) {
  return filter_step(bank, state, y_p, true);
}

FilterOutput remover_step(const WatermarkBank& bank, FilterState& state,
                          const Vector& y_w) {
  return filter_step(bank, state, y_w, false);
}

std::string PairReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks)
    os << (c.pass ? "[ok]   " : "[FAIL] ") << c.name << " (" << c.value << ")\n";
  return os.str();
}

namespace {

void add_check(PairReport& rep, const std::string& name, bool pass, double value) {
  rep.checks.push_back({name, pass, value});
  rep.ok = rep.ok && pass;
}

}  // namespace

PairReport verify_pair(const WatermarkBank& bank) {
  PairReport rep;
  const int n_w = bank.n_w, n_u = bank.n_u, p = bank.p;
  const int n_o = bank.observable_dim();

  if (bank.modes.empty() || n_w <= 0 || n_u < 0 || n_u >= n_w || p <= 0) {
    add_check(rep, "bank dimensions", false, 0.0);
    return rep;
  }
  add_check(rep, "bank dimensions", true, bank.size());

  // shared diagonal tail within the contraction bound
  double tail_mag = 0.0;
  bool tail_diag = bank.A_u.rows() == n_u && bank.A_u.cols() == n_u;
  if (tail_diag) {
    for (int i = 0; i < n_u; ++i)
      for (int j = 0; j < n_u; ++j) {
        if (i != j && bank.A_u(i, j) != 0.0) tail_diag = false;
        if (i == j) tail_mag = std::max(tail_mag, std::abs(bank.A_u(i, i)));
      }
  }
  add_check(rep, "tail block diagonal", tail_diag, tail_mag);
  add_check(rep, "tail magnitude within sqrt(1/2)", tail_mag <= std::sqrt(0.5) + 1e-12,
            tail_mag);

  double worst_eq = 0.0, worst_cond = 0.0, worst_rho_w = 0.0, worst_rho_q = 0.0;
  bool structure = true, shared = true;
  int worst_rank = 0;
  for (const auto& md : bank.modes) {
    if (md.A_w.rows() != n_w || md.B_w.rows() != n_w || md.B_w.cols() != p ||
        md.C_w.rows() != p || md.D_w.rows() != p) {
      add_check(rep, "mode dimensions", false, md.index);
      return rep;
    }
    // exact zeros demanded by the split into observable part and tail
    structure = structure && md.A_w.topRightCorner(n_o, n_u).isZero(0.0) &&
                md.A_w.bottomLeftCorner(n_u, n_o).isZero(0.0) &&
                md.C_w.rightCols(n_u).isZero(0.0) &&
                md.A_q.topRightCorner(n_o, n_u).isZero(0.0);
    shared = shared && (md.A_w.bottomRightCorner(n_u, n_u) - bank.A_u).isZero(0.0) &&
             (md.B_w.bottomRows(n_u) - bank.B_u).isZero(0.0);

    // stored remover must be the exact inverse wiring of the generator
    const StateSpace inv = invert_filter({md.A_w, md.B_w, md.C_w, md.D_w});
    const double scale = 1.0 + md.A_w.norm() + md.B_w.norm() + md.C_w.norm() + md.D_w.norm();
    double eq = (inv.A - md.A_q).norm() + (inv.B - md.B_q).norm() +
                (inv.C - md.C_q).norm() + (inv.D - md.D_q).norm();
    eq += (md.D_w * md.D_q - Matrix::Identity(p, p)).norm();
    worst_eq = std::max(worst_eq, eq / scale);

    worst_cond = std::max(worst_cond, condition_number(md.D_w));
    worst_rho_w = std::max(worst_rho_w, spectral_radius(md.A_w));
    worst_rho_q = std::max(worst_rho_q, spectral_radius(md.A_q));
    worst_rank = std::max(worst_rank, observability_rank(md.A_w, md.C_w));
  }
  add_check(rep, "block structure zeros", structure, 0.0);
  add_check(rep, "tail shared across modes", shared, 0.0);
  add_check(rep, "inversion identities", worst_eq <= 1e-10, worst_eq);
  add_check(rep, "feedthrough condition number", worst_cond <= 1e6, worst_cond);
  add_check(rep, "generator family Schur stable", worst_rho_w < 1.0, worst_rho_w);
  add_check(rep, "remover family Schur stable", worst_rho_q < 1.0, worst_rho_q);
  add_check(rep, "tail unobservable from output", worst_rank <= n_o, worst_rank);

  const bool part_ok = bank.partition.size() == bank.size() && bank.partition.dim == n_u;
  add_check(rep, "partition matches bank", part_ok, bank.partition.size());
  return rep;
}

}  // namespace hmwm
