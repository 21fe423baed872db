#include "hmwm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hmwm {

DwellStats dwell_stats(const Eigen::VectorXi& modes) {
  DwellStats out;
  const auto T = modes.size();
  if (T == 0) return out;
  std::vector<int> dwells;
  int run = 1;
  for (Eigen::Index k = 1; k < T; ++k) {
    if (modes(k) == modes(k - 1)) {
      ++run;
    } else {
      dwells.push_back(run);
      run = 1;
    }
  }
  dwells.push_back(run);
  out.events = static_cast<int>(dwells.size()) - 1;
  out.max = *std::max_element(dwells.begin(), dwells.end());
  std::sort(dwells.begin(), dwells.end());
  const auto n = dwells.size();
  out.median = n % 2 == 1 ? dwells[n / 2]
                          : 0.5 * (dwells[n / 2 - 1] + dwells[n / 2]);
  return out;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  if (cfg.steps < 1) throw std::invalid_argument("run_scenario: steps must be positive");

  RunResult res;
  res.plant = make_plant(cfg.A, cfg.B, cfg.C, cfg.process_cov, cfg.measurement_cov);
  res.controller = make_controller(res.plant, cfg.K, cfg.x_ref, cfg.u_ref,
                                   cfg.detector_alpha, cfg.L);

  RandomSource design_rng(cfg.design_seed);
  res.design = design_bank(cfg.design, design_rng);
  WatermarkBank& bank = res.design.bank;
  if (bank.p != res.plant.p())
    throw std::invalid_argument("run_scenario: filter bank width != plant outputs");

  res.stats = steady_stats(res.plant, res.controller, bank.A_u, bank.B_u);
  if (cfg.recompute_partition) {
    // noise-free loops have a singular (zero) tail covariance; the default
    // standard-normal cells remain in place and the flag says so
    try {
      bank.partition = build_partition(res.stats, bank.size());
      res.partition_from_stats = true;
    } catch (const std::invalid_argument&) {
      res.partition_from_stats = false;
    }
  }

  const int n = res.plant.n(), m = res.plant.m(), p = res.plant.p();
  const int n_w = bank.n_w, n_u = bank.n_u;
  const int T = cfg.steps;

  SimTrace& tr = res.trace;
  tr.x_p = Matrix(T, n);
  tr.y_p = Matrix(T, p);
  tr.u = Matrix(T, m);
  tr.y_w = Matrix(T, p);
  tr.y_q = Matrix(T, p);
  tr.r = Matrix(T, p);
  tr.chi2 = Vector::Zero(T);
  tr.mode_w = Eigen::VectorXi::Zero(T);
  tr.mode_q = Eigen::VectorXi::Zero(T);
  tr.x_w = Matrix::Zero(T, n_w);
  tr.x_q = Matrix::Zero(T, n_w);

  Vector x_p = cfg.x0.value_or(cfg.x_ref);
  Vector x_hat = x_p;
  if (x_p.size() != n) throw std::invalid_argument("run_scenario: x0 dimension");

  // both filters start from the tail's stationary mean so the selector sees
  // typical values immediately; the observable part carries no memory yet
  Vector filter_init = Vector::Zero(n_w);
  filter_init.tail(n_u) = res.stats.mean_xu;
  FilterState gen{filter_init, 1};
  FilterState rem{filter_init, 1};
  if (cfg.remover_x0) {
    if (cfg.remover_x0->size() != n_w)
      throw std::invalid_argument("run_scenario: remover_x0 dimension");
    rem.x = *cfg.remover_x0;
  }

  RandomSource rng(cfg.noise_seed);
  const Vector zero_p = Vector::Zero(p), zero_n = Vector::Zero(n);
  int alarms = 0;

  for (int k = 0; k < T; ++k) {
    tr.x_p.row(k) = x_p;
    tr.x_w.row(k) = gen.x;
    tr.x_q.row(k) = rem.x;

    const Vector v =
        sample_gaussian_prefactored(zero_p, res.plant.measurement_factor, rng);
    const Vector y_p = res.plant.C * x_p + v;
    tr.y_p.row(k) = y_p;

    Vector y_ctrl;
    if (cfg.watermark_enabled) {
      const FilterOutput w = generator_step(bank, gen, y_p);
      const FilterOutput q = remover_step(bank, rem, w.y);
      tr.y_w.row(k) = w.y;
      tr.y_q.row(k) = q.y;
      tr.mode_w(k) = w.mode;
      tr.mode_q(k) = q.mode;
      y_ctrl = q.y;
    } else {
      tr.y_w.row(k) = y_p;
      tr.y_q.row(k) = y_p;
      y_ctrl = y_p;
    }

    const ControllerStep cs = controller_step(res.plant, res.controller, x_hat, y_ctrl);
    tr.u.row(k) = cs.u;
    tr.r.row(k) = cs.r;
    if (res.controller.detector_enabled) {
      const DetectorStep ds =
          detector_step(res.controller, res.controller.innovation_cov, cs.r);
      tr.chi2(k) = ds.stat;
      alarms += ds.alarm ? 1 : 0;
    }

    const Vector w =
        sample_gaussian_prefactored(zero_n, res.plant.process_factor, rng);
    x_p = res.plant.A * x_p + res.plant.B * cs.u + w;
    x_hat = cs.x_hat_next;
  }

  // run summary
  RunMetrics& mt = res.metrics;
  mt.mode_frequency = Vector::Zero(bank.size());
  if (cfg.watermark_enabled) {
    for (int k = 0; k < T; ++k) {
      mt.mode_frequency(tr.mode_w(k) - 1) += 1.0;
      if (tr.mode_w(k) != tr.mode_q(k)) ++mt.mode_mismatches;
    }
    mt.mode_frequency /= T;
    const DwellStats ds = dwell_stats(tr.mode_w);
    mt.switch_events = ds.events;
    mt.median_dwell = ds.median;
    mt.max_dwell = ds.max;
    mt.max_recovery_error = (tr.y_q - tr.y_p).cwiseAbs().maxCoeff();
    mt.max_state_divergence = (tr.x_w - tr.x_q).cwiseAbs().maxCoeff();

    // predicted stationary tail covariance against the simulated spread
    if (T > 1) {
      const Matrix tail = tr.x_w.rightCols(n_u);
      const Vector emp_mean = tail.colwise().mean();
      const Matrix centered = tail.rowwise() - emp_mean.transpose();
      const Matrix emp_cov = centered.transpose() * centered / (T - 1);
      const double denom = res.stats.cov_xu.norm();
      mt.tail_cov_gap = denom > 0.0 ? (emp_cov - res.stats.cov_xu).norm() / denom
                                    : emp_cov.norm();
    }
  }
  mt.alarm_rate =
      res.controller.detector_enabled ? static_cast<double>(alarms) / T : 0.0;
  return res;
}

VerifyReport verify_bank(const WatermarkBank& bank, int steps, std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("verify_bank: steps must be positive");
  VerifyReport rep;
  rep.pair = verify_pair(bank);
  rep.certificate = certify_guas(bank);

  RandomSource rng(seed);
  FilterState gen{Vector::Zero(bank.n_w), 1};
  FilterState rem{Vector::Zero(bank.n_w), 1};
  Vector y_p(bank.p);
  for (int k = 0; k < steps; ++k) {
    for (int j = 0; j < bank.p; ++j) y_p(j) = rng.next_gaussian();
    const FilterOutput w = generator_step(bank, gen, y_p);
    const FilterOutput q = remover_step(bank, rem, w.y);
    if (w.mode != q.mode) ++rep.mode_mismatches;
    rep.max_recovery_error =
        std::max(rep.max_recovery_error, (q.y - y_p).cwiseAbs().maxCoeff());
    rep.max_state_divergence =
        std::max(rep.max_state_divergence, (gen.x - rem.x).cwiseAbs().maxCoeff());
  }
  rep.ok = rep.pair.ok && rep.certificate.ok && rep.mode_mismatches == 0 &&
           rep.max_recovery_error < 1e-8;
  return rep;
}

}  // namespace hmwm
