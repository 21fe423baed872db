#pragma once

#include <string>

#include "hmwm/numerics.hpp"

namespace hmwm {

// Columnar record of one closed-loop run, one row per step. Signal widths
// are fixed by the scenario (plant state n, outputs p, inputs m, filter
// order n_w); mode columns are 0 when the watermark was disabled.
struct SimTrace {
  Matrix x_p;  // plant state
  Matrix y_p;  // measured output before watermarking
  Matrix u;    // applied input
  Matrix y_w;  // transmitted (watermarked) output
  Matrix y_q;  // recovered output at the controller side
  Matrix r;    // observer innovation
  Vector chi2;
  Eigen::VectorXi mode_w, mode_q;
  Matrix x_w, x_q;  // generator and remover filter states

  Eigen::Index steps() const { return x_p.rows(); }
};

// Plain CSV, 17 significant digits so every double survives the round trip.
// Header layout: k, x_p*, y_p*, u*, y_w*, y_q*, r*, chi2_stat, mode_w,
// mode_q, x_w*, x_q*.
void write_trace_csv(const SimTrace& trace, const std::string& path);

// Inverse of write_trace_csv; widths are recovered from the header. Throws
// on malformed files.
SimTrace read_trace_csv(const std::string& path);

}  // namespace hmwm
