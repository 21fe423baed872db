#pragma once

#include <string>
#include <vector>

#include "hmwm/partition.hpp"

namespace hmwm {

struct StateSpace {
  Matrix A, B, C, D;
};

// Inverse of a square-feedthrough filter: the unique system mapping the
// filter's output back to its input. D must be invertible.
StateSpace invert_filter(const StateSpace& g);

// One watermarking mode: the generator (A_w, B_w, C_w, D_w) applied to the
// plant output before transmission, and the matched remover obtained by
// inversion. The state splits into an observable upper block and an
// unobservable tail: the last n_u columns of C_w are zero and A_w is block
// diagonal, so the tail never reaches the output yet drives mode selection.
struct WatermarkMode {
  int index = 0;  // 1-based position in the bank
  Matrix A_w, B_w, C_w, D_w;
  Matrix A_q, B_q, C_q, D_q;

  // flattened [A_w B_w; C_w D_w], row-major; length (n_w + p)^2
  Vector theta() const;
};

struct WatermarkBank {
  int n_w = 0;  // filter order
  int n_u = 0;  // unobservable tail dimension
  int p = 0;    // plant output dimension
  std::vector<WatermarkMode> modes;
  Matrix A_u;  // diagonal tail dynamics, shared by every mode
  Matrix B_u;  // tail input rows, shared by every mode
  Partition partition;  // over the tail coordinates

  int observable_dim() const { return n_w - n_u; }
  int size() const { return static_cast<int>(modes.size()); }
};

struct FilterState {
  Vector x;
  int mode = 1;  // mode applied on the most recent step
};

// Mode for the current step, picked from the tail of the running state
// before the update. Generator and remover run this rule on their own states;
// with matched initial states they select identical sequences without ever
// exchanging an index.
int select_mode(const WatermarkBank& bank, const Vector& x_u);

struct FilterOutput {
  Vector y;
  int mode;
};

FilterOutput generator_step(const WatermarkBank& bank, FilterState& state,
                            const Vector& y_p);
FilterOutput remover_step(const WatermarkBank& bank, FilterState& state,
                          const Vector& y_w);

struct PairCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;  // measured residual or margin for the report
};

struct PairReport {
  std::vector<PairCheck> checks;
  bool ok = true;
  std::string summary() const;
};

// Structural audit of a bank: inversion identities, block sparsity, tail
// magnitude bound, feedthrough conditioning, stability of both families and
// unobservability of the tail. Reports rather than throws.
PairReport verify_pair(const WatermarkBank& bank);

}  // namespace hmwm
