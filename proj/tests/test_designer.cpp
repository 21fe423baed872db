#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hmwm/designer.hpp"

using namespace hmwm;

TEST_CASE("solve_gain_lmi certifies what it returns") {
  RandomSource rng(9);
  Matrix A(3, 3);
  A << 0.6, 0.3, 0.0, 0.0, 0.5, 0.2, 0.1, 0.0, 0.4;
  Matrix B(3, 2);
  B << 1.0, 0.0, 0.0, 1.0, 0.5, 0.5;

  const auto gd = solve_gain_lmi(A, B, 0.05, 100, rng);
  const Matrix M = A - B * gd.K;
  CHECK(M.jacobiSvd().singularValues()(0) <= 0.95 + 1e-12);
  CHECK(gd.X.isIdentity(0.0));

  // the reported margin is lambda_min(X - M X M^T), recomputed independently
  const Matrix R = gd.X - M * gd.X * M.transpose();
  CHECK(min_symmetric_eigenvalue(R) == doctest::Approx(gd.margin).epsilon(1e-10));
  CHECK(gd.margin >= 0.05);
}

TEST_CASE("solve_gain_lmi falls back or refuses honestly") {
  RandomSource rng(10);
  Matrix A = 0.5 * Matrix::Identity(2, 2);
  const Matrix B = Matrix::Zero(2, 1);
  // a zero sampling budget forces the deterministic K = 0 fallback, which is
  // admissible exactly when A already contracts
  const auto gd = solve_gain_lmi(A, B, 0.05, 0, rng);
  CHECK(gd.K.isZero(0.0));
  CHECK(gd.attempts == 0);
  CHECK(gd.margin == doctest::Approx(0.75).epsilon(1e-12));

  // B = 0 makes every sampled gain useless; an expanding A must be refused
  Matrix Abig = 1.5 * Matrix::Identity(2, 2);
  CHECK_THROWS(solve_gain_lmi(Abig, B, 0.05, 25, rng));
  CHECK_THROWS(solve_gain_lmi(A, Matrix::Zero(3, 1), 0.05, 25, rng));
  CHECK_THROWS(solve_gain_lmi(A, B, 0.0, 25, rng));
}

TEST_CASE("designed banks satisfy every structural and spectral constraint") {
  DesignSpec spec;  // defaults: 5 states, 2 hidden, 6 modes, 2 outputs
  RandomSource rng(3001);
  const auto res = design_bank(spec, rng);
  const auto& bank = res.bank;

  REQUIRE(bank.size() == 6);
  CHECK(bank.n_w == 5);
  CHECK(bank.observable_dim() == 3);
  CHECK(res.seed == 3001);
  CHECK(res.mode_designs.size() == 6);

  const auto audit = verify_pair(bank);
  CHECK_MESSAGE(audit.ok, audit.summary());

  for (int t = 0; t < bank.n_u; ++t) {
    const double a = std::abs(bank.A_u(t, t));
    CHECK(a >= 0.05);
    CHECK(a <= std::sqrt(0.5) - 0.05);
  }

  for (int i = 0; i < bank.size(); ++i) {
    const auto& md = bank.modes[i];
    const auto& dd = res.mode_designs[i];

    // observable block: symmetric with eigenvalues inside +-[floor, rho_bar]
    const Matrix Ao = md.A_w.topLeftCorner(3, 3);
    CHECK((Ao - Ao.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Ao);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(es.eigenvalues()(j)) >= 0.05 - 1e-12);
      CHECK(std::abs(es.eigenvalues()(j)) <= 0.9 + 1e-12);
    }

    CHECK(condition_number(md.D_w) <= 1e3);
    CHECK((md.C_w.leftCols(3) - md.D_w * dd.K).cwiseAbs().maxCoeff() < 1e-12);

    // gain certificate holds with the demanded margin
    const Matrix M = dd.A_obs - dd.B_obs * dd.K;
    const double certified =
        min_symmetric_eigenvalue(Matrix::Identity(3, 3) - M * M.transpose());
    CHECK(certified == doctest::Approx(dd.lmi_margin).epsilon(1e-10));
    CHECK(certified > 0.05 * 0.999);

    // remover's observable block is exactly the gain closed loop
    CHECK((md.A_q.topLeftCorner(3, 3) - M).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(spectral_radius(md.A_w) < 1.0);
    CHECK(spectral_radius(md.A_q) < 1.0);
  }
}

TEST_CASE("certificates decay along every forced switching sequence") {
  DesignSpec spec;
  RandomSource rng(77);
  const auto res = design_bank(spec, rng);
  const auto& cert = res.certificate;
  REQUIRE(cert.ok);
  CHECK(cert.margins_w.minCoeff() > 0.0);
  CHECK(cert.margins_q.minCoeff() > 0.0);
  CHECK(cert.tail_weights.minCoeff() > 0.0);

  // V(x) = x^T P x must be strictly decreasing under arbitrary mode choices
  RandomSource sw(5);
  for (int family = 0; family < 2; ++family) {
    Vector x(5);
    x << 1.0, -2.0, 0.5, 3.0, -1.0;
    const Matrix& P = family == 0 ? cert.P_w : cert.P_q;
    double v = x.dot(P * x);
    for (int k = 0; k < 400; ++k) {
      const int i = static_cast<int>(sw.next_uniform() * 6.0);
      const auto& md = res.bank.modes[i];
      x = (family == 0 ? md.A_w : md.A_q) * x;
      const double vn = x.dot(P * x);
      CHECK(vn <= v * (1.0 + 1e-12));
      v = vn;
    }
    CHECK(v < 1e-6);
  }
}

TEST_CASE("design draws are reproducible from the seed") {
  DesignSpec spec;
  RandomSource a(424242), b(424242);
  const auto ra = design_bank(spec, a);
  const auto rb = design_bank(spec, b);
  CHECK(a.position() == b.position());
  for (int i = 0; i < 6; ++i) {
    CHECK((ra.bank.modes[i].theta() - rb.bank.modes[i].theta()).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((ra.bank.modes[i].A_q - rb.bank.modes[i].A_q).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK((ra.bank.A_u - rb.bank.A_u).cwiseAbs().maxCoeff() == 0.0);

  RandomSource c(424243);
  const auto rc = design_bank(spec, c);
  CHECK((ra.bank.modes[0].theta() - rc.bank.modes[0].theta()).cwiseAbs().maxCoeff() >
        1e-6);
}

TEST_CASE("design_bank validates its specification") {
  RandomSource rng(1);
  DesignSpec bad;
  bad.n_u = 5;  // no observable block left
  CHECK_THROWS(design_bank(bad, rng));
  bad = DesignSpec{};
  bad.diag_floor = 0.95;
  CHECK_THROWS(design_bank(bad, rng));
  bad = DesignSpec{};
  bad.rho_bar = 1.1;
  CHECK_THROWS(design_bank(bad, rng));
  bad = DesignSpec{};
  bad.n_u = 0;
  CHECK_THROWS(design_bank(bad, rng));
}

TEST_CASE("certify_guas reports failure on an uncertifiable family") {
  // two modes whose product spirals out: certified GUAS must be refused
  WatermarkBank bank;
  bank.n_w = 2;
  bank.n_u = 1;
  bank.p = 1;
  bank.A_u = Matrix(1, 1);
  bank.A_u << 0.5;
  bank.B_u = Matrix(1, 1);
  bank.B_u << 1.0;
  for (int i = 0; i < 2; ++i) {
    WatermarkMode md;
    md.index = i + 1;
    md.A_w = Matrix(2, 2);
    // generator blocks individually stable but far from contractions
    md.A_w << 0.0, 0.0, (i == 0 ? 3.0 : -3.0), 0.5;
    md.B_w = Matrix(2, 1);
    md.B_w << 1.0, 1.0;
    md.C_w = Matrix(1, 2);
    md.C_w << 1.0, 0.0;
    md.D_w = Matrix(1, 1);
    md.D_w << 1.0;
    md.A_q = md.A_w - md.B_w * md.C_w;  // D = 1
    md.B_q = md.B_w;
    md.C_q = -md.C_w;
    md.D_q = md.D_w;
    bank.modes.push_back(md);
  }
  Vector mean(1);
  mean << 0.0;
  bank.partition = build_partition(mean, Matrix::Identity(1, 1), 2);

  const auto cert = certify_guas(bank);
  CHECK_FALSE(cert.ok);
  CHECK_FALSE(cert.detail.empty());
}
