#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "hmwm/random.hpp"
#include "hmwm/trace.hpp"

using namespace hmwm;

namespace {

SimTrace sample_trace(int T, std::uint64_t seed) {
  RandomSource rng(seed);
  const auto fill = [&](Eigen::Index rows, Eigen::Index cols) {
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        M(i, j) = rng.next_gaussian() * std::pow(10.0, -12 + 3 * static_cast<int>(j));
    return M;
  };
  SimTrace tr;
  tr.x_p = fill(T, 4);
  tr.y_p = fill(T, 2);
  tr.u = fill(T, 2);
  tr.y_w = fill(T, 2);
  tr.y_q = fill(T, 2);
  tr.r = fill(T, 2);
  tr.chi2 = fill(T, 1).col(0).cwiseAbs();
  tr.mode_w = Eigen::VectorXi(T);
  tr.mode_q = Eigen::VectorXi(T);
  for (int k = 0; k < T; ++k) {
    tr.mode_w(k) = 1 + k % 6;
    tr.mode_q(k) = 1 + (k + 1) % 6;
  }
  tr.x_w = fill(T, 5);
  tr.x_q = fill(T, 5);
  return tr;
}

const char* tmp_path() { return "trace_test_tmp.csv"; }

}  // namespace

TEST_CASE("trace survives the csv round trip bit for bit") {
  SimTrace tr = sample_trace(37, 2024);
  // awkward values must survive: signed zero, huge, tiny, long mantissas
  tr.x_p(0, 0) = -0.0;
  tr.x_p(1, 1) = 1.0 / 3.0;
  tr.x_p(2, 2) = 1e300;
  tr.x_p(3, 3) = 5e-324;
  write_trace_csv(tr, tmp_path());
  const SimTrace back = read_trace_csv(tmp_path());

  REQUIRE(back.steps() == tr.steps());
  const auto same = [](const Matrix& a, const Matrix& b) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        if (!(a(i, j) == b(i, j))) return false;
    return true;
  };
  CHECK(same(tr.x_p, back.x_p));
  CHECK(same(tr.y_p, back.y_p));
  CHECK(same(tr.u, back.u));
  CHECK(same(tr.y_w, back.y_w));
  CHECK(same(tr.y_q, back.y_q));
  CHECK(same(tr.r, back.r));
  CHECK(same(tr.x_w, back.x_w));
  CHECK(same(tr.x_q, back.x_q));
  CHECK((tr.chi2 - back.chi2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((tr.mode_w - back.mode_w).cwiseAbs().maxCoeff() == 0);
  CHECK((tr.mode_q - back.mode_q).cwiseAbs().maxCoeff() == 0);
  std::remove(tmp_path());
}

TEST_CASE("csv header names every column in transmission order") {
  write_trace_csv(sample_trace(2, 7), tmp_path());
  std::ifstream is(tmp_path());
  std::string header;
  std::getline(is, header);
  CHECK(header ==
        "k,x_p1,x_p2,x_p3,x_p4,y_p1,y_p2,u1,u2,y_w1,y_w2,y_q1,y_q2,r1,r2,"
        "chi2_stat,mode_w,mode_q,x_w1,x_w2,x_w3,x_w4,x_w5,x_q1,x_q2,x_q3,x_q4,x_q5");
  std::remove(tmp_path());
}

TEST_CASE("reader rejects malformed files") {
  CHECK_THROWS(read_trace_csv("definitely_not_there.csv"));

  std::ofstream(tmp_path()) << "a,b,c\n1,2,3\n";
  CHECK_THROWS(read_trace_csv(tmp_path()));

  // row shorter than the header promises
  std::ofstream(tmp_path()) << "k,x_p1,y_p1,u1,y_w1,y_q1,r1,chi2_stat,mode_w,"
                               "mode_q,x_w1,x_q1\n0,1.0,2.0\n";
  CHECK_THROWS(read_trace_csv(tmp_path()));
  std::remove(tmp_path());
}

TEST_CASE("writer refuses inconsistent column lengths") {
  SimTrace tr = sample_trace(5, 1);
  tr.u = Matrix::Zero(4, 2);
  CHECK_THROWS(write_trace_csv(tr, tmp_path()));
}
