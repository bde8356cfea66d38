#include <doctest.h>

#include <Eigen/Core>

#include "chase/kernels.hpp"
#include "chase/rng.hpp"

using namespace chase;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("omp and serial matvec agree bit-for-bit") {
  for (const auto [rows, cols] : {std::pair{3, 7}, {257, 129}, {400, 900}}) {
    const Eigen::MatrixXd A = random_matrix(rows, cols, rows * 1000 + cols);
    Rng rng(11);
    Eigen::VectorXd x(cols), r(rows);
    for (int i = 0; i < cols; ++i) x[i] = rng.normal();
    for (int i = 0; i < rows; ++i) r[i] = rng.normal();

    Eigen::VectorXd y1, y2;
    kernels::matvec_serial(A, x, y1);
    kernels::matvec(A, x, y2);
    CHECK(y1 == y2);

    Eigen::VectorXd t1, t2;
    kernels::matvec_t_serial(A, r, t1);
    kernels::matvec_t(A, r, t2);
    CHECK(t1 == t2);
  }
}

TEST_CASE("matvec matches the Eigen product") {
  const Eigen::MatrixXd A = random_matrix(57, 83, 42);
  Rng rng(12);
  Eigen::VectorXd x(83);
  for (int i = 0; i < 83; ++i) x[i] = rng.normal();
  Eigen::VectorXd y;
  kernels::matvec(A, x, y);
  const Eigen::VectorXd expected = A * x;
  CHECK((y - expected).lpNorm<Eigen::Infinity>() <=
        1e-14 * expected.lpNorm<Eigen::Infinity>());
}

TEST_CASE("omp and serial channel fills agree bit-for-bit") {
  Eigen::MatrixXd a, b;
  kernels::fill_rayleigh_pathloss_serial(a, 17, 30.0, 3.0, 0.5, 15.0, 404);
  kernels::fill_rayleigh_pathloss(b, 17, 30.0, 3.0, 0.5, 15.0, 404);
  CHECK(a == b);
}

}  // TEST_SUITE
