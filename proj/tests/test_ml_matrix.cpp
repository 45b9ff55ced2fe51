#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fracsys/errors.hpp"
#include "fracsys/frac_ops.hpp"
#include "fracsys/ml_matrix.hpp"
#include "fracsys/ml_scalar.hpp"
#include "support/reference.hpp"

using namespace fracsys;

namespace {

double rel(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

Mat mat2(cplx a, cplx b, cplx c, cplx d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("diagonal and canonical blocks") {
  Mat d = mat2(2, 0, 0, 3);
  JordanForm jf = jordan_decompose(d);
  CHECK(jf.transform.isApprox(Mat::Identity(2, 2)));
  REQUIRE(jf.blocks.size() == 2);
  CHECK(jf.blocks[0].lambda == cplx(2));
  CHECK(jf.blocks[1].lambda == cplx(3));

  JordanForm j5 = jordan_decompose(mat2(5, 1, 0, 5));
  REQUIRE(j5.blocks.size() == 1);
  CHECK(j5.blocks[0].size == 2);
  CHECK(std::abs(j5.blocks[0].lambda - 5.0) < 1e-12);
  CHECK(rel(j5.reconstruct(), mat2(5, 1, 0, 5)) < 1e-12);
}

TEST_CASE("reconstruction of random matrices") {
  std::mt19937_64 rng(17);
  for (int m : {2, 3, 5, 8}) {
    for (int rep = 0; rep < 5; ++rep) {
      Mat z = ref::random_matrix(rng, m, 2.0);
      JordanForm jf = jordan_decompose(z);
      int total = 0;
      for (auto& b : jf.blocks) {
        CHECK(b.size == 1);
        total += b.size;
      }
      CHECK(total == m);
      CHECK((jf.reconstruct() - z).norm() <= 1e-8 * z.norm());
      CHECK((jf.transform * jf.inverse - Mat::Identity(m, m)).norm() < 1e-10);
    }
  }
}

TEST_CASE("defective triangular structure") {
  Mat z(4, 4);
  z << 2, 1, 0, 0,
       0, 2, 1, 0,
       0, 0, 2, 0,
       0, 0, 0, -1;
  JordanForm jf = jordan_decompose(z);
  int big = 0;
  for (auto& b : jf.blocks) big = std::max(big, b.size);
  CHECK(big == 3);
  CHECK(rel(jf.reconstruct(), z) < 1e-10);
}

TEST_CASE("clustered eigenvalues without structure are refused") {
  Mat z = mat2(1, 1, 1e-13, 1);
  try {
    jordan_decompose(z);
    FAIL("expected an ill-conditioned decomposition");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IllConditioned);
  }
}

TEST_CASE("matrix ML reduces to the exponential at beta = nu = 1") {
  std::mt19937_64 rng(23);
  for (int m : {2, 3, 4, 6}) {
    Mat z = ref::random_matrix(rng, m, 1.5);
    Mat e = matrix_ml(1.0, 1.0, 1.0, jordan_decompose(z));
    CHECK(rel(e, ref::expm(z)) < 1e-10);
  }
  // defective case
  Mat j = mat2(0.3, 1, 0, 0.3);
  CHECK(rel(matrix_ml(1.0, 1.0, 1.0, jordan_decompose(j)), ref::expm(j)) < 1e-12);
}

TEST_CASE("scalar and single block forms") {
  Mat one(1, 1);
  one(0, 0) = cplx(-0.7, 0.2);
  Mat s = matrix_ml(0.6, 1.3, 0.8, jordan_decompose(one));
  CHECK(std::abs(s(0, 0) - ml({0.6, 1.3}, one(0, 0) * std::pow(0.8, 0.6))) < 1e-14);

  JordanForm jf;
  jf.transform = Mat::Identity(2, 2);
  jf.inverse = jf.transform;
  jf.blocks = {{cplx(-1.5), 2}};
  Mat b = matrix_ml(0.7, 1.0, 1.0, jf);
  CHECK(std::abs(b(0, 0) - ml({0.7, 1}, -1.5)) < 1e-14);
  CHECK(std::abs(b(0, 1) - ml_deriv({0.7, 1}, -1.5, 1)) < 1e-12);
  CHECK(std::abs(b(1, 0)) == 0.0);
  CHECK(std::abs(b(1, 1) - ml({0.7, 1}, -1.5)) < 1e-14);
}

TEST_CASE("vector-indexed ML") {
  Mat one(1, 1);
  one(0, 0) = cplx(0.4, -1.1);
  CHECK(std::abs(vector_indexed_ml({0.6}, {1.2}, one)(0, 0) - ml({0.6, 1.2}, one(0, 0))) < 1e-13);

  Mat zero = Mat::Zero(3, 3);
  Mat d = vector_indexed_ml({0.3, 0.5, 0.9}, {1.0, 0.5, 2.0}, zero);
  CHECK(std::abs(d(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(d(1, 1) - 1.0 / std::tgamma(0.5)) < 1e-15);
  CHECK(std::abs(d(2, 2) - 1.0) < 1e-15);
  CHECK(std::abs(d(0, 1)) == 0.0);

  std::mt19937_64 rng(29);
  Mat z = ref::random_matrix(rng, 3, 1.0);
  Mat v = vector_indexed_ml({0.7, 0.7, 0.7}, {1.1, 1.1, 1.1}, z);
  CHECK(rel(v, matrix_ml(0.7, 1.1, 1.0, jordan_decompose(z))) < 1e-12);
}

TEST_CASE("unequal orders do not commute with the Jordan transform") {
  Mat z = mat2(-1.0, 0.5, 0.8, -0.3);
  JordanForm jf = jordan_decompose(z);
  Mat inner = jf.jordan_matrix();
  std::vector<double> b{0.5, 0.8}, v{1.0, 1.0};
  Mat direct = vector_indexed_ml(b, v, z);
  Mat through = jf.transform * vector_indexed_ml(b, v, inner) * jf.inverse;
  CHECK((direct - through).norm() > 1e-3);
  // equal orders: same construction agrees
  std::vector<double> e{0.5, 0.5};
  CHECK(rel(vector_indexed_ml(e, v, z), jf.transform * vector_indexed_ml(e, v, inner) * jf.inverse) <
        1e-12);
}

TEST_CASE("Laplace transform of the matrix ML") {
  std::mt19937_64 rng(31);
  for (auto [beta, nu] : {std::pair{0.6, 1.0}, std::pair{0.8, 0.8}, std::pair{0.5, 1.4}}) {
    Mat z = ref::random_matrix(rng, 3, 1.0);
    JordanForm jf = jordan_decompose(z);
    double rho = 0.0;
    for (auto& b : jf.blocks) rho = std::max(rho, std::abs(b.lambda));
    const double s = 2.0 * std::pow(1.0 + rho, 1.0 / beta);
    const double t_cut = 60.0 / (s - std::pow(rho, 1.0 / beta));
    Mat expect = std::pow(s, beta - nu) *
                 (std::pow(s, beta) * Mat::Identity(3, 3) - z).inverse();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        auto f = [&, i, j](double t) -> cplx {
          if (t == 0.0) return nu == 1.0 ? cplx(i == j ? 1.0 : 0.0) : cplx(0.0);
          return std::pow(t, nu - 1.0) * matrix_ml(beta, nu, t, jf)(i, j);
        };
        cplx got = laplace_numeric(f, s, t_cut, 1e-8).value;
        CAPTURE(beta);
        CAPTURE(i);
        CAPTURE(j);
        CHECK(std::abs(got - expect(i, j)) <= 1e-6 * std::max(std::abs(expect(i, j)), 1e-3 * expect.norm()));
      }
  }
}

TEST_CASE("Jordan block rows transform to powers of the resolvent") {
  const double beta = 0.7, nu = 1.0;
  const cplx lam(-0.8, 0.3);
  JordanForm jf;
  jf.transform = Mat::Identity(3, 3);
  jf.inverse = jf.transform;
  jf.blocks = {{lam, 3}};
  for (double s : {4.0, 8.0}) {
    for (int r = 0; r < 3; ++r) {
      auto f = [&](double t) -> cplx {
        if (t == 0.0) return r == 0 ? cplx(1.0) : cplx(0.0);
        return std::pow(t, nu - 1.0) * matrix_ml(beta, nu, t, jf)(0, r);
      };
      cplx got = laplace_numeric(f, s, 40.0 / s, 1e-8).value;
      cplx want = std::pow(s, beta - nu) / std::pow(std::pow(s, beta) - lam, r + 1);
      CHECK(std::abs(got - want) <= 1e-6 * std::abs(want));
    }
  }
}
