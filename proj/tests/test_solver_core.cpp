#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fracsys/errors.hpp"
#include "fracsys/ml_scalar.hpp"
#include "fracsys/oracles.hpp"
#include "fracsys/solver_core.hpp"
#include "fracsys/symbol_algebra.hpp"
#include "support/reference.hpp"

using namespace fracsys;

namespace {

SystemSpec make_spec(MultiOrder b, Mat f, Vec phi, Mode mode = Mode::Caputo) {
  SystemSpec s;
  s.orders = std::move(b);
  s.matrix = std::move(f);
  s.initial = std::move(phi);
  s.mode = mode;
  return s;
}

Mat mat2(cplx a, cplx b, cplx c, cplx d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

Vec vec2(cplx a, cplx b) {
  Vec v(2);
  v << a, b;
  return v;
}

double sup_op(const OperatorSamples& a, const OperatorSamples& b, std::size_t from = 0) {
  double m = 0;
  for (std::size_t i = from; i < a.grid.size(); ++i) m = std::max(m, (a.full(i) - b.full(i)).norm());
  return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Consistency;
}

std::vector<double> random_orders(std::mt19937_64& rng, int m, double lo = 0.2) {
  std::uniform_real_distribution<double> u(lo, 1.0);
  std::vector<double> b;
  for (int j = 0; j < m; ++j) b.push_back(u(rng));
  return b;
}

}  // namespace

TEST_CASE("operators start at the identity") {
  const auto grid = uniform_grid(1.0, 16);
  Mat f = mat2(-1.0, 0.0, 0.5, -0.7);
  Mat id = Mat::Identity(2, 2);
  CHECK(series_operator({0.5, 0.8}, f, Mode::Caputo, grid).values[0] == id);
  CHECK(commensurate_operator(0.6, f, Mode::Caputo, grid).values[0] == id);
  CHECK(triangular_operator({0.5, 0.8}, f, Mode::Caputo, grid).values[0] == id);
  CHECK(talbot_operator({0.5, 0.8}, f, Mode::Caputo, grid).values[0] == id);
  CHECK(rational_operator(MultiOrder::rational({{1, 2}, {1, 3}}), f, Mode::Caputo, grid).values[0] == id);
  // RL columns are stored against t^{beta_l - 1}; the stored origin value is diag(1/Gamma(beta_l))
  auto rl = series_operator({0.5, 0.8}, f, Mode::RL, grid);
  CHECK(std::abs(rl.values[0](0, 0) - 1.0 / std::tgamma(0.5)) < 1e-15);
  CHECK(std::abs(rl.values[0](1, 1) - 1.0 / std::tgamma(0.8)) < 1e-15);
  CHECK(std::abs(rl.values[0](1, 0)) == 0.0);
}

TEST_CASE("rational reduction counts") {
  auto r = reduce_rational(std::vector<std::pair<long, long>>{{1, 2}, {2, 3}, {1, 5}, {6, 7}});
  CHECK(r.p == 210);
  CHECK(r.n_total == 467);
  CHECK(r.n == std::vector<long>{105, 140, 42, 180});
  auto r5 = reduce_rational(MultiOrder::rational({{1, 2}, {1, 3}}));
  CHECK(r5.p == 6);
  CHECK(r5.n_total == 5);
  auto r1 = reduce_rational(MultiOrder::rational({{1, 1}, {1, 1}}));
  CHECK(r1.p == 1);
  CHECK(r1.n_total == 2);
  // unreduced input is reduced first
  auto rr = reduce_rational(std::vector<std::pair<long, long>>{{2, 4}, {3, 9}});
  CHECK(rr.p == 6);
  CHECK(kind_of([] { reduce_rational(MultiOrder({0.5, 0.3})); }) == ErrorKind::RequiresRational);
}

TEST_CASE("augmented companion systems") {
  Mat one(1, 1);
  one(0, 0) = cplx(-0.4, 0.1);
  // a single order 1/2 is already commensurate with itself
  AugmentedSystem a1 = build_augmented(MultiOrder::rational({{1, 2}}), one);
  CHECK(a1.p == 2);
  CHECK(a1.matrix == one);
  // the order-1/2 companion form belongs to beta = 1 split in two halves
  AugmentedSystem c2 = build_augmented(MultiOrder::rational({{1, 1}}), one, 2);
  CHECK(c2.order == 0.5);
  CHECK(c2.matrix == mat2(0, 1, one(0, 0), 0));
  AugmentedSystem c4 = build_augmented(MultiOrder::rational({{1, 2}}), one, 4);
  CHECK(c4.order == 0.25);
  CHECK(c4.matrix == mat2(0, 1, one(0, 0), 0));

  // two-order example with Delta the Laplacian symbol and sqrt(-Delta) the coupling
  const double delta = -2.25, root = 1.5;
  Mat f = mat2(delta, 0, root, delta);
  AugmentedSystem a5 = build_augmented(MultiOrder::rational({{1, 2}, {1, 3}}), f);
  Mat want(5, 5);
  want << 0, 1, 0, 0, 0,
          0, 0, 1, 0, 0,
          delta, 0, 0, 0, 0,
          0, 0, 0, 0, 1,
          root, 0, 0, delta, 0;
  CHECK(a5.matrix == want);
  CHECK(a5.heads == std::vector<int>{0, 3});
  CHECK(a5.lasts == std::vector<int>{2, 4});
  Vec lifted = a5.lift(vec2(2.0, 3.0), Mode::Caputo);
  CHECK(lifted(0) == cplx(2.0));
  CHECK(lifted(3) == cplx(3.0));
  CHECK(lifted.norm() == doctest::Approx(std::sqrt(13.0)));
  Vec rl = a5.lift(vec2(2.0, 3.0), Mode::RL);
  CHECK(rl(2) == cplx(2.0));
  CHECK(rl(4) == cplx(3.0));
  CHECK(a5.extract(lifted) == vec2(2.0, 3.0));
}

TEST_CASE("augmented spectrum reproduces the characteristic function") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> re(1.5, 6.0), im(-3, 3);
  for (auto q : {std::vector<std::pair<long, long>>{{1, 2}, {1, 3}},
                 std::vector<std::pair<long, long>>{{1, 2}, {2, 3}, {1, 5}}}) {
    MultiOrder b = MultiOrder::rational(q);
    Mat f = ref::random_matrix(rng, b.size(), 1.0);
    AugmentedSystem aug = build_augmented(b, f);
    FrExpPoly psi = char_function(b.values, f);
    const auto n = aug.matrix.rows();
    for (int rep = 0; rep < 20; ++rep) {
      cplx s(re(rng), im(rng));
      cplx lam = cpow(s, 1.0 / static_cast<double>(aug.p));
      cplx det = (lam * Mat::Identity(n, n) - aug.matrix).determinant();
      cplx want = psi.eval(s);
      CHECK(std::abs(det - want) <= 1e-10 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("commensurate operator") {
  const double beta = 0.7;
  const cplx lam(-0.6, 0.2);
  auto grid = uniform_grid(1.0, 32);
  auto s = commensurate_operator(beta, mat2(lam, 1.0, 0.0, lam), Mode::Caputo, grid);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double t = grid[i], tb = std::pow(t, beta);
    CHECK(std::abs(s.values[i](0, 0) - ml({beta, 1}, lam * tb)) < 1e-13);
    CHECK(std::abs(s.values[i](0, 1) - tb * ml_deriv({beta, 1}, lam * tb, 1)) < 1e-11);
    CHECK(std::abs(s.values[i](1, 0)) < 1e-15);
  }

  // diagonalizable: combinations of E_beta(lambda_l t^beta)
  Mat f = mat2(-1.0, 0.4, 0.3, -0.2);
  Eigen::ComplexEigenSolver<Mat> es(f);
  auto d = commensurate_operator(0.5, f, Mode::Caputo, grid);
  for (std::size_t i = 1; i < grid.size(); i += 7) {
    Mat diag = Mat::Zero(2, 2);
    for (int l = 0; l < 2; ++l) diag(l, l) = ml({0.5, 1}, es.eigenvalues()(l) * std::sqrt(grid[i]));
    Mat want = es.eigenvectors() * diag * es.eigenvectors().inverse();
    CHECK((d.values[i] - want).norm() < 1e-12);
  }

  // RL blocks t^{beta-1} E_{beta,beta}
  auto r = commensurate_operator(beta, mat2(lam, 0.0, 0.0, -1.0), Mode::RL, grid);
  for (std::size_t i = 1; i < grid.size(); i += 5) {
    double t = grid[i];
    CHECK(std::abs(r.full(i)(0, 0) - std::pow(t, beta - 1) * ml({beta, beta}, lam * std::pow(t, beta))) <
          1e-12);
  }
}

TEST_CASE("classical limit") {
  std::mt19937_64 rng(67);
  auto grid = uniform_grid(1.0, 16);
  for (int m : {2, 3, 4}) {
    Mat f = ref::random_matrix(rng, m, 1.5);
    std::vector<double> ones(static_cast<std::size_t>(m), 1.0);
    std::vector<std::pair<long, long>> q(static_cast<std::size_t>(m), {1, 1});
    auto se = series_operator(ones, f, Mode::Caputo, grid);
    auto co = commensurate_operator(1.0, f, Mode::Caputo, grid);
    auto ra = rational_operator(MultiOrder::rational(q), f, Mode::Caputo, grid);
    auto tb = talbot_operator(ones, f, Mode::Caputo, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Mat e = ref::expm(grid[i] * f);
      CAPTURE(m);
      CAPTURE(i);
      CHECK((se.values[i] - e).norm() <= 1e-10 * e.norm());
      CHECK((co.values[i] - e).norm() <= 1e-10 * e.norm());
      CHECK((ra.values[i] - e).norm() <= 1e-10 * e.norm());
      CHECK((tb.values[i] - e).norm() <= 1e-8 * e.norm());
    }
  }
}

TEST_CASE("method agreement") {
  std::mt19937_64 rng(71);
  auto grid = uniform_grid(1.0, 64);
  for (int rep = 0; rep < 4; ++rep) {
    const int m = 2 + rep % 2;
    for (Mode mode : {Mode::Caputo, Mode::RL}) {
      auto b = random_orders(rng, m);
      Mat f = ref::random_matrix(rng, m, 1.0);
      auto se = series_operator(b, f, mode, grid);
      auto tb = talbot_operator(b, f, mode, grid);
      CAPTURE(rep);
      CHECK(se.method == "series");
      CHECK(sup_op(se, tb, 1) < 1e-6);

      // equal orders: series against the Jordan construction
      std::vector<double> eq(static_cast<std::size_t>(m), b[0]);
      CHECK(sup_op(series_operator(eq, f, mode, grid), commensurate_operator(b[0], f, mode, grid), 1) < 1e-8);
    }
  }

  // rational path, augmented Jordan and residue forms
  for (int rep = 0; rep < 3; ++rep) {
    Mat f = ref::random_matrix(rng, 2, 1.0);
    MultiOrder b = MultiOrder::rational({{1, 2}, {1, 3}});
    for (Mode mode : {Mode::Caputo, Mode::RL}) {
      auto se = series_operator(b.values, f, mode, grid);
      auto ra = rational_operator(b, f, mode, grid);
      CHECK(ra.info.at("augmented_size") == "5");
      CHECK(sup_op(se, ra, 1) < 1e-6);
      RationalOptions po;
      po.partial_fractions = true;
      CHECK(sup_op(se, rational_operator(b, f, mode, grid, po), 1) < 1e-6);
    }
    // B = (1/2, 1/2) against the commensurate form
    MultiOrder half = MultiOrder::rational({{1, 2}, {1, 2}});
    CHECK(sup_op(rational_operator(half, f, Mode::Caputo, grid),
                 commensurate_operator(0.5, f, Mode::Caputo, grid)) < 1e-8);
  }

  // against the predictor-corrector on a full trajectory
  auto fine = uniform_grid(1.0, 256);
  SystemSpec spec = make_spec(MultiOrder({0.5, 0.8}), mat2(-0.6, 0.3, -0.2, -0.5), vec2(1.0, -0.5));
  CHECK(max_deviation(solve_series(spec, fine), adams_pc(spec, fine, 8)) < 1e-4);
}

TEST_CASE("large times fall back to the inverse transform") {
  Mat f = mat2(-1.0, 0.8, 0.6, -1.2);
  auto grid = uniform_grid(40.0, 40);
  auto s = series_operator({0.4, 0.9}, f, Mode::Caputo, grid);
  CHECK(s.method.find("talbot") != std::string::npos);
  CHECK(sup_op(s, talbot_operator({0.4, 0.9}, f, Mode::Caputo, grid)) < 1e-6);
}

TEST_CASE("triangular closed forms") {
  const double b1 = 0.6, b2 = 0.85;
  const cplx f11 = -0.9, f21 = 0.7, f22 = cplx(-0.4, 0.3);
  Mat f = mat2(f11, 0, f21, f22);
  auto grid = uniform_grid(1.0, 512);
  auto c = triangular_operator({b1, b2}, f, Mode::Caputo, grid);
  auto r = triangular_operator({b1, b2}, f, Mode::RL, grid);
  double ec = 0, er = 0;
  for (std::size_t i = 1; i < grid.size(); i += 17) {
    const double t = grid[i];
    Mat want(2, 2);
    want << ml({b1, 1}, f11 * std::pow(t, b1)), 0,
        f21 * ref::conv_series(b1, 1.0, f11, b2, b2, f22, t), ml({b2, 1}, f22 * std::pow(t, b2));
    ec = std::max(ec, (c.full(i) - want).norm());
    Mat wr(2, 2);
    wr << std::pow(t, b1 - 1) * ml({b1, b1}, f11 * std::pow(t, b1)), 0,
        f21 * ref::conv_series(b1, b1, f11, b2, b2, f22, t),
        std::pow(t, b2 - 1) * ml({b2, b2}, f22 * std::pow(t, b2));
    er = std::max(er, (r.full(i) - wr).norm());
  }
  CHECK(ec < 1e-7);
  CHECK(er < 1e-7);

  // upper triangular runs the recurrence from the last component
  Mat u = f.transpose();
  auto up = triangular_operator({b2, b1}, u, Mode::Caputo, grid);
  auto ser = series_operator({b2, b1}, u, Mode::Caputo, grid);
  CHECK(sup_op(up, ser) < 1e-7);

  CHECK(kind_of([&] { triangular_operator({b1, b2}, mat2(1, 1, 1, 1), Mode::Caputo, grid); }) ==
        ErrorKind::WrongStructure);
  CHECK(is_lower_triangular(f));
  CHECK(!is_upper_triangular(f));
  CHECK(is_upper_triangular(mat2(1, 2, 1e-16, 1)));
}

TEST_CASE("blood alcohol model") {
  const double alpha = 0.9, beta = 0.8;
  SystemSpec spec = make_spec(MultiOrder({alpha, beta}), mat2(-1, 0, 1, -1), vec2(1.0, 0.0));
  auto grid = uniform_grid(1.0, 256);
  Trajectory tr = solve_triangular(spec, grid);
  double worst = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    cplx a = ml({alpha, 1}, -std::pow(t, alpha));
    cplx b = t == 0 ? 0.0 : ref::conv_series(alpha, 1.0, -1.0, beta, beta, -1.0, t);
    worst = std::max({worst, std::abs(tr.states[i](0) - a), std::abs(tr.states[i](1) - b)});
  }
  CHECK(worst < 1e-6);
  CHECK(max_deviation(tr, adams_pc(spec, grid, 8)) < 1e-4);
}

TEST_CASE("forced systems") {
  auto grid = uniform_grid(1.0, 512);
  Mat f = mat2(-0.8, 0.3, 0.2, -0.5);
  SystemSpec spec = make_spec(MultiOrder({0.6, 0.9}), f, vec2(1.0, 0.5));
  Trajectory free = solve_series(spec, grid);
  spec.forcing = [](double) { return Vec(Vec::Zero(2)); };
  CHECK(max_deviation(solve_series(spec, grid), free) < 1e-15);

  // manufactured solution u_j = t^{1 + b_j}
  const double b[2] = {0.6, 0.9};
  auto exact = [&](double t) {
    Vec u(2);
    for (int j = 0; j < 2; ++j) u(j) = std::pow(t, 1 + b[j]);
    return u;
  };
  spec.initial = Vec::Zero(2);
  spec.forcing = [&](double t) {
    Vec h(2);
    for (int j = 0; j < 2; ++j) h(j) = std::tgamma(2 + b[j]) * t;
    return Vec(h - f * exact(t));
  };
  Trajectory tr = solve_series(spec, grid);
  double worst = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, (tr.states[i] - exact(grid[i])).norm());
  CHECK(worst < 1e-4);

  // scalar ramp: J^{1/2} t
  Mat zero = Mat::Zero(1, 1);
  Vec phi = Vec::Zero(1);
  SystemSpec ramp = make_spec(MultiOrder({0.5}), zero, phi);
  ramp.forcing = [](double t) { return Vec(Vec::Constant(1, t)); };
  Trajectory rs = solve_series(ramp, grid);
  Trajectory ad = adams_pc(ramp, grid, 4);
  double dr = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    dr = std::max(dr, std::abs(rs.states[i](0) - std::pow(grid[i], 1.5) / std::tgamma(2.5)));
  CHECK(dr < 1e-4);
  CHECK(max_deviation(rs, ad) < 1e-4);

  // RL: U = J^beta H for F = 0
  SystemSpec rl = make_spec(MultiOrder({0.7}), zero, phi, Mode::RL);
  rl.forcing = [](double) { return Vec(Vec::Ones(1)); };
  Trajectory rt = solve_series(rl, grid);
  double dl = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    dl = std::max(dl, std::abs(rt.states[i](0) - std::pow(grid[i], 0.7) / std::tgamma(1.7)));
  CHECK(dl < 1e-6);

  SystemSpec bad = spec;
  bad.forcing = [](double t) { return Vec(Vec::Constant(2, t > 0.5 ? NAN : 0.0)); };
  CHECK(kind_of([&] { solve_series(bad, grid); }) == ErrorKind::InvalidForcing);
}

TEST_CASE("solver preconditions") {
  auto grid = uniform_grid(1.0, 8);
  SystemSpec spec = make_spec(MultiOrder({0.5, 0.7}), mat2(-1, 0.2, 0.1, -1), vec2(1, 1));
  CHECK(kind_of([&] { solve_rational(spec, grid); }) == ErrorKind::RequiresRational);
  CHECK(kind_of([&] { solve_commensurate(spec, grid); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { solve_triangular(spec, grid); }) == ErrorKind::WrongStructure);
  CHECK(kind_of([&] { MultiOrder({0.5, 1.5}).validate(); }) == ErrorKind::InvalidOrder);
  SystemSpec wrong = spec;
  wrong.initial = Vec::Ones(3);
  CHECK(kind_of([&] { solve_series(wrong, grid); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("pointwise solution operators") {
  Mat f = mat2(-0.7, 0.4, 0.1, -0.3);
  const std::vector<double> b{0.5, 0.75};
  auto grid = uniform_grid(1.0, 8);
  auto se = SolutionOperator::series(b, f, Mode::Caputo);
  auto tb = SolutionOperator::talbot(b, f, Mode::Caputo);
  CHECK(se.method() == "series");
  CHECK(tb.method() == "talbot");
  auto sampled = series_operator(b, f, Mode::Caputo, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK((se.evaluate(grid[i]) - sampled.values[i]).norm() < 1e-14);
    if (i > 0) CHECK((tb.evaluate(grid[i]) - sampled.values[i]).norm() < 1e-8);
  }
  auto co = SolutionOperator::commensurate(0.5, f, Mode::Caputo);
  auto ra = SolutionOperator::rational(MultiOrder::rational({{1, 2}, {1, 2}}), f, Mode::Caputo);
  CHECK((co.evaluate(0.3) - ra.evaluate(0.3)).norm() < 1e-10);
}
