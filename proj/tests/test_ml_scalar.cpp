#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fracsys/errors.hpp"
#include "fracsys/ml_scalar.hpp"
#include "support/reference.hpp"

using namespace fracsys;

namespace {

struct Frozen {
  double beta, nu;
  cplx z;
  int k;
  cplx value;
};

// mpmath at 40+ significant digits (series summed at whatever precision the
// largest term needs), rounded to double
const Frozen kFrozen[] = {
    {0.9, 1.0, {-17.69691699001463, -8.660847167108413}, 0, {0.005075047906299557, -0.002758837123185915}},
    {0.2, 2.2, {-0.6687304629889319, 0.0}, 0, {0.5679901057769927, 0.0}},
    {1.7, 1.5, {-2.567130311680095, 0.0}, 2, {0.05973878738580189, 0.0}},
    {0.2, 2.2, {-2.2850621359285106, 0.0}, 0, {0.29687020264408465, 0.0}},
    {0.75, 1.5, {4.11041542959843, 1.9631156730767452}, 0, {-178.70400988014984, -179.4085576142325}},
    {0.2, 2.2, {2.679747210027956, 0.5412707042446094}, 1, {-1.9865420478316585e+36, 2.953914858181589e+36}},
    {1.3, 1.0, {-1.7520635529638742, -3.7092046347246668}, 0, {-0.8061033031795615, -0.0907232584984748}},
    {0.75, 2.2, {-26.316556119416152, 0.0}, 0, {0.04178991025478297, 0.0}},
    {0.4, 2.2, {2.9337365902187478, -4.493467036277558}, 1, {-0.03164742550454862, 0.03324878823460087}},
    {0.2, 0.5, {-2.1834364257545493, 2.170365488255313}, 0, {0.0773121189988023, 0.06366458102857174}},
    {1.3, 2.2, {-2.5285070075023865, 0.0}, 0, {0.4140188407755038, 0.0}},
    {0.9, 0.5, {8.424404600702228, 7.05165263590322}, 0, {-65424.56207244383, -99385.01199459477}},
    {0.75, 1.0, {-3.0190696866723057, 1.7392800125167294}, 0, {0.08368736433596036, 0.06322468908481546}},
    {1.3, 1.5, {-8.38961179103768, -9.75155513235993}, 2, {0.007525036502462552, 0.012344501036083436}},
    {0.75, 1.5, {-10.399484361118049, 0.0}, 0, {0.07824574034614622, 0.0}},
    {0.5, 1.0, {-5.423259937791157, -0.41184190357794065}, 0, {0.10180346674062, -0.007489154511313519}},
    {0.75, 1.0, {0.8438601791614292, 0.18634926862725967}, 0, {2.704555227587802, 0.69985032486476}},
    {0.5, 2.2, {1.9015027143122782, 29.584963345325818}, 2, {7.86190185965962e-06, -8.467844766427081e-05}},
    {1.0, 1.5, {12.044910380258893, -1.4046770920604663}, 0, {10866.662755361918, -47661.22861112084}},
    {0.4, 1.0, {-5.287944039276874, 0.0}, 0, {0.11836806073259763, 0.0}},
    {0.5, 2.2, {-2.872371896423584, 0.0}, 0, {0.279675214572682, 0.0}},
    {1.0, 1.0, {11.490848945854399, 8.602669761838271}, 0, {-66581.5942280831, 71658.68050292299}},
    {1.3, 1.5, {-14.77312236427995, 0.0}, 0, {0.01306870635061659, 0.0}},
    {0.75, 1.5, {-1.2142175833056712, -4.200536831514713}, 0, {0.050881456668333484, -0.18168866805789696}},
    {0.5, 2.2, {0.7128095918549876, -2.2868405178184825}, 0, {0.06742352822904388, -0.5057584448356037}},
    {0.75, 2.2, {-13.66974888311408, 0.0}, 2, {0.0007511641328075797, 0.0}},
    {1.7, 1.0, {-1.218383886383863, 4.951514957273025}, 0, {-1.3578896082494387, 1.4896734476607167}},
    {0.6, 1.5, {1.9973289642318224, -0.09064705661697643}, 0, {21.170617800952975, -4.4644928694415045}},
    {0.75, 1.5, {2.611943553302448, 2.029688118221714}, 0, {-13.701214325755785, -2.861751131161619}},
    {0.9, 0.5, {1.2438701770135994, -0.23663314287696677}, 1, {6.645801513374784, -2.3641536227458926}},
    {0.2, 1.5, {-3.5305626662168317, -2.081341878441029}, 1, {0.02951971979875945, -0.0347344552951778}},
    {0.6, 1.5, {-3.7544380681106126, 0.0}, 1, {0.0514230716978898, 0.0}},
    {1.3, 1.5, {-2.3119966640855383, 0.0}, 0, {0.31459712997710076, 0.0}},
    {1.3, 1.0, {-36.99466798279232, 4.601281107735301}, 0, {-0.006451888068868831, -0.000851032571530435}},
    {0.5, 2.2, {-6.303455848867982, -0.5656134306104446}, 0, {0.14922773659118338, -0.011450890178246638}},
    {1.7, 1.0, {-10.061770426202369, -27.840809890270368}, 0, {12.826718155371925, -4.617155639364332}},
    {0.75, 1.0, {-0.6667592305056085, 7.738175331521317}, 2, {0.0007964471770582631, -0.00043649635471259673}},
    {1.0, 1.0, {1.684040951967407, -2.205644515848665}, 2, {-3.194955959144679, -4.337633170947442}},
    {1.7, 1.5, {-3.6549627830089606, -5.154664495459794}, 1, {0.03130736222179014, -0.2116594595115866}},
    {0.5, 2.2, {-2.4400974139416673, 0.0}, 2, {0.04745771603487848, 0.0}},
};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("exponential and trivial values") {
  CHECK(std::abs(ml({1, 1}, 1.0) - std::exp(1.0)) < 1e-14);
  CHECK(std::abs(ml({0.7, 1.3}, 0.0) - 1.0 / std::tgamma(1.3)) < 1e-15);
  double worst = 0;
  for (int i = 0; i <= 200; ++i) {
    double x = -10.0 + 0.1 * i;
    worst = std::max(worst, std::abs(ml({1, 1}, x) - std::exp(x)));
  }
  CHECK(worst <= 1e-10);
  CHECK(std::abs(ml_deriv({1, 1}, 0.5, 1) - std::exp(0.5)) < 1e-13);
}

TEST_CASE("closed forms across regimes") {
  for (double r : {0.5, 3.0, 7.0, 20.0, 45.0, 150.0})
    for (double th : {0.0, 0.9, 2.0, 3.14159}) {
      cplx z = std::polar(r, th);
      if (r > 40 && std::cos(th) > 0) continue;  // exp overflow on the comparison side
      CHECK(rel(ml({1, 1}, z), std::exp(z)) < 1e-10);
      CHECK(rel(ml({1, 2}, z), (std::exp(z) - 1.0) / z) < 1e-10);
      if (r < 40) CHECK(rel(ml({2, 1}, z), std::cosh(std::sqrt(z))) < 1e-10);
    }
  // E_{1/2}(-x) = exp(x^2) erfc(x)
  for (double x : {0.3, 2.0, 4.5, 9.0})
    CHECK(rel(ml({0.5, 1}, -x), std::exp(x * x) * std::erfc(x)) < 1e-10);
}

TEST_CASE("50-digit series oracle") {
  CHECK(std::abs(ml({0.5, 1}, -2.0) - 0.2553956763105057438650886) < 1e-12);
  CHECK(std::abs(ref::ml_hp(0.5, 1, -2.0) - 0.2553956763105057438650886) < 1e-15);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    double beta = 0.45 + 1.25 * u(rng), nu = 0.3 + 2 * u(rng);
    cplx z = std::polar(5.0 * std::sqrt(u(rng)), 6.283185307179586 * u(rng));
    CAPTURE(beta);
    CAPTURE(nu);
    CAPTURE(z);
    CHECK(rel(ml({beta, nu}, z), ref::ml_hp(beta, nu, z)) < 1e-10);
  }
}

TEST_CASE("frozen high-precision table") {
  for (const auto& f : kFrozen) {
    CAPTURE(f.beta);
    CAPTURE(f.nu);
    CAPTURE(f.z);
    CAPTURE(f.k);
    cplx v = f.k == 0 ? ml({f.beta, f.nu}, f.z) : ml_deriv({f.beta, f.nu}, f.z, f.k);
    double scale = std::max(1.0, std::abs(f.value));
    CHECK(std::abs(v - f.value) / scale < (f.k == 0 ? 1e-10 : 1e-8));
  }
}

TEST_CASE("term shift identity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    double beta = 0.2 + 1.2 * u(rng), nu = 1.0 + 2 * u(rng);
    cplx z = std::polar(10.0 * u(rng), 6.283185307179586 * u(rng));
    cplx lhs = ml({beta, nu}, z);
    cplx rhs = z * ml({beta, nu + beta}, z) + 1.0 / std::tgamma(nu);
    CAPTURE(beta);
    CAPTURE(nu);
    CAPTURE(z);
    CHECK(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)) < 1e-10);
  }
}

TEST_CASE("algebraic decay on the negative axis") {
  const double base = std::abs(ml({0.6, 1}, -1e3)) * 1e3;
  for (double x = 1e3; x <= 1e6; x *= 3.1) {
    double v = std::abs(ml({0.6, 1}, -x)) * x;
    CHECK(v < 10 * base);
    CHECK(v > base / 10);
  }
  // leading term 1 / (x Gamma(1 - beta))
  CHECK(std::abs(ml({0.6, 1}, -1e6) * 1e6 - 1.0 / std::tgamma(0.4)) < 1e-5);
}

TEST_CASE("exponential growth on the positive axis") {
  for (double x = 10; x <= 30; x += 2.5) {
    double lead = std::log(1.0 / 0.8) + std::pow(x, 1.0 / 0.8);
    double v = std::log(std::abs(ml({0.8, 1}, x)));
    CHECK(std::abs(v - lead) < 1e-6);
  }
}

TEST_CASE("derivatives") {
  CHECK(ml_deriv({0.7, 1.2}, cplx(1, 2), 0) == ml({0.7, 1.2}, cplx(1, 2)));
  // Richardson-extrapolated central second difference
  auto d2 = [](double h) {
    auto f = [](double x) { return ml({0.5, 0.5}, x); };
    return (f(1.2 + h) - 2.0 * f(1.2) + f(1.2 - h)) / (h * h);
  };
  cplx fd = (4.0 * d2(1e-3) - d2(2e-3)) / 3.0;
  CHECK(std::abs(ml_deriv({0.5, 0.5}, 1.2, 2) - fd) / std::abs(fd) < 1e-7);
  CHECK(std::abs(ml_deriv({0.5, 0.5}, 1.2, 2) - 119.2894890466313559472659) < 1e-9);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    double beta = 0.5 + 0.5 * u(rng), nu = 0.5 + 1.5 * u(rng);
    cplx z = std::polar(10.0 * u(rng), 6.283185307179586 * u(rng));
    double h = 1e-4 * std::max(1.0, std::abs(z));
    auto f = [&](cplx w) { return ml({beta, nu}, w); };
    cplx d1 = (f(z + h) - f(z - h)) / (2 * h), d2 = (f(z + 2 * h) - f(z - 2 * h)) / (4 * h);
    cplx fd = (4.0 * d1 - d2) / 3.0;
    CAPTURE(z);
    CHECK(std::abs(ml_deriv({beta, nu}, z, 1) - fd) / std::max(1.0, std::abs(fd)) < 1e-6);
  }
}

TEST_CASE("kernel form") {
  // t^{k beta + nu - 1} E^{(k)}(lambda t^beta) / k!
  double t = 0.7;
  cplx lam(-0.4, 0.3);
  cplx direct = std::pow(t, 2 * 0.6 + 1.1 - 1) * ml_deriv({0.6, 1.1}, lam * std::pow(t, 0.6), 2) / 2.0;
  CHECK(std::abs(ml_kernel_t(0.6, 1.1, 2, lam, t) - direct) < 1e-13);
  // high orders stay available in the Taylor regime
  CHECK(std::isfinite(std::abs(ml_kernel({0.5, 1}, 0.3, 40))));
}

TEST_CASE("rejected inputs") {
  auto kind = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Consistency;
  };
  CHECK(kind([] { ml({0.5, 1}, cplx(NAN, 0)); }) == ErrorKind::InvalidArgument);
  CHECK(kind([] { ml({2.5, 1}, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind([] { ml({0.5, -1}, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind([] { ml_deriv({0.5, 1}, 1.0, 21); }) == ErrorKind::UnsupportedOrder);
  CHECK(kind([] { ml({0.5, 1}, 800.0); }) == ErrorKind::AccuracyLoss);
}
