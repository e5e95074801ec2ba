#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qkz/specfn.hpp"

using namespace qkz;

namespace {

double rel_err(cplx got, cplx want) {
  double scale = std::max(std::abs(want), 1e-30);
  return std::abs(got - want) / scale;
}

}  // namespace

// Reference values computed independently with 40-digit arithmetic against
// the same integral representation, cross-checked there via the functional
// equations and the Barnes G identity at equal periods.

TEST_CASE("double sine reference values") {
  PeriodTriple w(2.0, 2.0 * pi);
  CHECK(rel_err(double_sine(cplx(0.7, 0.3), w),
                cplx(1.146206807172886130544, 0.3743912190742072225779)) < 1e-12);
  CHECK(rel_err(double_sine(cplx(-2.6, 0.7), w),
                cplx(2.650995026320831169178, -2.629918673355847634841)) < 1e-12);
  CHECK(rel_err(double_sine(cplx(8.9, -1.2), w),
                cplx(-0.1764943031026695214487, -0.2201781496237096358838)) < 1e-12);
}

TEST_CASE("triple sine reference values") {
  PeriodTriple w(2.0, 2.0 * pi, 2.0 * pi);
  CHECK(rel_err(triple_sine(cplx(1.1, -0.2), w),
                cplx(1.237272473775118375453, -0.1271897546818034852423)) < 1e-12);
  CHECK(rel_err(triple_sine(cplx(-1.4, 0.3), w),
                cplx(-1.443085325998498438219, -0.2307400340650472896795)) < 1e-12);
  CHECK(rel_err(triple_sine(cplx(15.1, 0.4), w),
                cplx(-0.8759089984147593357622, -0.5915819432310341699843)) < 1e-12);
}

TEST_CASE("double sine functional equations on random strip points") {
  PeriodTriple w(2.0, 2.0 * pi);
  const double wsum = w.sum();
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> ure(0.3, wsum - w.omega[0] - 0.3);
  std::uniform_real_distribution<double> uim(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    cplx x(ure(rng), uim(rng));
    cplx s = double_sine(x, w);
    // shift by each period
    CHECK(rel_err(double_sine(x + w.omega[0], w), s / (2.0 * std::sin(pi * x / w.omega[1]))) < 1e-10);
    CHECK(rel_err(double_sine(x + w.omega[1], w), s / (2.0 * std::sin(pi * x / w.omega[0]))) < 1e-10);
    // reflection
    CHECK(rel_err(double_sine(wsum - x, w) * s, 1.0) < 1e-10);
    // real coefficients
    CHECK(rel_err(double_sine(std::conj(x), w), std::conj(s)) < 1e-12);
  }
  CHECK(rel_err(double_sine(cplx(0.5 * wsum, 0.0), w), 1.0) < 1e-13);
}

TEST_CASE("triple sine functional equations") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> uim(-2.0, 2.0);
  for (PeriodTriple w : {PeriodTriple(2.0, 2.0 * pi, 2.0 * pi),
                         PeriodTriple(1.7, 4.0 * pi / 3.0, 2.0 * pi)}) {
    const double wsum = w.sum();
    std::uniform_real_distribution<double> ure(0.3, wsum - w.omega[0] - 0.3);
    for (int i = 0; i < 25; ++i) {
      cplx x(ure(rng), uim(rng));
      cplx s3 = triple_sine(x, w);
      PeriodTriple rest(w.omega[1], w.omega[2]);
      CHECK(rel_err(triple_sine(x + w.omega[0], w), s3 / double_sine(x, rest)) < 1e-10);
      CHECK(rel_err(triple_sine(wsum - x, w), s3) < 1e-10);
    }
  }
}

TEST_CASE("scattering factor and kernels at n=2") {
  ModelParams p = ModelParams::make(2, 2.0);
  CHECK(rel_err(s_factor(cplx(0.3, 0.0), p),
                cplx(-0.9879511654744421978702, 0.1547659350040936190279)) < 1e-11);
  CHECK(rel_err(varphi(cplx(0.45, 0.0), p), cplx(0.3907353177102775505315, 0.0)) < 1e-11);
  CHECK(rel_err(varphi(cplx(0.3, 0.2), p),
                cplx(0.5454217608295718312958, -0.3515024180154996767769)) < 1e-11);
  CHECK(rel_err(e_lambda(cplx(0.3, 0.0), p),
                cplx(-0.02253231295943244972533, -0.2894250456817504470845)) < 1e-11);
  CHECK(std::abs(psi_level0(cplx(0.0, 0.0), p) - 0.5) < 1e-13);
}

TEST_CASE("scattering factor and kernels at n=3") {
  ModelParams p = ModelParams::make(3, 1.7);
  CHECK(rel_err(s_factor(cplx(0.3, 0.0), p),
                cplx(-0.962909151514316934677, 0.2698258066419485994121)) < 1e-11);
  CHECK(rel_err(varphi(cplx(0.45, 0.0), p), cplx(0.1731693257122595058648, 0.0)) < 1e-11);
  CHECK(rel_err(e_lambda(cplx(0.3, 0.0), p),
                cplx(-0.07414670956662953193607, -0.5393970894568403688604)) < 1e-11);
  CHECK(std::abs(psi_level0(cplx(0.2, 0.0), p) - 0.494427256217480256609) < 1e-13);
}

TEST_CASE("model identities on random points") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ub(0.1, 2.5);
  for (auto [n, rho] : {std::pair{2, 2.0}, std::pair{3, 1.7}}) {
    ModelParams p = ModelParams::make(n, rho);
    for (int i = 0; i < 20; ++i) {
      double b = ub(rng);
      cplx beta(b, 0.0);

      // |s| = 1 on the real line and s(beta) * s(-beta) = 1
      CHECK(std::abs(std::abs(s_factor(beta, p)) - 1.0) < 1e-10);
      CHECK(rel_err(s_factor(beta, p) * s_factor(-beta, p), 1.0) < 1e-10);

      // varphi is even
      CHECK(rel_err(varphi(beta, p), varphi(-beta, p)) < 1e-12);

      // E(lambda*i - beta) = E(beta) and E(beta)/E(-beta) = s(beta)
      cplx e = e_lambda(beta, p);
      CHECK(rel_err(e_lambda(p.lambda * iu - beta, p), e) < 1e-9);
      CHECK(rel_err(e / e_lambda(-beta, p), s_factor(beta, p)) < 1e-9);

      // closed form of the level-zero exchange kernel: 1/(2*ch(n*beta/4))
      cplx psi = psi_level0(beta, p);
      CHECK(rel_err(psi * 2.0 * std::cosh(0.25 * p.n * beta), 1.0) < 1e-12);

      // generic-parameter form of the same kernel, as a double-sine product
      PeriodTriple w(p.rho, p.lambda);
      cplx psig = std::exp(-log_double_sine(iu * beta + 2.0 * pi / p.n, w) -
                           log_double_sine(-iu * beta + 2.0 * pi / p.n, w));
      CHECK(rel_err(psig, psi) < 1e-10);
    }
  }
}

TEST_CASE("kernel quasi-periodicity in the imaginary direction") {
  // varphi(beta + 4*pi*i/n) / varphi(beta) has a closed hyperbolic form
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> ub(0.2, 1.8);
  for (auto [n, rho] : {std::pair{2, 2.0}, std::pair{3, 1.7}}) {
    ModelParams p = ModelParams::make(n, rho);
    double pr = pi / rho;
    for (int i = 0; i < 20; ++i) {
      cplx beta(ub(rng), 0.3 * ub(rng));
      cplx lhs = varphi(beta + p.lambda * iu, p) / varphi(beta, p);
      cplx rhs = -std::sinh(pr * (beta - pi / p.n * iu)) /
                 std::sinh(pr * (beta + 5.0 * pi / p.n * iu));
      CHECK(rel_err(lhs, rhs) < 1e-8);
    }
  }
}

TEST_CASE("kernel decay rate") {
  for (auto [n, rho] : {std::pair{2, 2.0}, std::pair{3, 1.7}}) {
    ModelParams p = ModelParams::make(n, rho);
    double want = 0.25 * n + 1.5 * pi / rho;
    double got = (log_abs_varphi(12.0, p) - log_abs_varphi(24.0, p)) / 12.0;
    CHECK(std::abs(got - want) / want < 0.01);
  }
}

TEST_CASE("pole and zero detection") {
  PeriodTriple w(2.0, 2.0 * pi);
  CHECK_THROWS_AS(double_sine(cplx(0.0, 0.0), w), PoleOrZero);
  CHECK_THROWS_AS(double_sine(cplx(w.sum(), 0.0), w), PoleOrZero);
  CHECK_THROWS_AS(double_sine(cplx(-2.0 - 2.0 * pi, 1e-12), w), PoleOrZero);
  PeriodTriple w3(2.0, 2.0 * pi, 2.0 * pi);
  CHECK_THROWS_AS(triple_sine(cplx(0.0, 0.0), w3), PoleOrZero);

  ModelParams p = ModelParams::make(2, 2.0);
  CHECK_THROWS_AS(varphi(cplx(0.0, pi / p.n), p), PoleOrZero);
  CHECK_THROWS_AS(psi_level0(2.0 * pi * iu / double(p.n), p), PoleOrZero);
  CHECK_THROWS_AS(s_factor(cplx(0.0, 0.0), p), PoleOrZero);
}

TEST_CASE("degenerate parameter rejection") {
  // pi/n on the lattice: n=2, rho = pi/2 (k=1, l=0)
  CHECK_THROWS_AS(ModelParams::make(2, 0.5 * pi), ConfigInvalid);
  // 2*pi/n on the lattice: n=2, rho = pi
  CHECK_THROWS_AS(ModelParams::make(2, pi), ConfigInvalid);
  CHECK_THROWS_AS(ModelParams::make(1, 2.0), ConfigInvalid);
  CHECK_THROWS_AS(ModelParams::make(2, -1.0), ConfigInvalid);
  CHECK_NOTHROW(ModelParams::make(4, 2.3));
}

TEST_CASE("h factor zeros and oddness structure") {
  ModelParams p = ModelParams::make(3, 1.7);
  CHECK(std::abs(h_factor(cplx(0.0, 0.0), p)) < 1e-14);
  CHECK(std::abs(h_factor(2.0 * pi * iu / double(p.n), p)) < 1e-13);
  CHECK(std::abs(h_factor(-2.0 * pi * iu / double(p.n), p)) < 1e-13);
  // odd under beta -> -beta
  cplx b(0.7, 0.1);
  CHECK(rel_err(h_factor(-b, p), -h_factor(b, p)) < 1e-12);
  CHECK(rel_err(h_factor(-b, p.rho, p), -h_factor(b, p.rho, p)) < 1e-12);
}

TEST_CASE("stable log of 2sinh") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    cplx z(u(rng), u(rng));
    if (std::abs(z) < 0.1) continue;
    CHECK(rel_err(std::exp(log_2sinh(z)), 2.0 * std::sinh(z)) < 1e-13);
    CHECK(rel_err(std::exp(log_2sin(z)), 2.0 * std::sin(z)) < 1e-13);
  }
  // no overflow far out
  cplx big(500.0, 3.0);
  cplx lg = log_2sinh(big);
  CHECK(std::isfinite(lg.real()));
  CHECK(std::abs(lg.real() - 500.0) < 1e-9);
}
