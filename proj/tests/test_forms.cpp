#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qkz/forms.hpp"
#include "qkz/rmat.hpp"

using namespace qkz;

namespace {

std::mt19937_64 rng(20240501);

cplx rnd() {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return cplx(u(rng), 0.5 * u(rng));
}

LayeredVariables random_vars(const WeightProfile& wp) {
  LayeredVariables v;
  v.beta.resize(size_t(wp.nsites()));
  for (auto& b : v.beta) b = rnd();
  v.gamma.resize(size_t(wp.n()) - 1);
  for (int j = 1; j < wp.n(); ++j) {
    v.gamma[size_t(j) - 1].resize(size_t(wp.nu[size_t(j)]));
    for (auto& g : v.gamma[size_t(j) - 1]) g = rnd();
  }
  return v;
}

double rel_err(cplx got, cplx want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-30);
}

LayeredVariables beta_swapped(const LayeredVariables& v) {
  LayeredVariables w = v;
  std::swap(w.beta[0], w.beta[1]);
  return w;
}

}  // namespace

TEST_CASE("assignment enumeration") {
  // counts are products of binomials over adjacent levels
  WeightProfile wp{{4, 2}};
  auto all = enumerate_assignments(wp);
  CHECK(all.size() == 6);
  CHECK(static_cast<long long>(all.size()) == wp.assignment_count());
  // lexicographic order, first and last
  CHECK(all.front() == std::vector<int>{0, 0, 1, 1});
  CHECK(all.back() == std::vector<int>{1, 1, 0, 0});
  for (const auto& J : all) CHECK(profile_of(J, 2).nu == wp.nu);

  WeightProfile big{{6, 4, 2, 1}};
  auto lots = enumerate_assignments(big);
  CHECK(static_cast<long long>(lots.size()) == big.assignment_count());
  CHECK(lots.size() == 15 * 6 * 2);
  for (size_t i = 1; i < lots.size(); ++i) CHECK(lots[i - 1] < lots[i]);

  WeightProfile pair31{{2, 1, 0}};
  auto two = enumerate_assignments(pair31);
  CHECK(two.size() == 2);
  CHECK(two[0] == std::vector<int>{0, 1});
  CHECK(two[1] == std::vector<int>{1, 0});
}

TEST_CASE("profile validation") {
  WeightProfile increasing{{2, 3}}, empty{{0, 0}}, flat{{2}};
  CHECK_THROWS_AS(increasing.validate(), InvalidProfile);
  CHECK_THROWS_AS(empty.validate(), InvalidProfile);
  CHECK_THROWS_AS(flat.validate(), InvalidProfile);
  std::vector<int> bad{0, 5};
  CHECK_THROWS_AS(profile_of(bad, 3), InvalidProfile);
  // assignment/variable mismatch
  ModelParams p = ModelParams::make(2, 2.0);
  LayeredVariables v;
  v.beta = {cplx(0.1), cplx(0.4)};
  v.gamma = {{cplx(0.2), cplx(0.3)}};
  CHECK_THROWS_AS(g_J({1, 0}, v, p), InvalidProfile);  // layer 1 needs one variable
  LayeredVariables w;
  w.beta = {cplx(0.1)};
  w.gamma = {{}};
  CHECK_THROWS_AS(g_J({1, 0}, w, p), InvalidProfile);  // beta length mismatch
}

TEST_CASE("hyperbolic exchange identity") {
  // sh(x+u+c) sh(y+v-c) - sh(x+v+c) sh(y+u-c) type collapse used throughout
  ModelParams p = ModelParams::make(3, 1.7);
  double pm = pi / p.rho;
  cplx c = pi * iu / double(p.n);
  for (int i = 0; i < 20; ++i) {
    cplx b1 = rnd(), b2 = rnd(), g1 = rnd(), g2 = rnd();
    cplx lhs = std::sinh(pm * (g2 - b1 + c)) * std::sinh(pm * (g1 - b2 - c)) -
               std::sinh(pm * (g2 - b2 + c)) * std::sinh(pm * (g1 - b1 - c));
    cplx rhs = std::sinh(pm * (b1 - b2)) * std::sinh(pm * (g2 - g1 + 2.0 * c));
    CHECK(rel_err(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("antisymmetrized two-site product, one layer") {
  ModelParams p = ModelParams::make(2, 2.0);
  double pm = pi / p.rho;
  cplx c = pi * iu / double(p.n);
  std::vector<int> J{1, 1};
  for (int i = 0; i < 10; ++i) {
    LayeredVariables v = random_vars(WeightProfile{{2, 2}});
    cplx b1 = v.beta[0], b2 = v.beta[1];
    cplx g1 = v.gamma[0][0], g2 = v.gamma[0][1];
    cplx lhs = g_J(J, v, p) - g_J(J, beta_swapped(v), p);
    cplx rhs = std::exp(pm * (b1 + b2 - g1 - g2)) * std::sinh(pm * (b1 - b2)) *
               std::sinh(pm * (g2 - g1 + 2.0 * c)) * std::sinh(pm * (g2 - g1 - 2.0 * c));
    CHECK(rel_err(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("antisymmetrized two-site product, two layers") {
  ModelParams p = ModelParams::make(3, 1.7);
  double pm = pi / p.rho;
  cplx c = pi * iu / double(p.n);
  std::vector<int> J{2, 2};
  for (int i = 0; i < 10; ++i) {
    LayeredVariables v = random_vars(WeightProfile{{2, 2, 2}});
    cplx b1 = v.beta[0], b2 = v.beta[1];
    cplx t1 = v.gamma[1][0], t2 = v.gamma[1][1];
    FormFn diff = [&](const LayeredVariables& vars) {
      return g_J(J, vars, p) - g_J(J, beta_swapped(vars), p);
    };
    cplx lhs = skew(1, diff)(v);
    cplx rhs = std::exp(pm * (b1 + b2 - t1 - t2)) * std::sinh(pm * (b1 - b2)) *
               std::sinh(pm * (t2 - t1 + 2.0 * c)) * std::sinh(pm * (t2 - t1 - 2.0 * c)) *
               h_factor(v.gamma[0][0] - v.gamma[0][1], p.rho, p);
    CHECK(rel_err(lhs, rhs) < 1e-11);
  }
}

TEST_CASE("fully skewed product collapses to hyperbolic factors") {
  // one layer
  {
    ModelParams p = ModelParams::make(2, 2.0);
    double pm = pi / p.rho;
    cplx c = pi * iu / double(p.n);
    std::vector<int> J{1, 1};
    for (int i = 0; i < 10; ++i) {
      LayeredVariables v = random_vars(WeightProfile{{2, 2}});
      FormFn fn = [&](const LayeredVariables& vars) {
        return std::sinh(pm * (vars.gamma[0][0] - vars.gamma[0][1] - 2.0 * c)) *
               g_J(J, vars, p);
      };
      cplx lhs = skew(1, fn)(v);
      cplx rhs = std::sinh(pm * (v.beta[0] - v.beta[1] - 2.0 * c)) *
                 std::exp(pm * (v.beta[0] + v.beta[1] - v.gamma[0][0] - v.gamma[0][1])) *
                 h_factor(v.gamma[0][0] - v.gamma[0][1], p.rho, p);
      CHECK(rel_err(lhs, rhs) < 1e-11);
    }
  }
  // two layers
  {
    ModelParams p = ModelParams::make(3, 1.7);
    double pm = pi / p.rho;
    cplx c = pi * iu / double(p.n);
    std::vector<int> J{2, 2};
    for (int i = 0; i < 10; ++i) {
      LayeredVariables v = random_vars(WeightProfile{{2, 2, 2}});
      FormFn fn = [&](const LayeredVariables& vars) {
        return std::sinh(pm * (vars.gamma[1][0] - vars.gamma[1][1] - 2.0 * c)) *
               g_J(J, vars, p);
      };
      cplx lhs = skew(2, skew(1, fn))(v);
      cplx rhs = std::sinh(pm * (v.beta[0] - v.beta[1] - 2.0 * c)) *
                 std::exp(pm * (v.beta[0] + v.beta[1] - v.gamma[1][0] - v.gamma[1][1])) *
                 h_factor(v.gamma[0][0] - v.gamma[0][1], p.rho, p) *
                 h_factor(v.gamma[1][0] - v.gamma[1][1], p.rho, p);
      CHECK(rel_err(lhs, rhs) < 1e-11);
    }
  }
}

TEST_CASE("mixed-letter obstruction is killed by the skew") {
  // l = 1, three letters
  {
    ModelParams p = ModelParams::make(3, 1.7);
    std::vector<int> Jhi{2, 1}, Jlo{1, 2};
    for (int i = 0; i < 10; ++i) {
      LayeredVariables v = random_vars(WeightProfile{{2, 2, 1}});
      RMatrixValue R = r_modified(v.beta[0], v.beta[1], p);
      cplx a = R.entry(1, 2, 2, 1), b = R.entry(1, 2, 1, 2);
      FormFn x = [&](const LayeredVariables& vars) {
        return g_J(Jhi, beta_swapped(vars), p) - a * g_J(Jhi, vars, p) - b * g_J(Jlo, vars, p);
      };
      cplx killed = skew(1, x)(v);
      cplx scale = std::abs(g_J(Jhi, v, p));
      CHECK(std::abs(killed) / std::max(scale.real(), 1e-30) < 1e-11);
    }
  }
  // l = 2, four letters, two skewed layers
  {
    ModelParams p = ModelParams::make(4, 2.3);
    std::vector<int> Jhi{3, 2}, Jlo{2, 3};
    for (int i = 0; i < 10; ++i) {
      LayeredVariables v = random_vars(WeightProfile{{2, 2, 2, 1}});
      RMatrixValue R = r_modified(v.beta[0], v.beta[1], p);
      cplx a = R.entry(2, 3, 3, 2), b = R.entry(2, 3, 2, 3);
      FormFn x = [&](const LayeredVariables& vars) {
        return g_J(Jhi, beta_swapped(vars), p) - a * g_J(Jhi, vars, p) - b * g_J(Jlo, vars, p);
      };
      cplx killed = skew(2, skew(1, x))(v);
      cplx scale = std::abs(g_J(Jhi, v, p));
      CHECK(std::abs(killed) / std::max(scale.real(), 1e-30) < 1e-10);
    }
  }
}

TEST_CASE("dual product sign under one-step shift of the last site") {
  // Shifting the last site variable up by i*lambda, together with the last
  // variable of each layer up to the last site's letter, multiplies the dual
  // product by an explicit sign.
  struct Case {
    int n;
    double rho;
    WeightProfile wp;
  };
  for (const Case& cs : {Case{2, 2.0, WeightProfile{{2, 1}}},
                         Case{3, 1.7, WeightProfile{{2, 1, 0}}},
                         Case{3, 1.7, WeightProfile{{2, 2, 1}}},
                         Case{2, 2.0, WeightProfile{{4, 2}}},
                         Case{4, 2.3, WeightProfile{{3, 2, 1, 1}}}}) {
    ModelParams p = ModelParams::make(cs.n, cs.rho);
    for (const auto& J : enumerate_assignments(cs.wp)) {
      LayeredVariables v = random_vars(cs.wp);
      int jn = J.back();
      auto nu_at = [&](int j) {
        if (j == 0) return cs.wp.nsites();
        if (j >= cs.n) return 0;
        return cs.wp.nu[size_t(j)];
      };
      double sign = ((cs.wp.nsites() + nu_at(jn) + nu_at(jn + 1)) % 2 == 0) ? 1.0 : -1.0;
      LayeredVariables sh = v;
      sh.beta.back() += iu * p.lambda;
      for (int j = 1; j <= jn; ++j) sh.gamma[size_t(j) - 1].back() += iu * p.lambda;
      CHECK(rel_err(G_J(J, sh, p), sign * G_J(J, v, p)) < 1e-11);
    }
  }
}

TEST_CASE("imaginary exponent convention breaks the collapse") {
  ModelParams p = ModelParams::make(2, 2.0);
  double pm = pi / p.rho;
  cplx c = pi * iu / double(p.n);
  std::vector<int> J{1, 1};
  LayeredVariables v = random_vars(WeightProfile{{2, 2}});
  cplx lhs = g_J(J, v, p, ExpConvention::imaginary) -
             g_J(J, beta_swapped(v), p, ExpConvention::imaginary);
  cplx rhs = std::exp(pm * (v.beta[0] + v.beta[1] - v.gamma[0][0] - v.gamma[0][1])) *
             std::sinh(pm * (v.beta[0] - v.beta[1])) *
             std::sinh(pm * (v.gamma[0][1] - v.gamma[0][0] + 2.0 * c)) *
             std::sinh(pm * (v.gamma[0][1] - v.gamma[0][0] - 2.0 * c));
  CHECK(rel_err(lhs, rhs) > 1e-3);
}

TEST_CASE("full antisymmetrization and the skew operator agree") {
  ModelParams p = ModelParams::make(3, 1.7);
  std::vector<int> J{2, 2, 1};
  WeightProfile wp = profile_of(J, 3);  // nu = (3, 3, 2)
  LayeredVariables v = random_vars(wp);
  FormFn f = [&](const LayeredVariables& vars) { return g_J(J, vars, p); };
  cplx manual = skew(2, skew(1, f))(v);
  CHECK(rel_err(w_J(J, v, p), manual) < 1e-13);
  FormFn fd = [&](const LayeredVariables& vars) { return G_J(J, vars, p); };
  cplx manual_dual = skew(2, skew(1, fd))(v);
  CHECK(rel_err(W_J(J, v, p), manual_dual) < 1e-13);
}
