#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qkz/verify.hpp"

using qkz::cplx;
using qkz::iu;

namespace {

qkz::ModelParams params(int n, double rho) { return qkz::ModelParams::make(n, rho); }

}  // namespace

TEST_CASE("exchange relation holds pointwise for the antisymmetrized forms") {
  for (const auto& [n, rho] : {std::pair{2, 2.0}, std::pair{3, 1.7}}) {
    const qkz::CheckReport rep = qkz::check_exchange_relation(params(n, rho), 8, 77u);
    CAPTURE(n);
    CAPTURE(rep.residual);
    CHECK(rep.passed);
    CHECK(rep.residual < 1e-9);
    CHECK(rep.name == "exchange");
    CHECK(rep.detail.find("trials=8") != std::string::npos);
  }
}

TEST_CASE("rotating the last site matches the shifted pairing") {
  const qkz::ModelParams p2 = params(2, 2.0);
  const std::vector<cplx> betas = {cplx(0.0), cplx(1.0)};

  for (const std::vector<int>& jg : {std::vector<int>{1, 0}, std::vector<int>{0, 1}}) {
    const qkz::CheckReport rep = qkz::check_shift_identity(jg, {1, 0}, betas, p2);
    CAPTURE(jg[0]);
    CAPTURE(rep.residual);
    CAPTURE(rep.bound);
    CHECK(rep.passed);
    CHECK(rep.residual < 1e-4);
  }

  const qkz::ModelParams p3 = params(3, 1.7);
  const qkz::CheckReport rep3 =
      qkz::check_shift_identity({1, 0}, {1, 0}, {cplx(0.0), cplx(0.8)}, p3);
  CAPTURE(rep3.residual);
  CHECK(rep3.passed);
  CHECK(rep3.residual < 1e-4);
}

TEST_CASE("solve produces the expected components and embedding") {
  const qkz::ModelParams p = params(2, 2.0);
  const qkz::WeightProfile wp{{2, 1}};
  const std::vector<cplx> betas = {cplx(0.0), cplx(1.0)};
  const qkz::SolutionVector sol = qkz::solve(wp, betas, {1, 0}, p);

  REQUIRE(sol.assignments.size() == 2);
  CHECK(sol.assignments[0] == std::vector<int>{0, 1});
  CHECK(sol.assignments[1] == std::vector<int>{1, 0});

  // component for J = (1,0): independently computed reference value
  const cplx ref(-0.14709208163450960565, -0.054595766168478756008);
  CHECK(std::abs(sol.components[1] - ref) < 1e-5);

  const std::vector<cplx> st = sol.state();
  REQUIRE(st.size() == 4);
  CHECK(st[size_t(sol.state_index({0, 1}))] == sol.components[0]);
  CHECK(st[size_t(sol.state_index({1, 0}))] == sol.components[1]);
  CHECK(st[0] == cplx(0.0));
  CHECK(st[3] == cplx(0.0));

  for (double e : sol.error_estimates) CHECK(e < 1e-5);
}

TEST_CASE("solution components are invariant under a common real translation") {
  const qkz::ModelParams p = params(2, 2.0);
  const qkz::WeightProfile wp{{2, 1}};
  const qkz::SolutionVector a = qkz::solve(wp, {cplx(0.0), cplx(0.7)}, {1, 0}, p);
  const qkz::SolutionVector b = qkz::solve(wp, {cplx(0.5), cplx(1.2)}, {1, 0}, p);
  REQUIRE(a.components.size() == b.components.size());
  for (size_t i = 0; i < a.components.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(a.components[i] - b.components[i]) <
          1e-9 * std::max(1.0, std::abs(a.components[i])));
  }
}

TEST_CASE("worker count does not change the result") {
  const qkz::ModelParams p = params(2, 2.0);
  const qkz::WeightProfile wp{{2, 1}};
  qkz::set_worker_count(1);
  const qkz::SolutionVector a = qkz::solve(wp, {cplx(0.0), cplx(0.7)}, {1, 0}, p);
  qkz::set_worker_count(4);
  CHECK(qkz::worker_count() == 4);
  const qkz::SolutionVector b = qkz::solve(wp, {cplx(0.0), cplx(0.7)}, {1, 0}, p);
  qkz::set_worker_count(1);
  for (size_t i = 0; i < a.components.size(); ++i) {
    CHECK(a.components[i].real() == b.components[i].real());
    CHECK(a.components[i].imag() == b.components[i].imag());
  }
}

TEST_CASE("deformed transposition consistency of the solution at two sites") {
  const qkz::ModelParams p = params(2, 2.0);
  const qkz::CheckReport rep =
      qkz::check_solution_exchange({1, 0}, {cplx(0.2), cplx(0.9)}, p);
  CAPTURE(rep.residual);
  CAPTURE(rep.bound);
  CHECK(rep.passed);
  CHECK(rep.residual < 1e-4);
}

TEST_CASE("one-step difference equation residual is small") {
  SUBCASE("two sites, n = 2") {
    const qkz::ModelParams p = params(2, 2.0);
    const double r =
        qkz::qkz_step_residual(qkz::WeightProfile{{2, 1}}, {cplx(0.0), cplx(0.7)}, {1, 0}, p);
    CAPTURE(r);
    CHECK(r < 1e-4);
  }
  SUBCASE("two sites, n = 3") {
    const qkz::ModelParams p = params(3, 1.7);
    const double r = qkz::qkz_step_residual(qkz::WeightProfile{{2, 1, 0}},
                                            {cplx(0.0), cplx(0.7)}, {1, 0}, p);
    CAPTURE(r);
    CHECK(r < 1e-4);
  }
  SUBCASE("three sites, n = 2") {
    const qkz::ModelParams p = params(2, 2.0);
    const double r = qkz::qkz_step_residual(qkz::WeightProfile{{3, 1}},
                                            {cplx(0.0), cplx(0.5), cplx(1.0)}, {1, 0, 0}, p);
    CAPTURE(r);
    CHECK(r < 1e-3);
  }
}

TEST_CASE("difference-equation residual rejects unsupported input") {
  const qkz::ModelParams p = params(2, 2.0);
  CHECK_THROWS_AS(qkz::qkz_step_residual(qkz::WeightProfile{{2, 2}},
                                         {cplx(0.0), cplx(0.7)}, {1, 1}, p),
                  qkz::ConfigInvalid);
  CHECK_THROWS_AS(qkz::qkz_step_residual(qkz::WeightProfile{{2, 1}},
                                         {cplx(0.0), cplx(0.7)}, {0, 0}, p),
                  qkz::ConfigInvalid);
  CHECK_THROWS_AS(qkz::qkz_step_residual(qkz::WeightProfile{{2, 1}}, {cplx(0.0)}, {1, 0}, p),
                  qkz::ConfigInvalid);
}

TEST_CASE("chamber profiles all have positive decay exponent") {
  const qkz::CheckReport rep = qkz::check_convergence_region(4, 5);
  CHECK(rep.passed);
  CHECK(rep.residual == 0.0);
  CHECK(rep.detail.find("chamber profiles checked") != std::string::npos);
  CHECK(rep.detail.find("reported only") != std::string::npos);
}
