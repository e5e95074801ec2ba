#include "qkz/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace qkz {

namespace {

std::atomic<int> g_workers{1};

void parallel_for(long count, const std::function<void(long)>& fn) {
  const int w = int(std::min<long>(g_workers.load(), count));
  if (w <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::mutex err_mtx;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mtx);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

double nu_factorial(const WeightProfile& wp) {
  double f = 1.0;
  for (size_t j = 1; j < wp.nu.size(); ++j)
    for (int k = 2; k <= wp.nu[j]; ++k) f *= double(k);
  return f;
}

std::string assignment_str(const std::vector<int>& J) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < J.size(); ++i) os << (i ? "," : "") << J[i];
  os << ")";
  return os.str();
}

}  // namespace

void set_worker_count(int jobs) { g_workers.store(std::max(1, jobs)); }
int worker_count() { return g_workers.load(); }

CheckReport check_exchange_relation(const ModelParams& p, int trials, unsigned seed,
                                    double tol) {
  const int n = p.n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto rnd = [&] { return cplx(u(rng), 0.5 * u(rng)); };

  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const cplx b1 = rnd(), b2 = rnd();
    const RMatrixValue R = r_modified(b1, b2, p);
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = j1; j2 < n; ++j2) {
        const std::vector<int> J12 = {j1, j2}, J21 = {j2, j1};
        const WeightProfile wp = profile_of(J12, n);
        LayeredVariables v12;
        v12.beta = {b1, b2};
        v12.gamma.resize(size_t(n) - 1);
        for (int j = 1; j < n; ++j) {
          v12.gamma[size_t(j) - 1].resize(size_t(wp.nu[size_t(j)]));
          for (auto& g : v12.gamma[size_t(j) - 1]) g = rnd();
        }
        LayeredVariables v21 = v12;
        std::swap(v21.beta[0], v21.beta[1]);

        std::vector<cplx> state(size_t(n) * size_t(n), cplx(0.0));
        state[size_t(j1) * size_t(n) + size_t(j2)] = w_J(J12, v12, p);
        if (j1 != j2) state[size_t(j2) * size_t(n) + size_t(j1)] = w_J(J21, v12, p);
        const std::vector<cplx> out = apply_r(state, 2, 0, 1, R);

        const cplx want12 = w_J(J21, v21, p);
        worst = std::max(worst, std::abs(out[size_t(j1) * size_t(n) + size_t(j2)] - want12) /
                                    std::max(std::abs(want12), 1e-12));
        if (j1 != j2) {
          const cplx want21 = w_J(J12, v21, p);
          worst = std::max(worst, std::abs(out[size_t(j2) * size_t(n) + size_t(j1)] - want21) /
                                      std::max(std::abs(want21), 1e-12));
        }
      }
  }

  CheckReport rep;
  rep.name = "exchange";
  rep.residual = worst;
  rep.bound = tol;
  rep.passed = worst < tol;
  std::ostringstream os;
  os << "n=" << n << ", trials=" << trials << ", seed=" << seed
     << ", exponent convention: real";
  rep.detail = os.str();
  return rep;
}

CheckReport check_shift_identity(const std::vector<int>& jg, const std::vector<int>& jw,
                                 const std::vector<cplx>& betas, const ModelParams& p,
                                 double eps) {
  const int nsl = int(jg.size());
  if (nsl < 2) throw ConfigInvalid("shift identity needs at least two sites");
  const WeightProfile wp = profile_of(jg, p.n);
  if (profile_of(jw, p.n).nu != wp.nu)
    throw ConfigInvalid("the two assignments have different profiles");
  const ContourPlan plan = build_contours(wp, betas, p, eps);

  std::vector<int> jrot = {jg.back()};
  jrot.insert(jrot.end(), jg.begin(), jg.end() - 1);
  std::vector<int> order(static_cast<size_t>(nsl));
  order[0] = nsl - 1;
  std::iota(order.begin() + 1, order.end(), 0);

  PairSide lhs_a;
  lhs_a.J = jrot;
  lhs_a.beta_order = order;
  PairSide rhs_a;
  rhs_a.J = jg;
  PairSide b;
  b.J = jw;

  const PairingResult lhs = qkz::pair(lhs_a, b, betas, plan, p);
  const PairingResult rhs = shifted_pair(rhs_a, b, betas, plan, p, iu * p.lambda);

  const double diff = std::abs(lhs.value - rhs.value);
  const double scale = std::max({std::abs(lhs.value), std::abs(rhs.value), 1e-30});
  const double est = lhs.abs_error_estimate + rhs.abs_error_estimate;

  CheckReport rep;
  rep.name = "shift";
  rep.residual = diff / scale;
  rep.bound = (10.0 * est + 1e-14) / scale;
  rep.passed = diff <= 10.0 * est + 1e-14;
  std::ostringstream os;
  os << "J=" << assignment_str(jg) << ", dual=" << assignment_str(jw)
     << ", |value|=" << std::abs(rhs.value)
     << ", unmatched pole transits=" << rhs.unmatched_transits;
  rep.detail = os.str();
  return rep;
}

long SolutionVector::state_index(const std::vector<int>& J) const {
  long idx = 0;
  for (int x : J) idx = idx * wp.n() + x;
  return idx;
}

std::vector<cplx> SolutionVector::state() const {
  long dim = 1;
  for (int s = 0; s < wp.nsites(); ++s) dim *= wp.n();
  std::vector<cplx> st(size_t(dim), cplx(0.0));
  for (size_t i = 0; i < assignments.size(); ++i)
    st[size_t(state_index(assignments[i]))] = components[i];
  return st;
}

SolutionVector solve(const WeightProfile& wp, const std::vector<cplx>& betas,
                     const std::vector<int>& jw, const ModelParams& p, double eps) {
  wp.validate();
  if (profile_of(jw, p.n).nu != wp.nu)
    throw ConfigInvalid("dual assignment does not match the profile");
  const ContourPlan plan = build_contours(wp, betas, p, eps);

  SolutionVector sol;
  sol.wp = wp;
  sol.betas = betas;
  sol.dual = jw;
  sol.assignments = enumerate_assignments(wp);
  const long count = long(sol.assignments.size());
  sol.components.assign(size_t(count), cplx(0.0));
  sol.error_estimates.assign(size_t(count), 0.0);
  const double fact = nu_factorial(wp);

  PairSide b;
  b.J = jw;
  b.skewed = true;
  parallel_for(count, [&](long i) {
    PairSide a;
    a.J = sol.assignments[size_t(i)];
    const PairingResult r = qkz::pair(a, b, betas, plan, p);
    if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()) ||
        !std::isfinite(r.abs_error_estimate))
      throw ToleranceNotMet("pairing produced a non-finite value");
    sol.components[size_t(i)] = fact * r.value;
    sol.error_estimates[size_t(i)] = fact * r.abs_error_estimate;
  });
  return sol;
}

CheckReport check_solution_exchange(const std::vector<int>& jw, const std::vector<cplx>& betas,
                                    const ModelParams& p, double eps) {
  if (jw.size() != 2 || betas.size() != 2)
    throw ConfigInvalid("exchange consistency is a two-site check");
  const WeightProfile wp = profile_of(jw, p.n);
  const SolutionVector sol = solve(wp, betas, jw, p, eps);
  const ContourPlan plan = build_contours(wp, betas, p, eps);
  const RMatrixValue R = r_modified(betas[0], betas[1], p);
  const std::vector<cplx> u = apply_r(sol.state(), 2, 0, 1, R);
  const double fact = nu_factorial(wp);

  PairSide b;
  b.J = jw;
  b.skewed = true;
  double diff = 0.0, scale = 1e-30;
  double est = std::accumulate(sol.error_estimates.begin(), sol.error_estimates.end(), 0.0);
  for (const std::vector<int>& J : sol.assignments) {
    PairSide a;
    a.J = {J[1], J[0]};
    a.beta_order = {1, 0};
    const PairingResult r = qkz::pair(a, b, betas, plan, p);
    const cplx want = fact * r.value;
    est += fact * r.abs_error_estimate;
    diff = std::max(diff, std::abs(u[size_t(sol.state_index(J))] - want));
    scale = std::max(scale, std::abs(want));
  }

  CheckReport rep;
  rep.name = "solution-exchange";
  rep.residual = diff / scale;
  rep.bound = (10.0 * est + 1e-14) / scale;
  rep.passed = diff <= 10.0 * est + 1e-14;
  std::ostringstream os;
  os << "dual=" << assignment_str(jw) << ", components=" << sol.assignments.size();
  rep.detail = os.str();
  return rep;
}

double qkz_step_residual(const WeightProfile& wp, const std::vector<cplx>& betas,
                         const std::vector<int>& jw, const ModelParams& p, double eps) {
  wp.validate();
  for (size_t j = 1; j < wp.nu.size(); ++j)
    if (wp.nu[j] > 1)
      throw ConfigInvalid("one-step residual supports at most one variable per layer");
  const int nsl = wp.nsites();
  if (nsl < 2) throw ConfigInvalid("one-step residual needs at least two sites");
  if (int(betas.size()) != nsl) throw ConfigInvalid("site variable count does not match profile");

  const SolutionVector sol = solve(wp, betas, jw, p, eps);
  const ContourPlan plan = build_contours(wp, betas, p, eps);
  const double fact = nu_factorial(wp);

  const long count = long(sol.assignments.size());
  std::vector<cplx> shifted(size_t(count), cplx(0.0));
  PairSide b;
  b.J = jw;
  parallel_for(count, [&](long i) {
    PairSide a;
    a.J = sol.assignments[size_t(i)];
    const PairingResult r = shifted_pair(a, b, betas, plan, p, iu * p.lambda);
    shifted[size_t(i)] = fact * r.value;
  });

  long dim = 1;
  for (int s = 0; s < nsl; ++s) dim *= p.n;
  std::vector<cplx> g(size_t(dim), cplx(0.0));
  for (size_t i = 0; i < sol.assignments.size(); ++i)
    g[size_t(sol.state_index(sol.assignments[i]))] = shifted[i];

  std::vector<cplx> betas_up = betas;
  betas_up.back() += iu * p.lambda;
  const std::vector<cplx> rhs = qkz_rhs(g, nsl, nsl - 1, betas_up, p);
  const std::vector<cplx> lhs = sol.state();

  double mx = 0.0, df = 0.0;
  for (size_t i = 0; i < rhs.size(); ++i) {
    mx = std::max(mx, std::abs(rhs[i]));
    df = std::max(df, std::abs(lhs[i] - rhs[i]));
  }
  if (!(mx > 0.0)) throw NumericalError("difference-equation right side vanished");
  return df / mx;
}

CheckReport check_qkz(const WeightProfile& wp, const std::vector<cplx>& betas,
                      const std::vector<int>& jw, const ModelParams& p, double tol,
                      double eps) {
  CheckReport rep;
  rep.name = "qkz";
  rep.residual = qkz_step_residual(wp, betas, jw, p, eps);
  rep.bound = tol;
  rep.passed = rep.residual < tol;
  std::ostringstream os;
  os << "n=" << p.n << ", sites=" << wp.nsites() << ", dual=" << assignment_str(jw)
     << ", betas=(";
  for (size_t i = 0; i < betas.size(); ++i) {
    os << (i ? "," : "") << betas[i].real();
    if (betas[i].imag() != 0.0) os << (betas[i].imag() > 0 ? "+" : "") << betas[i].imag() << "i";
  }
  os << ")";
  rep.detail = os.str();
  return rep;
}

CheckReport check_convergence_region(int n_max, int nsites_max) {
  long chamber_profiles = 0, counterexamples = 0;
  long outside_profiles = 0, outside_with_witness = 0;
  double min_chamber_exponent = std::numeric_limits<double>::infinity();
  std::ostringstream bad;

  for (int n = 2; n <= n_max; ++n)
    for (int nsl = 1; nsl <= nsites_max; ++nsl) {
      std::vector<int> nu(size_t(n), 0);
      nu[0] = nsl;
      std::function<void(int, int)> rec = [&](int pos, int cap) {
        if (pos == n) {
          WeightProfile wp{nu};
          int dims = 0;
          for (size_t j = 1; j < nu.size(); ++j) dims += nu[j];
          if (dims == 0) return;  // no integration variables, nothing to test

          double best = std::numeric_limits<double>::infinity();
          std::vector<int> worst, x(size_t(n) - 1, 0);
          for (;;) {
            int d = 0;
            while (d < n - 1 && x[size_t(d)] == nu[size_t(d) + 1]) {
              x[size_t(d)] = 0;
              ++d;
            }
            if (d == n - 1) break;
            x[size_t(d)] += 1;
            const double m = decay_exponent(wp, x);
            if (m < best) {
              best = m;
              worst = x;
            }
          }

          if (wp.weyl_positive()) {
            ++chamber_profiles;
            min_chamber_exponent = std::min(min_chamber_exponent, best);
            if (!(best > 0.0)) {
              ++counterexamples;
              bad << " nu=(";
              for (size_t j = 0; j < nu.size(); ++j) bad << (j ? "," : "") << nu[j];
              bad << ") x=(";
              for (size_t j = 0; j < worst.size(); ++j) bad << (j ? "," : "") << worst[j];
              bad << ") M=" << best << ";";
            }
          } else {
            ++outside_profiles;
            if (!(best > 0.0)) ++outside_with_witness;
          }
          return;
        }
        for (int v = 0; v <= cap; ++v) {
          nu[size_t(pos)] = v;
          rec(pos + 1, v);
        }
      };
      rec(1, nsl);
    }

  CheckReport rep;
  rep.name = "convergence";
  rep.residual = double(counterexamples);
  rep.bound = 1.0;
  rep.passed = counterexamples == 0;
  std::ostringstream os;
  os << "chamber profiles checked: " << chamber_profiles
     << ", smallest exponent: " << min_chamber_exponent
     << "; profiles outside the chamber: " << outside_profiles
     << ", of which " << outside_with_witness
     << " admit a nonpositive direction (reported only)";
  if (counterexamples > 0) os << "; counterexamples:" << bad.str();
  rep.detail = os.str();
  return rep;
}

}  // namespace qkz
