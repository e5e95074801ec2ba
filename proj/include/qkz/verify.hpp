#pragma once

#include <string>
#include <vector>

#include "qkz/pairing.hpp"
#include "qkz/rmat.hpp"

namespace qkz {

// Worker threads used by solve() and the residual checks. Parallelism only
// distributes whole component integrals; each integral is evaluated in a
// fixed order, so results are identical for any worker count.
void set_worker_count(int jobs);
int worker_count();

struct CheckReport {
  std::string name;
  bool passed = false;
  double residual = 0.0;  // worst residual encountered
  double bound = 0.0;     // threshold it was compared against
  std::string detail;
};

// Exchange relation of the antisymmetrized forms under the deformed
// transposition matrix, at N = 2: applying the matrix to the component
// vector reproduces the forms at swapped site variables. Pointwise in the
// auxiliary variables, `trials` random complex sets.
CheckReport check_exchange_relation(const ModelParams& p, int trials, unsigned seed,
                                    double tol = 1e-9);

// Flat-endpoint translation identity: the pairing with the last site
// rotated to the front equals the pairing with the last site's variables
// shifted up by i*lambda. Passes when the defect is within ten times the
// combined quadrature error estimates.
CheckReport check_shift_identity(const std::vector<int>& jg, const std::vector<int>& jw,
                                 const std::vector<cplx>& betas, const ModelParams& p,
                                 double eps = 0.0);

// Component vector of the integral solution attached to one dual
// assignment: component J is nu_1! ... nu_{n-1}! times the elementary
// pairing of J against the antisymmetrized dual form.
struct SolutionVector {
  WeightProfile wp;
  std::vector<cplx> betas;
  std::vector<int> dual;
  std::vector<std::vector<int>> assignments;  // lexicographic order
  std::vector<cplx> components;
  std::vector<double> error_estimates;

  // index of assignment J in the full n^N tensor basis, site 0 slowest
  long state_index(const std::vector<int>& J) const;
  // components embedded into the full tensor basis
  std::vector<cplx> state() const;
};

SolutionVector solve(const WeightProfile& wp, const std::vector<cplx>& betas,
                     const std::vector<int>& jw, const ModelParams& p, double eps = 0.0);

// Exchange consistency of the solution at N = 2: applying the deformed
// transposition to the component vector matches the pairings evaluated with
// the two site variables fed in swapped order.
CheckReport check_solution_exchange(const std::vector<int>& jw, const std::vector<cplx>& betas,
                                    const ModelParams& p, double eps = 0.0);

// Residual of the one-step difference equation in the last site variable,
// in the form f(beta) = R_{N,N-1}(b_N, b_{N-1}) ... R_{N,1}(b_N, b_1)
// f(b_1, ..., b_N + i*lambda), where the right side is evaluated by the
// shifted pairing. Returns max component defect over max right-side
// component. Requires nu_j <= 1 for every layer.
double qkz_step_residual(const WeightProfile& wp, const std::vector<cplx>& betas,
                         const std::vector<int>& jw, const ModelParams& p, double eps = 0.0);

CheckReport check_qkz(const WeightProfile& wp, const std::vector<cplx>& betas,
                      const std::vector<int>& jw, const ModelParams& p, double tol,
                      double eps = 0.0);

// Exhaustive scan of every profile with N <= nsites_max sites and rank
// n <= n_max: chamber profiles must have strictly positive decay exponent
// in every admissible direction; profiles outside the chamber are only
// reported (a nonpositive direction may or may not exist).
CheckReport check_convergence_region(int n_max, int nsites_max);

}  // namespace qkz
