#include "qkz/rmat.hpp"

#include <cmath>
#include <sstream>

namespace qkz {

namespace {

RMatrixValue build_r(cplx beta1, cplx beta2, const ModelParams& p, bool flip_diag) {
  const int n = p.n;
  const double pr = pi / p.rho;
  const cplx d = beta1 - beta2;
  const cplx two_c = 2.0 * pi * iu / double(n);

  cplx den = std::sinh(pr * (d - two_c));
  if (std::abs(den) < 1e-12) {
    std::ostringstream os;
    os << "exchange matrix singular: beta1 - beta2 = " << d.real() << (d.imag() < 0 ? " - " : " + ")
       << std::abs(d.imag()) << "i lies on the 2*pi*i/n + i*rho*Z line";
    throw SingularDenominator(os.str());
  }

  // sh(pi/rho * 2*pi*i/n) = (q^{-1} - q)/2 in terms of the deformation q
  cplx num_exch = std::sinh(pr * two_c);
  cplx diag = -std::sinh(pr * d) / den;
  if (flip_diag) diag = -diag;

  RMatrixValue R(n);
  for (int j = 0; j < n; ++j) R.entry(j, j, j, j) = 1.0;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      R.entry(j, k, j, k) = diag;
      // index-swapping entry, input (j,k) -> output (k,j)
      double sgn = (j < k) ? 1.0 : -1.0;
      R.entry(k, j, j, k) = -std::exp(sgn * pr * d) * num_exch / den;
    }
  }
  return R;
}

}  // namespace

RMatrixValue rbar(cplx beta1, cplx beta2, const ModelParams& p) {
  return build_r(beta1, beta2, p, false);
}

RMatrixValue r_modified(cplx beta1, cplx beta2, const ModelParams& p) {
  return build_r(beta1, beta2, p, true);
}

std::vector<cplx> apply_r(const std::vector<cplx>& state, int nsites, int r_leg,
                          int s_leg, const RMatrixValue& R) {
  const int n = R.n;
  if (nsites < 2) throw LegOutOfRange("need at least two tensor factors");
  if (r_leg < 0 || r_leg >= nsites || s_leg < 0 || s_leg >= nsites || r_leg == s_leg) {
    std::ostringstream os;
    os << "legs (" << r_leg << ", " << s_leg << ") invalid for " << nsites << " sites";
    throw LegOutOfRange(os.str());
  }
  size_t dim = 1;
  for (int k = 0; k < nsites; ++k) dim *= size_t(n);
  if (state.size() != dim) throw LegOutOfRange("state size does not match n^nsites");

  size_t str_r = 1, str_s = 1;
  for (int k = r_leg + 1; k < nsites; ++k) str_r *= size_t(n);
  for (int k = s_leg + 1; k < nsites; ++k) str_s *= size_t(n);

  std::vector<cplx> out(dim, cplx(0.0));
  for (size_t idx = 0; idx < dim; ++idx) {
    int jr = int(idx / str_r) % n;
    int js = int(idx / str_s) % n;
    if (jr != 0 || js != 0) continue;  // enumerate each (r,s)-fiber once
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        cplx acc = 0.0;
        for (int c = 0; c < n; ++c)
          for (int e = 0; e < n; ++e) {
            cplx coeff = R.entry(a, b, c, e);
            if (coeff == cplx(0.0)) continue;
            acc += coeff * state[idx + size_t(c) * str_r + size_t(e) * str_s];
          }
        out[idx + size_t(a) * str_r + size_t(b) * str_s] = acc;
      }
  }
  return out;
}

std::vector<cplx> qkz_rhs(const std::vector<cplx>& state, int nsites, int r,
                          const std::vector<cplx>& betas, const ModelParams& p) {
  if (int(betas.size()) != nsites) throw LegOutOfRange("betas size does not match nsites");
  if (r != nsites - 1)
    throw LegOutOfRange("one-step form only implemented for the last leg");
  cplx shifted = betas[r] - iu * p.lambda;
  std::vector<cplx> v = state;
  for (int s = 0; s < r; ++s)
    v = apply_r(v, nsites, r, s, r_modified(shifted, betas[s], p));
  return v;
}

}  // namespace qkz
