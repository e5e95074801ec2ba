#pragma once

#include <complex>
#include <vector>

#include "qkz/errors.hpp"

namespace qkz {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cplx iu{0.0, 1.0};

// Quasi-periods of a multiple sine function: two entries for the double
// sine, three for the triple sine. All must be strictly positive.
struct PeriodTriple {
  std::vector<double> omega;

  PeriodTriple(double w1, double w2) : omega{w1, w2} {}
  PeriodTriple(double w1, double w2, double w3) : omega{w1, w2, w3} {}

  double sum() const;
  double min() const;
  double max() const;
  void validate() const;  // throws ConfigInvalid
};

// Model data: rank parameter n >= 2, temperature-like scale rho > 0,
// the fixed step lambda = 4*pi/n, and the unit-modulus deformation
// q = exp(-2*pi^2*i/(rho*n)).
struct ModelParams {
  int n = 2;
  double rho = 2.0;
  double lambda = 2.0 * pi;
  cplx q{0.0, 0.0};

  // Resonance guard: rejects parameters where pole and zero lattices of the
  // contour kernels collide, i.e. where pi/n or 2*pi/n lies within eps_gen
  // of the lattice {k*rho + l*lambda : 0 <= k,l <= k_max}.
  int k_max = 8;
  double eps_gen = 1e-6;

  static ModelParams make(int n, double rho);
  void validate() const;  // throws ConfigInvalid
};

// log S2 / log S3 on the full plane minus pole and zero lattices, by the
// contour-free integral representation plus quasi-periodicity reduction.
// The imaginary part of the log is only meaningful modulo 2*pi; callers
// that need single-valued data should exponentiate.
cplx log_double_sine(cplx x, const PeriodTriple& w);
cplx log_triple_sine(cplx x, const PeriodTriple& w);

cplx double_sine(cplx x, const PeriodTriple& w);
cplx triple_sine(cplx x, const PeriodTriple& w);

// Unitary scattering factor s(beta): ratio of four double sines with
// periods (rho, 2*pi). |s| = 1 on the real line.
cplx s_factor(cplx beta, const ModelParams& p);

// Symmetric contour kernel varphi(beta) = 1 / (S2(i*beta - pi/n) *
// S2(-i*beta - pi/n)) at periods (rho, lambda). Even in beta, positive on
// the real line, decays like exp(-(n/4 + 3*pi/(2*rho)) * |beta|).
cplx varphi(cplx beta, const ModelParams& p);

// log |varphi| for real argument; cheaper than varphi and safe far out in
// the tails where varphi itself underflows.
double log_abs_varphi(double beta, const ModelParams& p);

// Exchange kernel at level zero, in closed form: 1/(2i*sh(n*(beta - 2*pi*i/n)/4)).
cplx psi_level0(cplx beta, const ModelParams& p);

// Product of three hyperbolic sines vanishing at beta = 0, +-2*pi*i/n
// (mod i*period); period defaults to lambda.
cplx h_factor(cplx beta, const ModelParams& p);
cplx h_factor(cplx beta, double period, const ModelParams& p);

// Triple-sine ratio E(beta) with periods (rho, lambda, 2*pi); satisfies
// E(lambda*i - beta) = E(beta) and E(beta)/E(-beta) = s(beta).
cplx e_lambda(cplx beta, const ModelParams& p);

// Numerically robust log(2*sinh(z)) and log(2*sin(z)); imaginary part not
// reduced to a principal branch.
cplx log_2sinh(cplx z);
cplx log_2sin(cplx z);

}  // namespace qkz
