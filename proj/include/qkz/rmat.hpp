#pragma once

#include <vector>

#include "qkz/specfn.hpp"

namespace qkz {

// Two-site operator on C^n (x) C^n, stored dense. entry(out1, out2, in1, in2)
// is the coefficient of basis state (out1, out2) in the image of (in1, in2);
// matrix-vector products read out = R * in.
struct RMatrixValue {
  int n = 0;
  std::vector<cplx> m;

  explicit RMatrixValue(int n_) : n(n_), m(size_t(n_) * n_ * n_ * n_, cplx(0.0)) {}

  cplx& entry(int out1, int out2, int in1, int in2) {
    return m[size_t(((out1 * n + out2) * n + in1) * n + in2)];
  }
  cplx entry(int out1, int out2, int in1, int in2) const {
    return m[size_t(((out1 * n + out2) * n + in1) * n + in2)];
  }
};

// Trigonometric exchange matrix, normalized so equal indices scatter with
// coefficient one. Depends on beta1, beta2 only through the difference.
RMatrixValue rbar(cplx beta1, cplx beta2, const ModelParams& p);

// Variant with the sign of the index-preserving (j,k), j != k, entries
// flipped; this is the operator the difference equations are written with.
RMatrixValue r_modified(cplx beta1, cplx beta2, const ModelParams& p);

// Apply R to legs (r_leg, s_leg) of a state on nsites tensor factors of C^n.
// Component layout of state: index = sum_k j_k * n^(nsites-1-k), i.e. leg 0
// varies slowest. Legs are zero-based and must be distinct.
std::vector<cplx> apply_r(const std::vector<cplx>& state, int nsites, int r_leg,
                          int s_leg, const RMatrixValue& R);

// Right-hand side of the difference system in the one-step form: the product
// R_{r,r-1}(beta_r - i*lambda, beta_{r-1}) ... R_{r,0}(beta_r - i*lambda, beta_0)
// applied to state. Only the last leg (r = nsites-1) is supported, where the
// wrap-around block is empty; the level-zero diagonal twist is the identity.
std::vector<cplx> qkz_rhs(const std::vector<cplx>& state, int nsites, int r,
                          const std::vector<cplx>& betas, const ModelParams& p);

}  // namespace qkz
