#pragma once

#include <vector>

#include "qkz/forms.hpp"

namespace qkz {

// Exponent governing integrand decay when x_j of the layer-j variables are
// sent to infinity together; x has one entry per layer, 0 <= x_j <= nu_j.
// Positivity for every admissible nonzero x is what makes the multiple
// integral converge absolutely.
double decay_exponent(const WeightProfile& wp, const std::vector<int>& x);

// Minimum of decay_exponent over all admissible nonzero directions, by
// exhaustion. Throws NotConvergent (with a witness) if the minimum is <= 0.
double min_decay_exponent(const WeightProfile& wp);

// Straight-line quadrature layout shared by every integration variable:
// nodes c + k*h on [c - L, c + L], one imaginary offset per layer. The
// contours are kept flat; a kernel pole closer to a line than half the
// genericity margin raises ContourPinch instead of being indented around.
struct ContourPlan {
  WeightProfile wp;
  std::vector<double> eta;  // per-layer imaginary offset (flat: all zero)
  double center = 0.0;
  double half_len = 0.0;
  double step = 0.0;         // coarse step; evaluation refines once
  long nodes_per_dim = 0;    // fine node count
  double eps_target = 0.0;
  double decay = 0.0;        // slowest decay rate used for truncation
  double strip = 0.0;        // analyticity half-width used for the step rule
};

ContourPlan build_contours(const WeightProfile& wp, const std::vector<cplx>& betas,
                           const ModelParams& p, double eps_target = 0.0);

// One factor of the pairing: an assignment, the order in which the site
// variables are fed to it, and whether the fully antisymmetrized form is
// evaluated (skewed = false evaluates the elementary product).
struct PairSide {
  std::vector<int> J;
  std::vector<int> beta_order;  // empty means identity
  bool skewed = false;
  ExpConvention conv = ExpConvention::real;
};

struct PairingResult {
  cplx value{0.0, 0.0};
  double abs_error_estimate = 0.0;
  std::vector<long> node_counts;
  double decay_exponent_used = 0.0;
  int unmatched_transits = 0;  // only set by shifted evaluations
};

// Integral over the plan's contours of kernel * A * B, where A is the
// lower-side form of a (scale pi/rho, intra-layer factors), B the dual-side
// form of b (scale n/4), and the kernel couples adjacent layers through
// varphi. No normalization factors are applied; the antisymmetrized pairing
// equals prod_j nu_j! times the unskewed one on these common flat contours.
PairingResult pair(const PairSide& a, const PairSide& b, const std::vector<cplx>& betas,
                   const ContourPlan& plan, const ModelParams& p, bool psi_kernel = false);

// Same integral with the last site variable translated by `shift` and, in
// lockstep, the last variable of every layer up to the last site's letter
// (taken from a.J). Only unskewed sides are meaningful here, since the
// translated slot is not exchangeable with the others. With strict = true a
// pole of the kernel swept across a contour without a matching zero of the
// forms raises PoleCrossing; otherwise such transits are only counted.
PairingResult shifted_pair(const PairSide& a, const PairSide& b,
                           const std::vector<cplx>& betas, const ContourPlan& plan,
                           const ModelParams& p, cplx shift, bool psi_kernel = false,
                           bool strict = false);

}  // namespace qkz
