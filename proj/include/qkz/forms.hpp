#pragma once

#include <functional>
#include <vector>

#include "qkz/specfn.hpp"

namespace qkz {

// Occupation profile nu_0 >= nu_1 >= ... >= nu_{n-1} (>= nu_n = 0), where
// nu_0 = N is the number of sites and nu_j counts sites carrying a letter
// >= j. Layer j of auxiliary variables has nu_j entries.
struct WeightProfile {
  std::vector<int> nu;

  int n() const { return int(nu.size()); }
  int nsites() const { return nu.empty() ? 0 : nu[0]; }
  void validate() const;  // throws InvalidProfile
  bool weyl_positive() const;  // nu_{j-1} + nu_{j+1} >= 2 nu_j for every layer
  long long assignment_count() const;
};

// Letter sequences: J[r] in {0, ..., n-1} with #{r : J[r] >= j} = nu_j.
WeightProfile profile_of(const std::vector<int>& J, int n);
std::vector<std::vector<int>> enumerate_assignments(const WeightProfile& wp);

// Evaluation point: layer 0 holds the N site variables, gamma[j-1] the
// layer-j auxiliary variables (nu_j of them, position-ordered).
struct LayeredVariables {
  std::vector<cplx> beta;
  std::vector<std::vector<cplx>> gamma;
};

enum class ExpConvention { real, imaginary };

using FormFn = std::function<cplx(const LayeredVariables&)>;

// Signed antisymmetrization over the variables of one layer (1-based), as a
// plain sum over permutations without a 1/nu! normalization.
FormFn skew(int layer, FormFn f);

// Elementary layered product attached to an assignment J: per layer, one
// exponential prefactor, hyperbolic factors coupling the layer to the one
// below, and (on this side) the intra-layer coupling. The prefactor scale is
// pi/rho; the alternative convention multiplies the exponent by i and is
// kept only to document that it fails the exchange relations.
cplx g_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
         ExpConvention conv = ExpConvention::real);

// Full antisymmetrization of g_J over every layer.
cplx w_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
         ExpConvention conv = ExpConvention::real);

// Dual-side analogues: same bookkeeping at scale n/4 and without the
// intra-layer factors.
cplx G_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
         ExpConvention conv = ExpConvention::real);
cplx W_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
         ExpConvention conv = ExpConvention::real);

// Logarithms of the elementary products, stable far out on the contours
// where the products themselves overflow. exp() of the result reproduces
// g_J / G_J; the imaginary part is not reduced mod 2*pi.
cplx log_g_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
             ExpConvention conv = ExpConvention::real);
cplx log_G_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
             ExpConvention conv = ExpConvention::real);

}  // namespace qkz
