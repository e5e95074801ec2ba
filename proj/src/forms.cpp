#include "qkz/forms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qkz {

void WeightProfile::validate() const {
  if (nu.size() < 2) throw InvalidProfile("profile needs at least two levels");
  if (nu[0] < 1) throw InvalidProfile("profile must have at least one site");
  for (size_t j = 0; j + 1 < nu.size(); ++j)
    if (nu[j] < nu[j + 1]) throw InvalidProfile("profile must be weakly decreasing");
  if (nu.back() < 0) throw InvalidProfile("profile entries must be non-negative");
}

bool WeightProfile::weyl_positive() const {
  validate();
  for (size_t j = 1; j < nu.size(); ++j) {
    const int above = (j + 1 < nu.size()) ? nu[j + 1] : 0;
    if (nu[j - 1] + above < 2 * nu[j]) return false;
  }
  return true;
}

long long WeightProfile::assignment_count() const {
  validate();
  auto binom = [](int a, int b) {
    long long r = 1;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  long long c = 1;
  for (size_t j = 1; j < nu.size(); ++j) c *= binom(nu[j - 1], nu[j]);
  return c;
}

WeightProfile profile_of(const std::vector<int>& J, int n) {
  WeightProfile wp;
  wp.nu.assign(size_t(n), 0);
  for (int jr : J) {
    if (jr < 0 || jr >= n) throw InvalidProfile("letter out of range");
    for (int j = 0; j <= jr; ++j) wp.nu[size_t(j)] += 1;
  }
  wp.validate();
  return wp;
}

std::vector<std::vector<int>> enumerate_assignments(const WeightProfile& wp) {
  wp.validate();
  const int n = wp.n();
  std::vector<int> seq;
  for (int j = 0; j < n; ++j) {
    int count = wp.nu[size_t(j)] - (j + 1 < n ? wp.nu[size_t(j) + 1] : 0);
    seq.insert(seq.end(), size_t(count), j);
  }
  if (int(seq.size()) != wp.nsites()) throw InvalidProfile("profile is inconsistent");
  std::vector<std::vector<int>> out;
  std::sort(seq.begin(), seq.end());
  do {
    out.push_back(seq);
  } while (std::next_permutation(seq.begin(), seq.end()));
  return out;
}

namespace {

int perm_sign(const std::vector<int>& perm) {
  int inv = 0;
  for (size_t i = 0; i < perm.size(); ++i)
    for (size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

// sites (ascending, zero-based) whose letter is >= j
std::vector<int> layer_sites(const std::vector<int>& J, int j) {
  std::vector<int> r;
  for (int s = 0; s < int(J.size()); ++s)
    if (J[s] >= j) r.push_back(s);
  return r;
}

cplx log_layered_product(const std::vector<int>& J, const LayeredVariables& v,
                         const ModelParams& p, ExpConvention conv, double scale,
                         bool intra_layer) {
  const int n = p.n;
  const cplx c = pi * iu / double(n);
  const cplx mult = (conv == ExpConvention::real) ? cplx(scale) : cplx(scale) * iu;

  if (int(v.beta.size()) != int(J.size()))
    throw InvalidProfile("variable layout does not match assignment length");
  if (int(v.gamma.size()) != n - 1)
    throw InvalidProfile("variable layout needs n-1 auxiliary layers");

  std::vector<int> prev_sites(J.size());
  std::iota(prev_sites.begin(), prev_sites.end(), 0);
  const std::vector<cplx>* prev = &v.beta;

  cplx lg = 0.0;
  for (int j = 1; j < n; ++j) {
    const std::vector<int> cur_sites = layer_sites(J, j);
    const std::vector<cplx>& cur = v.gamma[size_t(j) - 1];
    if (cur.size() != cur_sites.size()) {
      std::ostringstream os;
      os << "layer " << j << " has " << cur.size() << " variables, assignment needs "
         << cur_sites.size();
      throw InvalidProfile(os.str());
    }

    cplx esum = 0.0;
    for (size_t m = 0; m < cur_sites.size(); ++m) {
      auto it = std::find(prev_sites.begin(), prev_sites.end(), cur_sites[m]);
      esum += (*prev)[size_t(it - prev_sites.begin())] - cur[m];
    }
    lg += mult * esum;

    for (size_t m = 0; m < cur.size(); ++m)
      for (size_t mp = 0; mp < prev->size(); ++mp) {
        if (prev_sites[mp] == cur_sites[m]) continue;
        cplx off = (prev_sites[mp] < cur_sites[m]) ? c : -c;
        lg += log_2sinh(scale * (cur[m] - (*prev)[mp] + off)) - std::log(2.0);
      }

    if (intra_layer)
      for (size_t m = 0; m < cur.size(); ++m)
        for (size_t mp = m + 1; mp < cur.size(); ++mp)
          lg += log_2sinh(scale * (cur[mp] - cur[m] - 2.0 * c)) - std::log(2.0);

    prev_sites = cur_sites;
    prev = &cur;
  }
  return lg;
}

}  // namespace

FormFn skew(int layer, FormFn f) {
  return [layer, f](const LayeredVariables& v) -> cplx {
    const auto& lay = v.gamma.at(size_t(layer) - 1);
    const int m = int(lay.size());
    if (m <= 1) return f(v);
    std::vector<int> perm(static_cast<size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    cplx acc = 0.0;
    LayeredVariables w = v;
    do {
      for (int i = 0; i < m; ++i) w.gamma[size_t(layer) - 1][size_t(i)] = lay[size_t(perm[size_t(i)])];
      acc += double(perm_sign(perm)) * f(w);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
  };
}

cplx log_g_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
             ExpConvention conv) {
  return log_layered_product(J, v, p, conv, pi / p.rho, true);
}

cplx log_G_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
             ExpConvention conv) {
  return log_layered_product(J, v, p, conv, 0.25 * p.n, false);
}

cplx g_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
         ExpConvention conv) {
  return std::exp(log_g_J(J, v, p, conv));
}

cplx G_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
         ExpConvention conv) {
  return std::exp(log_G_J(J, v, p, conv));
}

namespace {

cplx skew_all(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
              ExpConvention conv, cplx (*base)(const std::vector<int>&, const LayeredVariables&,
                                               const ModelParams&, ExpConvention)) {
  FormFn f = [&J, &p, conv, base](const LayeredVariables& vars) { return base(J, vars, p, conv); };
  for (int j = 1; j < p.n; ++j) f = skew(j, f);
  return f(v);
}

}  // namespace

cplx w_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
         ExpConvention conv) {
  return skew_all(J, v, p, conv, &g_J);
}

cplx W_J(const std::vector<int>& J, const LayeredVariables& v, const ModelParams& p,
         ExpConvention conv) {
  return skew_all(J, v, p, conv, &G_J);
}

}  // namespace qkz
