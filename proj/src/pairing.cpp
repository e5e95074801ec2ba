#include "qkz/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qkz {

double decay_exponent(const WeightProfile& wp, const std::vector<int>& x) {
  wp.validate();
  const int n = wp.n();
  if (int(x.size()) != n - 1) throw ConfigInvalid("direction vector needs n-1 entries");
  auto nu = [&](int j) -> int { return (j >= n) ? 0 : wp.nu[size_t(j)]; };
  for (int j = 1; j < n; ++j)
    if (x[size_t(j) - 1] < 0 || x[size_t(j) - 1] > nu(j))
      throw ConfigInvalid("direction entry out of range");
  double m = 0.0;
  for (int j = 1; j < n; ++j)
    m += double(nu(j - 1) + nu(j + 1) - 2 * nu(j)) * double(x[size_t(j) - 1]);
  double quad = 0.0;
  for (int j = 1; j < n; ++j) quad += double(x[size_t(j) - 1]) * double(x[size_t(j) - 1]);
  for (int j = 1; j < n - 1; ++j) quad -= double(x[size_t(j) - 1]) * double(x[size_t(j)]);
  return m + 2.0 * quad;
}

double min_decay_exponent(const WeightProfile& wp) {
  wp.validate();
  const int n = wp.n();
  std::vector<int> x(size_t(n - 1), 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> worst;
  // odometer over all directions with 0 <= x_j <= nu_j, skipping x = 0
  for (;;) {
    int d = 0;
    while (d < n - 1 && x[size_t(d)] == wp.nu[size_t(d) + 1]) {
      x[size_t(d)] = 0;
      ++d;
    }
    if (d == n - 1) break;
    x[size_t(d)] += 1;
    double m = decay_exponent(wp, x);
    if (m < best) {
      best = m;
      worst = x;
    }
  }
  if (!(best > 0.0)) {
    std::ostringstream os;
    os << "integrand does not decay along direction (";
    for (size_t j = 0; j < worst.size(); ++j) os << (j ? "," : "") << worst[j];
    os << "), exponent " << best;
    throw NotConvergent(os.str());
  }
  return best;
}

namespace {

// Imaginary parts y where the adjacent-layer kernel factor has a pole, i.e.
// the pole towers of the coupling weight in the difference variable.
std::vector<double> kernel_pole_levels(const ModelParams& p) {
  std::vector<double> ys;
  for (int k = 0; k <= p.k_max; ++k)
    for (int l = 0; l <= p.k_max; ++l) {
      double y = pi / double(p.n) - double(k) * p.rho - double(l) * p.lambda;
      ys.push_back(y);
      ys.push_back(-y);
    }
  return ys;
}

double dim_count(const WeightProfile& wp) {
  int d = 0;
  for (size_t j = 1; j < wp.nu.size(); ++j) d += wp.nu[j];
  return double(d);
}

void check_flat_pinch(const std::vector<double>& im_offsets_layer0,
                      const std::vector<double>& im_gamma_layers,
                      const ModelParams& p) {
  // Imaginary distance from every adjacent-layer difference line to every
  // kernel pole level; a near-hit pinches the contour.
  const std::vector<double> poles = kernel_pole_levels(p);
  const double r = 0.5 * p.eps_gen;
  const int n = p.n;
  for (int j = 1; j < n; ++j) {
    const double above = im_gamma_layers[size_t(j) - 1];
    if (j == 1) {
      for (double b : im_offsets_layer0)
        for (double y : poles)
          if (std::abs(above - b - y) < r)
            throw ContourPinch("integration line passes through a kernel pole");
    } else {
      const double below = im_gamma_layers[size_t(j) - 2];
      for (double y : poles)
        if (std::abs(above - below - y) < r)
          throw ContourPinch("integration line passes through a kernel pole");
    }
  }
}

}  // namespace

ContourPlan build_contours(const WeightProfile& wp, const std::vector<cplx>& betas,
                           const ModelParams& p, double eps_target) {
  wp.validate();
  p.validate();
  if (wp.n() != p.n) throw ConfigInvalid("profile rank does not match model rank");
  if (int(betas.size()) != wp.nsites())
    throw ConfigInvalid("site variable count does not match profile");

  ContourPlan plan;
  plan.wp = wp;
  plan.eta.assign(size_t(p.n - 1), 0.0);

  const double dims = dim_count(wp);
  plan.eps_target = (eps_target > 0.0) ? eps_target : (dims <= 2.0 ? 1e-6 : 1e-4);

  if (dims == 0.0) return plan;  // nothing to integrate

  plan.decay = 0.5 * pi / p.rho * min_decay_exponent(wp);

  // Narrowest imaginary gap between an integration line and a kernel pole.
  std::vector<double> im0;
  for (const cplx& b : betas) im0.push_back(b.imag());
  std::vector<double> img(size_t(p.n - 1), 0.0);
  check_flat_pinch(im0, img, p);
  double strip = std::numeric_limits<double>::infinity();
  const std::vector<double> poles = kernel_pole_levels(p);
  for (int j = 1; j < p.n; ++j) {
    if (j == 1) {
      for (double b : im0)
        for (double y : poles) strip = std::min(strip, std::abs(-b - y));
    } else {
      for (double y : poles) strip = std::min(strip, std::abs(y));
    }
  }
  plan.strip = strip;

  const double logfac = std::log(10.0 / plan.eps_target);
  plan.step = 2.0 * pi * strip / logfac;

  double re_min = betas[0].real(), re_max = re_min, re_sum = 0.0;
  for (const cplx& b : betas) {
    re_min = std::min(re_min, b.real());
    re_max = std::max(re_max, b.real());
    re_sum += b.real();
  }
  plan.center = re_sum / double(betas.size());
  const double want = logfac / plan.decay + 0.5 * (re_max - re_min);
  const long mhalf = long(std::ceil(want / plan.step));
  plan.half_len = double(mhalf) * plan.step;
  plan.nodes_per_dim = 4 * mhalf + 1;  // fine grid at half the step
  return plan;
}

namespace {

void kadd(double& s, double& comp, double v) {
  const double t = s + v;
  if (std::abs(s) >= std::abs(v))
    comp += (s - t) + v;
  else
    comp += (v - t) + s;
  s = t;
}

std::vector<int> layer_sites(const std::vector<int>& J, int j) {
  std::vector<int> r;
  for (int s = 0; s < int(J.size()); ++s)
    if (J[s] >= j) r.push_back(s);
  return r;
}

std::vector<cplx> apply_order(const std::vector<cplx>& betas, const std::vector<int>& order) {
  if (order.empty()) return betas;
  if (order.size() != betas.size()) throw ConfigInvalid("site order has wrong length");
  std::vector<char> seen(betas.size(), 0);
  std::vector<cplx> out(betas.size());
  for (size_t q = 0; q < order.size(); ++q) {
    int idx = order[q];
    if (idx < 0 || idx >= int(betas.size()) || seen[size_t(idx)])
      throw ConfigInvalid("site order is not a permutation");
    seen[size_t(idx)] = 1;
    out[q] = betas[size_t(idx)];
  }
  return out;
}

struct PairEval {
  const ModelParams* p = nullptr;
  const PairSide* a = nullptr;
  const PairSide* b = nullptr;
  bool psi = false;

  std::vector<cplx> beta_nat;  // natural order, shift already applied
  std::vector<cplx> beta_a, beta_b;

  std::vector<std::pair<int, int>> dims;  // (layer 1-based, slot)
  std::vector<cplx> dim_offset;           // imaginary line offset plus slot shift

  double center = 0.0, h2 = 0.0, decay = 0.0;
  long m2 = 0;  // fine index range [-m2, m2]

  std::vector<std::vector<cplx>> gamma;
  LayeredVariables va, vb;

  double fr = 0, fcr = 0, fi = 0, fci = 0;  // fine sums (Neumaier)
  double cr = 0, ci = 0;                    // coarse subgrid sums
  double edge = 0;                          // |f| weight on the outermost slabs
  long leaves = 0;

  cplx log_phi(cplx z) const {
    const PeriodTriple w(p->rho, p->lambda);
    const cplx off(-pi / double(p->n), 0.0);
    if (z.imag() == 0.0) return cplx(-2.0 * log_double_sine(iu * z + off, w).real(), 0.0);
    return -log_double_sine(iu * z + off, w) - log_double_sine(-iu * z + off, w);
  }

  cplx log_psi(cplx z) const {
    return -log_2sinh(0.25 * double(p->n) * (z - 2.0 * pi * iu / double(p->n))) -
           cplx(0.0, 0.5 * pi);
  }

  cplx side_log(const PairSide& s, bool dual, const std::vector<cplx>& beta_side) {
    LayeredVariables& v = dual ? vb : va;
    v.beta = beta_side;
    v.gamma = gamma;
    if (!s.skewed) return dual ? log_G_J(s.J, v, *p, s.conv) : log_g_J(s.J, v, *p, s.conv);

    // Antisymmetrized side: log-sum-exp over the layer permutations.
    struct Term {
      double sign;
      cplx lg;
    };
    std::vector<Term> terms;
    std::vector<std::vector<int>> perms(gamma.size());
    for (size_t l = 0; l < gamma.size(); ++l) {
      perms[l].resize(gamma[l].size());
      std::iota(perms[l].begin(), perms[l].end(), 0);
    }
    auto inv_sign = [](const std::vector<int>& perm) {
      int inv = 0;
      for (size_t i = 0; i < perm.size(); ++i)
        for (size_t k = i + 1; k < perm.size(); ++k)
          if (perm[i] > perm[k]) ++inv;
      return (inv % 2 == 0) ? 1.0 : -1.0;
    };
    for (;;) {
      double sgn = 1.0;
      for (size_t l = 0; l < gamma.size(); ++l) {
        sgn *= inv_sign(perms[l]);
        for (size_t i = 0; i < gamma[l].size(); ++i)
          v.gamma[l][i] = gamma[l][size_t(perms[l][i])];
      }
      terms.push_back({sgn, dual ? log_G_J(s.J, v, *p, s.conv) : log_g_J(s.J, v, *p, s.conv)});
      size_t l = 0;
      while (l < perms.size() && !std::next_permutation(perms[l].begin(), perms[l].end())) {
        // next_permutation already reset this layer to ascending order
        ++l;
      }
      if (l == perms.size()) break;
    }
    double lmax = -std::numeric_limits<double>::infinity();
    for (const Term& t : terms) lmax = std::max(lmax, t.lg.real());
    if (!std::isfinite(lmax)) return cplx(lmax, 0.0);
    cplx mant = 0.0;
    for (const Term& t : terms) mant += t.sign * std::exp(t.lg - cplx(lmax, 0.0));
    return cplx(lmax, 0.0) + std::log(mant);
  }

  cplx integrand() {
    cplx lg = 0.0;
    const std::vector<cplx>* prev = &beta_nat;
    for (size_t l = 0; l < gamma.size(); ++l) {
      const std::vector<cplx>& cur = gamma[l];
      for (const cplx& g : cur)
        for (const cplx& u : *prev) lg += log_phi(g - u);
      if (psi)
        for (size_t m = 0; m < cur.size(); ++m)
          for (size_t mp = m + 1; mp < cur.size(); ++mp) lg += log_psi(cur[m] - cur[mp]);
      prev = &cur;
    }
    lg += side_log(*a, false, beta_a);
    lg += side_log(*b, true, beta_b);
    return std::exp(lg);
  }

  void run(int d, double wf, double wc, bool even_all, bool edge_any) {
    if (d == int(dims.size())) {
      const cplx f = integrand();
      kadd(fr, fcr, f.real() * wf);
      kadd(fi, fci, f.imag() * wf);
      if (even_all) {
        cr += f.real() * wc;
        ci += f.imag() * wc;
      }
      if (edge_any) edge += std::abs(f) * wf;
      ++leaves;
      return;
    }
    auto [layer, slot] = dims[size_t(d)];
    for (long i = -m2; i <= m2; ++i) {
      const bool at_edge = (i == -m2 || i == m2);
      const bool even = ((i & 1L) == 0);
      gamma[size_t(layer) - 1][size_t(slot)] =
          cplx(center + double(i) * h2, 0.0) + dim_offset[size_t(d)];
      const double w_end = at_edge ? 0.5 : 1.0;
      run(d + 1, wf * w_end, even ? wc * w_end : wc, even_all && even, edge_any || at_edge);
    }
  }
};

PairingResult run_pairing(const PairSide& a, const PairSide& b, const std::vector<cplx>& betas,
                          const ContourPlan& plan, const ModelParams& p, bool psi_kernel,
                          cplx shift, const std::vector<char>& layer_moves) {
  p.validate();
  plan.wp.validate();
  const int n = p.n;
  if (int(plan.wp.nu.size()) != n) throw ConfigInvalid("contour plan rank does not match model");
  if (profile_of(a.J, n).nu != plan.wp.nu || profile_of(b.J, n).nu != plan.wp.nu)
    throw ConfigInvalid("assignments do not share the contour plan's profile");
  if (int(betas.size()) != plan.wp.nsites())
    throw ConfigInvalid("site variable count does not match profile");
  if (plan.eta.size() != size_t(n - 1)) throw ConfigInvalid("contour plan has wrong layer count");

  PairEval ev;
  ev.p = &p;
  ev.a = &a;
  ev.b = &b;
  ev.psi = psi_kernel;

  ev.beta_nat = betas;
  if (!layer_moves.empty() && layer_moves[0]) ev.beta_nat.back() += shift;
  ev.beta_a = apply_order(ev.beta_nat, a.beta_order);
  ev.beta_b = apply_order(ev.beta_nat, b.beta_order);

  ev.gamma.resize(size_t(n - 1));
  for (int j = 1; j < n; ++j) {
    ev.gamma[size_t(j) - 1].assign(size_t(plan.wp.nu[size_t(j)]), cplx(0.0));
    for (int m = 0; m < plan.wp.nu[size_t(j)]; ++m) {
      ev.dims.emplace_back(j, m);
      cplx off(0.0, plan.eta[size_t(j) - 1]);
      const bool moves = !layer_moves.empty() && size_t(j) < layer_moves.size() &&
                         layer_moves[size_t(j)] && m == plan.wp.nu[size_t(j)] - 1;
      if (moves) off += shift;
      ev.dim_offset.push_back(off);
    }
  }

  PairingResult res;
  if (ev.dims.empty()) {
    res.value = ev.integrand();
    res.node_counts.clear();
    res.decay_exponent_used = 0.0;
    return res;
  }

  if (!(plan.step > 0.0) || plan.nodes_per_dim < 5 || !(plan.decay > 0.0))
    throw ConfigInvalid("contour plan was not built for this profile");

  // Re-run the pinch check with the actual line offsets.
  {
    std::vector<double> im0;
    for (const cplx& bv : ev.beta_nat) im0.push_back(bv.imag());
    std::vector<double> img(size_t(n - 1), 0.0);
    for (size_t d = 0; d < ev.dims.size(); ++d) {
      // a shifted last slot puts that slot on its own line; check both
      const auto [layer, slot] = ev.dims[d];
      (void)slot;
      img[size_t(layer) - 1] = plan.eta[size_t(layer) - 1];
    }
    check_flat_pinch(im0, img, p);
    for (size_t d = 0; d < ev.dims.size(); ++d) {
      if (ev.dim_offset[d].imag() == 0.0) continue;
      std::vector<double> img2 = img;
      img2[size_t(ev.dims[d].first) - 1] += ev.dim_offset[d].imag();
      check_flat_pinch(im0, img2, p);
    }
  }

  ev.center = plan.center;
  ev.h2 = 0.5 * plan.step;
  ev.m2 = (plan.nodes_per_dim - 1) / 2;
  ev.decay = plan.decay;

  ev.run(0, 1.0, 1.0, true, false);

  const int D = int(ev.dims.size());
  const double volf = std::pow(ev.h2, D);
  const double volc = std::pow(plan.step, D);
  const cplx fine(ev.fr + ev.fcr, ev.fi + ev.fci);
  const cplx coarse(ev.cr, ev.ci);
  res.value = fine * volf;

  const double ratio = std::exp(-plan.decay * ev.h2);
  const double tail = ev.edge * volf * ratio / (1.0 - ratio);
  res.abs_error_estimate = std::abs(fine * volf - coarse * volc) + tail;
  res.node_counts.assign(size_t(D), plan.nodes_per_dim);
  res.decay_exponent_used = plan.decay;
  return res;
}

// Whether some hyperbolic factor of side `s` vanishes on the manifold where
// the kernel factor coupling (j, m) to (j-1, mp) has its pole at imaginary
// distance y. `pos_below` is the evaluation position the lower variable
// occupies on this side (for layer 0 this depends on the site order).
bool side_cancels(const PairSide& s, int n, double period, int j, int m, int mp, int pos_below,
                  double y) {
  const std::vector<int> above = layer_sites(s.J, j);
  const std::vector<int> below = (j == 1) ? std::vector<int>() : layer_sites(s.J, j - 1);
  const int site_above = above.at(size_t(m));
  const int site_below = (j == 1) ? pos_below : below.at(size_t(mp));
  if (site_above == site_below) return false;
  // factor sh(scale (gamma_above - var_below + off)), off = +i pi/n when the
  // lower site comes first; zeros at difference = -off + i * period * Z
  const double base = (site_below < site_above) ? -pi / double(n) : pi / double(n);
  const double k = std::round((y - base) / period);
  return std::abs(y - base - k * period) < 1e-9;
}

int count_unmatched_transits(const PairSide& a, const PairSide& b, const WeightProfile& wp,
                             const ModelParams& p, cplx shift, bool psi_kernel,
                             const std::vector<char>& layer_moves) {
  const int n = p.n;
  const int nsites = wp.nsites();
  const double sweep_unit = shift.imag();
  const double tol = 1e-9;
  auto moving_slot = [&](int j, int m) -> bool {
    if (j == 0) return m == nsites - 1;
    return size_t(j) < layer_moves.size() && layer_moves[size_t(j)] &&
           m == wp.nu[size_t(j)] - 1;
  };
  auto pos_in_order = [&](const PairSide& s, int natural_idx) {
    if (s.beta_order.empty()) return natural_idx;
    for (size_t q = 0; q < s.beta_order.size(); ++q)
      if (s.beta_order[q] == natural_idx) return int(q);
    throw ConfigInvalid("site order is not a permutation");
  };

  int unmatched = 0;
  const std::vector<double> poles = kernel_pole_levels(p);
  for (int j = 1; j < n; ++j) {
    const int cnt_above = wp.nu[size_t(j)];
    const int cnt_below = (j == 1) ? nsites : wp.nu[size_t(j) - 1];
    for (int m = 0; m < cnt_above; ++m)
      for (int mp = 0; mp < cnt_below; ++mp) {
        const int delta = (moving_slot(j, m) ? 1 : 0) - (moving_slot(j - 1, mp) ? 1 : 0);
        if (delta == 0) continue;
        const double sweep = double(delta) * sweep_unit;
        for (double y : poles) {
          const bool crossed = (sweep > 0.0) ? (y > tol && y < sweep - tol)
                                             : (y < -tol && y > sweep + tol);
          if (!crossed) continue;
          const int pa = (j == 1) ? pos_in_order(a, mp) : mp;
          const int pb = (j == 1) ? pos_in_order(b, mp) : mp;
          const bool ok = side_cancels(a, n, p.rho, j, m, mp, pa, y) ||
                          side_cancels(b, n, p.lambda, j, m, mp, pb, y);
          if (!ok) ++unmatched;
        }
      }
    if (psi_kernel) {
      // poles of the intra-layer weight in gamma_m - gamma_mp
      for (int m = 0; m < cnt_above; ++m)
        for (int mp = m + 1; mp < cnt_above; ++mp) {
          const int delta = (moving_slot(j, m) ? 1 : 0) - (moving_slot(j, mp) ? 1 : 0);
          if (delta == 0) continue;
          const double sweep = double(delta) * sweep_unit;
          for (int k = -p.k_max; k <= p.k_max; ++k) {
            const double y = 2.0 * pi / double(n) + double(k) * p.lambda;
            const bool crossed = (sweep > 0.0) ? (y > tol && y < sweep - tol)
                                               : (y < -tol && y > sweep + tol);
            if (!crossed) continue;
            // the antisymmetric-side intra factor vanishes on
            // gamma_mp - gamma_m = 2 pi i/n + i rho Z
            const double base = -2.0 * pi / double(n);
            const double kk = std::round((y - base) / p.rho);
            if (std::abs(y - base - kk * p.rho) >= 1e-9) ++unmatched;
          }
        }
    }
  }
  return unmatched;
}

// A shifted line sits closer to some pole towers than the flat one the plan
// was built for, so the step has to shrink accordingly.
ContourPlan plan_with_shift(const ContourPlan& plan, const std::vector<cplx>& betas,
                            const ModelParams& p, cplx shift) {
  const double s = shift.imag();
  if (s == 0.0 || plan.nodes_per_dim == 0) return plan;
  double strip = plan.strip;
  const std::vector<double> poles = kernel_pole_levels(p);
  std::vector<double> nets = {s, -s};
  for (const cplx& bv : betas) {
    nets.push_back(s - bv.imag());
    nets.push_back(-s - bv.imag());
  }
  for (double net : nets)
    for (double y : poles) strip = std::min(strip, std::abs(net - y));

  ContourPlan eff = plan;
  eff.strip = strip;
  const double logfac = std::log(10.0 / plan.eps_target);
  eff.step = 2.0 * pi * strip / logfac;
  double re_min = betas[0].real(), re_max = re_min;
  for (const cplx& bv : betas) {
    re_min = std::min(re_min, bv.real());
    re_max = std::max(re_max, bv.real());
  }
  const double want = logfac / plan.decay + 0.5 * (re_max - re_min) + std::abs(shift.real());
  const long mhalf = long(std::ceil(want / eff.step));
  eff.half_len = double(mhalf) * eff.step;
  eff.nodes_per_dim = 4 * mhalf + 1;
  return eff;
}

}  // namespace

PairingResult pair(const PairSide& a, const PairSide& b, const std::vector<cplx>& betas,
                   const ContourPlan& plan, const ModelParams& p, bool psi_kernel) {
  return run_pairing(a, b, betas, plan, p, psi_kernel, cplx(0.0), {});
}

PairingResult shifted_pair(const PairSide& a, const PairSide& b, const std::vector<cplx>& betas,
                           const ContourPlan& plan, const ModelParams& p, cplx shift,
                           bool psi_kernel, bool strict) {
  if (a.skewed || b.skewed)
    throw ConfigInvalid("shifted pairing is defined for elementary sides only");
  if (a.J.empty()) throw ConfigInvalid("assignment is empty");
  const int j_last = a.J.back();
  std::vector<char> layer_moves(size_t(j_last) + 1, 1);  // site slot + layers 1..j_last
  const int unmatched =
      count_unmatched_transits(a, b, plan.wp, p, shift, psi_kernel, layer_moves);
  if (strict && unmatched > 0) {
    std::ostringstream os;
    os << unmatched << " kernel pole(s) cross the shifted lines without a matching zero";
    throw PoleCrossing(os.str());
  }
  const ContourPlan eff = plan_with_shift(plan, betas, p, shift);
  PairingResult res = run_pairing(a, b, betas, eff, p, psi_kernel, shift, layer_moves);
  res.unmatched_transits = unmatched;
  return res;
}

}  // namespace qkz
