#include "qkz/specfn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace qkz {

double PeriodTriple::sum() const {
  double s = 0.0;
  for (double w : omega) s += w;
  return s;
}

double PeriodTriple::min() const { return *std::min_element(omega.begin(), omega.end()); }
double PeriodTriple::max() const { return *std::max_element(omega.begin(), omega.end()); }

void PeriodTriple::validate() const {
  if (omega.size() != 2 && omega.size() != 3)
    throw ConfigInvalid("period list must have 2 or 3 entries");
  for (double w : omega)
    if (!(w > 0.0) || !std::isfinite(w))
      throw ConfigInvalid("periods must be positive finite reals");
}

ModelParams ModelParams::make(int n, double rho) {
  ModelParams p;
  p.n = n;
  p.rho = rho;
  p.lambda = 4.0 * pi / n;
  double arg = -2.0 * pi * pi / (rho * n);
  p.q = cplx(std::cos(arg), std::sin(arg));
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (n < 2) throw ConfigInvalid("n must be at least 2");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigInvalid("rho must be a positive real");
  if (std::abs(lambda - 4.0 * pi / n) > 1e-12)
    throw ConfigInvalid("lambda must equal 4*pi/n");
  if (std::abs(std::abs(q) - 1.0) > 1e-12)
    throw ConfigInvalid("q must have unit modulus");
  // Genericity: the kernel pole offsets pi/n and 2*pi/n must stay clear of
  // the period lattice, otherwise poles of the integrand collide with zeros
  // and the contour machinery breaks down.
  for (int k = 0; k <= k_max; ++k) {
    for (int l = 0; l <= k_max; ++l) {
      double latt = k * rho + l * lambda;
      auto fail = [&](const char* which) {
        std::ostringstream os;
        os << "degenerate parameters: " << which << " within " << eps_gen
           << " of lattice point k=" << k << " l=" << l;
        throw ConfigInvalid(os.str());
      };
      if (std::abs(pi / n - latt) <= eps_gen) fail("pi/n");
      if (std::abs(2.0 * pi / n + latt) <= eps_gen) fail("2*pi/n (sum)");
      if (std::abs(2.0 * pi / n - latt) <= eps_gen) fail("2*pi/n");
    }
  }
}

cplx log_2sinh(cplx z) {
  // 2*sh(z) = e^z (1 - e^{-2z}) keeps every exponent non-increasing, so no
  // overflow for any argument. The branch of the result is not normalized.
  // Near the origin the subtraction 1 - e^{-2z} loses digits, so evaluate
  // sinh directly there.
  if (std::abs(z.real()) + std::abs(z.imag()) < 0.5) return std::log(2.0 * std::sinh(z));
  if (z.real() > 0.0)
    return z + std::log(1.0 - std::exp(-2.0 * z));
  return -z + std::log(1.0 - std::exp(2.0 * z)) + cplx(0.0, pi);
}

cplx log_2sin(cplx z) { return log_2sinh(iu * z) - cplx(0.0, 0.5 * pi); }

namespace {

// ---------------------------------------------------------------------------
// Gauss-Legendre panel rule used for the t-integrals below.

struct Gauss16 {
  double x[16];
  double w[16];
  Gauss16() {
    const int n = 16;
    for (int i = 0; i < n / 2; ++i) {
      double t = std::cos(pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (t * p1 - p0) / (t * t - 1.0);
        double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-16) break;
      }
      x[i] = -t;
      x[n - 1 - i] = t;
      w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

const Gauss16& gauss16() {
  static const Gauss16 g;
  return g;
}

// ---------------------------------------------------------------------------
// Power series in u = t^2 for the small-t part of the integrals. The naive
// integrand is a difference of terms that diverge like 1/t (double sine) or
// 1/t^3 (triple sine); evaluating that difference in doubles near t = 0 loses
// all significant digits. On [0, t_patch] we instead integrate the Taylor
// series of the bracket, which is exact term by term.

using cvec = std::vector<cplx>;

cvec sinhc_series(cplx half, int len) {
  // sh(z)/z with z = half*t, as a series in u = t^2
  cvec c(len);
  c[0] = 1.0;
  cplx z2 = half * half;
  for (int k = 1; k < len; ++k) c[k] = c[k - 1] * z2 / double(2 * k * (2 * k + 1));
  return c;
}

cvec cosh_series(cplx half, int len) {
  cvec c(len);
  c[0] = 1.0;
  cplx z2 = half * half;
  for (int k = 1; k < len; ++k) c[k] = c[k - 1] * z2 / double((2 * k - 1) * 2 * k);
  return c;
}

cvec series_mul(const cvec& a, const cvec& b) {
  int len = int(a.size());
  cvec c(len, 0.0);
  for (int i = 0; i < len; ++i)
    for (int j = 0; i + j < len; ++j) c[i + j] += a[i] * b[j];
  return c;
}

cvec series_div(const cvec& num, const cvec& den) {
  // den[0] == 1 for all series used here
  int len = int(num.size());
  cvec q(len);
  for (int k = 0; k < len; ++k) {
    cplx s = num[k];
    for (int j = 1; j <= k; ++j) s -= den[j] * q[k - j];
    q[k] = s;
  }
  return q;
}

// Sum of c[k0] * t0^{2(k-k0)+1} / (2(k-k0)+1) over k >= k0, smallest terms first.
cplx integrate_even_series(const cvec& c, int k0, double t0) {
  int len = int(c.size());
  std::vector<double> tp(len - k0);
  double t2 = t0 * t0;
  tp[0] = t0;
  for (size_t j = 1; j < tp.size(); ++j) tp[j] = tp[j - 1] * t2;
  cplx acc = 0.0;
  for (int k = len - 1; k >= k0; --k) acc += c[k] * tp[k - k0] / double(2 * (k - k0) + 1);
  return acc;
}

constexpr int kSeriesLen = 44;

// ---------------------------------------------------------------------------
// Strip evaluation of log S2 / log S3. Valid for 0 < Re x < |omega| with a
// comfortable margin (the reduction wrappers below arrange that).

struct PanelPlan {
  double t0;
  double T;
  double width;
};

PanelPlan plan_panels(cplx a, double wsum, double wmax, double rate) {
  PanelPlan pl;
  // keep |a|*t small on the series patch so the sh/ch Taylor sums do not
  // cancel more than a couple of digits
  pl.t0 = std::min(0.6 * (2.0 * pi / wmax), 9.0 / std::max(1.0, std::abs(a.imag())));
  pl.T = (39.0 + std::log1p(std::abs(a) / wsum)) / rate;
  // GL16 resolves ~12 radians per panel
  pl.width = std::min(2.0 * pi / wmax, 24.0 / (std::abs(a.imag()) + 1e-30));
  if (pl.T < pl.t0 * 1.5) pl.T = pl.t0 * 1.5;
  return pl;
}

cplx log_s2_strip(cplx x, double w1, double w2) {
  const double wsum = w1 + w2;
  const cplx a = 2.0 * x - wsum;
  const double rate = 0.5 * (wsum - std::abs(a.real()));
  PanelPlan pl = plan_panels(a, wsum, std::max(w1, w2), rate);

  // series head on [0, t0]
  cvec num = sinhc_series(0.5 * a, kSeriesLen);
  cvec den = series_mul(sinhc_series(cplx(0.5 * w1), kSeriesLen),
                        sinhc_series(cplx(0.5 * w2), kSeriesLen));
  cvec q = series_div(num, den);
  cplx head = (a / (w1 * w2)) * integrate_even_series(q, 1, pl.t0);

  // panels on [t0, T]
  const Gauss16& g = gauss16();
  cplx body = 0.0;
  double lo = pl.t0;
  while (lo < pl.T) {
    double hi = std::min(pl.T, lo + pl.width);
    double c = 0.5 * (lo + hi), s = 0.5 * (hi - lo);
    cplx acc = 0.0;
    for (int i = 0; i < 16; ++i) {
      double t = c + s * g.x[i];
      cplx e1 = std::exp((a - wsum) * (0.5 * t));
      cplx e2 = std::exp(-(a + wsum) * (0.5 * t));
      double d = std::expm1(-w1 * t) * std::expm1(-w2 * t);
      cplx bracket = (e1 - e2) / d - a / (w1 * w2 * t);
      acc += g.w[i] * bracket / t;
    }
    body += s * acc;
    lo = hi;
  }

  cplx tail = -a / (w1 * w2 * pl.T);
  return head + body + tail;
}

cplx log_s3_strip(cplx x, double w1, double w2, double w3) {
  const double wsum = w1 + w2 + w3;
  const double P = w1 * w2 * w3;
  const cplx a = 2.0 * x - wsum;
  const double rate = 0.5 * (wsum - std::abs(a.real()));
  PanelPlan pl = plan_panels(a, wsum, std::max({w1, w2, w3}), rate);

  cvec num = cosh_series(0.5 * a, kSeriesLen);
  cvec den = series_mul(series_mul(sinhc_series(cplx(0.5 * w1), kSeriesLen),
                                   sinhc_series(cplx(0.5 * w2), kSeriesLen)),
                        sinhc_series(cplx(0.5 * w3), kSeriesLen));
  cvec q = series_div(num, den);
  const cplx D = q[1];  // equals a^2/8 - sum(w_j^2)/24
  cplx head = (2.0 / P) * integrate_even_series(q, 2, pl.t0);

  const Gauss16& g = gauss16();
  cplx body = 0.0;
  double lo = pl.t0;
  while (lo < pl.T) {
    double hi = std::min(pl.T, lo + pl.width);
    double c = 0.5 * (lo + hi), s = 0.5 * (hi - lo);
    cplx acc = 0.0;
    for (int i = 0; i < 16; ++i) {
      double t = c + s * g.x[i];
      cplx e1 = std::exp((a - wsum) * (0.5 * t));
      cplx e2 = std::exp(-(a + wsum) * (0.5 * t));
      double d = -std::expm1(-w1 * t) * std::expm1(-w2 * t) * std::expm1(-w3 * t);
      double t2 = t * t;
      cplx bracket = (e1 + e2) / d - 2.0 / (P * t2 * t) - 2.0 * D / (P * t);
      acc += g.w[i] * bracket / t;
    }
    body += s * acc;
    lo = hi;
  }

  cplx tail = -(2.0 / (3.0 * P * pl.T * pl.T * pl.T) + 2.0 * D / (P * pl.T));
  return -(head + body + tail);
}

// ---------------------------------------------------------------------------
// Pole / zero lattice proximity. S2 vanishes on {-k*w1 - l*w2} and has poles
// on {|w| + k*w1 + l*w2}, k,l >= 0; S3 likewise with three indices except
// that its "pole" lattice consists of zeros as well (everything multiplies
// out downstream, so both lattices are fatal for a log). The quasi-period
// reduction walks x along the w1 direction, and the sin factors it picks up
// vanish exactly on these same lattices, so one up-front check covers the
// whole reduction path.

void check_lattice_clear(cplx x, const std::vector<double>& w, const char* name) {
  double wmin = *std::min_element(w.begin(), w.end());
  double wsum = 0.0;
  for (double wj : w) wsum += wj;
  const double eps = 1e-8 * wmin;
  if (std::abs(x.imag()) >= eps) return;
  double r = x.real();
  int kb = int(std::ceil((std::abs(r) + wsum + 1.0) / wmin)) + 1;
  auto probe = [&](double p, const char* which) {
    if (std::abs(r - p) < eps) {
      std::ostringstream os;
      os << name << " argument " << r << " within " << eps << " of " << which
         << " lattice point " << p;
      throw PoleOrZero(os.str());
    }
  };
  if (w.size() == 2) {
    for (int k = 0; k <= kb; ++k)
      for (int l = 0; l <= kb; ++l) {
        double latt = k * w[0] + l * w[1];
        probe(-latt, "zero");
        probe(wsum + latt, "pole");
      }
  } else {
    for (int k = 0; k <= kb; ++k)
      for (int l = 0; l <= kb; ++l)
        for (int m = 0; m <= kb; ++m) {
          double latt = k * w[0] + l * w[1] + m * w[2];
          probe(-latt, "zero");
          probe(wsum + latt, "pole");
        }
  }
}

// ---------------------------------------------------------------------------
// Memo table. Keyed on exact bit patterns, so a cached value is a pure
// function of the key and the cache is safe to fill from several threads in
// any order.

struct SineKey {
  std::int64_t xr, xi, w1, w2, w3;
  bool operator==(const SineKey& o) const {
    return xr == o.xr && xi == o.xi && w1 == o.w1 && w2 == o.w2 && w3 == o.w3;
  }
};

struct SineKeyHash {
  size_t operator()(const SineKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : {k.xr, k.xi, k.w1, k.w2, k.w3}) {
      h ^= std::uint64_t(v);
      h *= 1099511628211ull;
    }
    return size_t(h);
  }
};

std::int64_t dbits(double v) { return std::bit_cast<std::int64_t>(v); }

std::unordered_map<SineKey, cplx, SineKeyHash>& sine_memo() {
  static std::unordered_map<SineKey, cplx, SineKeyHash> m;
  return m;
}

std::mutex& sine_memo_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

cplx log_double_sine(cplx x, const PeriodTriple& w) {
  w.validate();
  if (w.omega.size() != 2) throw ConfigInvalid("double sine takes two periods");
  const double w1 = w.omega[0], w2 = w.omega[1];

  SineKey key{dbits(x.real()), dbits(x.imag()), dbits(w1), dbits(w2), INT64_MIN};
  {
    std::lock_guard<std::mutex> lk(sine_memo_mutex());
    auto it = sine_memo().find(key);
    if (it != sine_memo().end()) return it->second;
  }
  check_lattice_clear(x, w.omega, "double sine");

  const double wsum = w1 + w2;
  const double margin = 0.5 * std::min(w1, w2);
  cplx acc = 0.0;
  cplx y = x;
  while (y.real() < margin) {
    acc += log_2sin(pi * y / w2);
    y += w1;
  }
  while (y.real() > wsum - margin) {
    y -= w1;
    acc -= log_2sin(pi * y / w2);
  }
  cplx val = log_s2_strip(y, w1, w2) + acc;

  std::lock_guard<std::mutex> lk(sine_memo_mutex());
  sine_memo().emplace(key, val);
  return val;
}

cplx log_triple_sine(cplx x, const PeriodTriple& w) {
  w.validate();
  if (w.omega.size() != 3) throw ConfigInvalid("triple sine takes three periods");
  const double w1 = w.omega[0], w2 = w.omega[1], w3 = w.omega[2];

  SineKey key{dbits(x.real()), dbits(x.imag()), dbits(w1), dbits(w2), dbits(w3)};
  {
    std::lock_guard<std::mutex> lk(sine_memo_mutex());
    auto it = sine_memo().find(key);
    if (it != sine_memo().end()) return it->second;
  }
  check_lattice_clear(x, w.omega, "triple sine");

  const double wsum = w1 + w2 + w3;
  const double margin = 0.5 * std::min({w1, w2, w3});
  const PeriodTriple rest(w2, w3);
  cplx acc = 0.0;
  cplx y = x;
  while (y.real() < margin) {
    acc += log_double_sine(y, rest);
    y += w1;
  }
  while (y.real() > wsum - margin) {
    y -= w1;
    acc -= log_double_sine(y, rest);
  }
  cplx val = log_s3_strip(y, w1, w2, w3) + acc;

  std::lock_guard<std::mutex> lk(sine_memo_mutex());
  sine_memo().emplace(key, val);
  return val;
}

cplx double_sine(cplx x, const PeriodTriple& w) { return std::exp(log_double_sine(x, w)); }
cplx triple_sine(cplx x, const PeriodTriple& w) { return std::exp(log_triple_sine(x, w)); }

cplx s_factor(cplx beta, const ModelParams& p) {
  const PeriodTriple w(p.rho, 2.0 * pi);
  const double c = 2.0 * (p.n - 1) * pi / p.n;
  cplx ib = iu * beta;
  return std::exp(log_double_sine(-ib, w) + log_double_sine(ib + c, w) -
                  log_double_sine(ib, w) - log_double_sine(-ib + c, w));
}

cplx varphi(cplx beta, const ModelParams& p) {
  const PeriodTriple w(p.rho, p.lambda);
  const cplx off(-pi / p.n, 0.0);
  if (beta.imag() == 0.0) {
    // the two arguments are complex conjugates, so one evaluation suffices
    cplx ls = log_double_sine(iu * beta + off, w);
    return std::exp(-2.0 * ls.real());
  }
  return std::exp(-log_double_sine(iu * beta + off, w) -
                  log_double_sine(-iu * beta + off, w));
}

double log_abs_varphi(double beta, const ModelParams& p) {
  const PeriodTriple w(p.rho, p.lambda);
  const cplx off(-pi / p.n, 0.0);
  return -2.0 * log_double_sine(iu * beta + off, w).real();
}

cplx psi_level0(cplx beta, const ModelParams& p) {
  cplx z = 0.25 * p.n * (beta - 2.0 * pi * iu / double(p.n));
  cplx sh = std::sinh(z);
  if (std::abs(sh) < 1e-10)
    throw PoleOrZero("level-zero exchange kernel pole: argument too close to 2*pi*i/n mod 4*pi*i/n");
  return 1.0 / (2.0 * iu * sh);
}

cplx h_factor(cplx beta, double period, const ModelParams& p) {
  const double c = pi / period;
  const cplx off = 2.0 * pi * iu / double(p.n);
  return std::sinh(c * beta) * std::sinh(c * (beta - off)) * std::sinh(c * (beta + off));
}

cplx h_factor(cplx beta, const ModelParams& p) { return h_factor(beta, p.lambda, p); }

cplx e_lambda(cplx beta, const ModelParams& p) {
  const PeriodTriple w(p.rho, p.lambda, 2.0 * pi);
  const double c = 2.0 * pi / p.n + p.rho;
  cplx ib = iu * beta;
  return std::exp(log_triple_sine(-ib, w) + log_triple_sine(ib + p.lambda, w) -
                  log_triple_sine(c - ib, w) - log_triple_sine(c + ib + p.lambda, w));
}

}  // namespace qkz
