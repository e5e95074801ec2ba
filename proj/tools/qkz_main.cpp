#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qkz/verify.hpp"

using ojson = nlohmann::ordered_json;
using qkz::cplx;

namespace {

constexpr const char* kVersion = "0.1.0";

ojson cnum(cplx z) { return ojson::array({z.real(), z.imag()}); }

std::string dnum(double x) { return ojson(x).dump(); }  // shortest round-trip form

cplx parse_cnum(const ojson& j, const std::string& where) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cplx(j[0].get<double>(), j[1].get<double>());
  throw qkz::ConfigInvalid(where + " must be a number or an [re, im] pair");
}

std::vector<cplx> parse_cvec(const ojson& j, const std::string& where) {
  if (!j.is_array()) throw qkz::ConfigInvalid(where + " must be an array");
  std::vector<cplx> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_cnum(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> parse_ivec(const ojson& j, const std::string& where) {
  if (!j.is_array()) throw qkz::ConfigInvalid(where + " must be an array of integers");
  std::vector<int> out;
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer())
      throw qkz::ConfigInvalid(where + "[" + std::to_string(i) + "] must be an integer");
    out.push_back(j[i].get<int>());
  }
  return out;
}

std::vector<double> parse_dvec(const ojson& j, const std::string& where) {
  if (!j.is_array()) throw qkz::ConfigInvalid(where + " must be an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw qkz::ConfigInvalid(where + "[" + std::to_string(i) + "] must be a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

void check_keys(const ojson& j, const std::string& where,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  if (!j.is_object()) throw qkz::ConfigInvalid(where + " must be a JSON object");
  for (const char* k : required)
    if (!j.contains(k)) throw qkz::ConfigInvalid(where + " is missing required key \"" + k + "\"");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : required) known = known || item.key() == k;
    for (const char* k : optional) known = known || item.key() == k;
    if (!known) throw qkz::ConfigInvalid(where + " has unknown key \"" + item.key() + "\"");
  }
}

ojson load_config(const std::string& path) {
  ojson j;
  try {
    if (path == "-") {
      j = ojson::parse(std::cin);
    } else {
      std::ifstream in(path);
      if (!in) throw qkz::ConfigInvalid("cannot open config file: " + path);
      j = ojson::parse(in);
    }
  } catch (const nlohmann::json::parse_error& e) {
    throw qkz::ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
  }
  return j;
}

ojson meta_block() {
  ojson m;
  m["version"] = kVersion;
  m["conventions"] = {{"exponent", "real"}, {"measure", "plain"}, {"contours", "flat"}};
  return m;
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw qkz::ConfigInvalid("cannot open output file: " + out_path);
  out << text;
}

void emit_json(const ojson& j, const std::string& out_path) {
  emit_text(j.dump(2) + "\n", out_path);
}

// Full occupation profile from the layer counts (nu_1, ..., nu_{n-1}) plus
// the site count. Subcommands that integrate also insist on the chamber
// condition up front, where the message can name the offending key.
qkz::WeightProfile make_profile(const std::vector<int>& layers, int nsites, int n,
                                bool need_chamber) {
  if (int(layers.size()) != n - 1)
    throw qkz::ConfigInvalid("\"nu\" must list the n-1 layer counts (nu_1, ..., nu_{n-1})");
  qkz::WeightProfile wp;
  wp.nu.assign(size_t(n), 0);
  wp.nu[0] = nsites;
  for (int j = 1; j < n; ++j) wp.nu[size_t(j)] = layers[size_t(j) - 1];
  wp.validate();
  if (need_chamber && !wp.weyl_positive())
    throw qkz::ConfigInvalid(
        "profile violates the chamber condition nu_{j-1} + nu_{j+1} >= 2 nu_j, "
        "so the pairing integral does not converge");
  return wp;
}

double nu_factorial(const qkz::WeightProfile& wp) {
  double f = 1.0;
  for (size_t j = 1; j < wp.nu.size(); ++j)
    for (int k = 2; k <= wp.nu[j]; ++k) f *= double(k);
  return f;
}

int default_jobs() {
  if (const char* env = std::getenv("QKZ_JOBS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

// ---------------------------------------------------------------------------
// specfn: scalar-function tables as CSV

struct SpecfnArgs {
  std::string fn = "varphi";
  std::string grid = "-5:5:0.25";
  int n = 2;
  double rho = 2.0;
  std::string out;
};

int run_specfn(const SpecfnArgs& a) {
  double lo = 0, hi = 0, step = 0;
  {
    std::istringstream is(a.grid);
    char c1 = 0, c2 = 0;
    if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(is >> std::ws).eof())
      throw qkz::ConfigInvalid("--grid must have the form lo:hi:step");
  }
  if (!(step > 0.0) || hi < lo) throw qkz::ConfigInvalid("--grid needs step > 0 and hi >= lo");
  const qkz::ModelParams p = qkz::ModelParams::make(a.n, a.rho);

  cplx (*fn)(cplx, const qkz::ModelParams&) = nullptr;
  if (a.fn == "s") fn = qkz::s_factor;
  else if (a.fn == "varphi") fn = qkz::varphi;
  else if (a.fn == "psi") fn = qkz::psi_level0;
  else if (a.fn == "e") fn = qkz::e_lambda;
  else if (a.fn == "h") fn = [](cplx b, const qkz::ModelParams& q) { return qkz::h_factor(b, q); };
  else throw qkz::ConfigInvalid("--fn must be one of s, varphi, psi, h, e");

  const long count = long(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::ostringstream os;
  os << "# version=" << kVersion << "\n";
  os << "# exponent=real measure=plain contours=flat\n";
  os << "# fn=" << a.fn << " n=" << a.n << " rho=" << dnum(a.rho) << " grid=" << a.grid << "\n";
  os << "beta,re,im\n";
  for (long k = 0; k < count; ++k) {
    const double beta = lo + double(k) * step;
    const cplx v = fn(cplx(beta, 0.0), p);
    os << dnum(beta) << "," << dnum(v.real()) << "," << dnum(v.imag()) << "\n";
  }
  emit_text(os.str(), a.out);
  return 0;
}

// ---------------------------------------------------------------------------
// rmat: entries plus Yang-Baxter / inversion residuals

struct RmatArgs {
  int n = 2;
  double rho = 2.0;
  double beta1 = 0.0, beta2 = 0.7, beta3 = 1.3;
  double tol = 1e-10;
  bool plain = false;  // undeformed variant instead of the sign-adjusted one
  std::string out;
};

int run_rmat(const RmatArgs& a) {
  const qkz::ModelParams p = qkz::ModelParams::make(a.n, a.rho);
  auto mk = [&](cplx b1, cplx b2) {
    return a.plain ? qkz::rbar(b1, b2, p) : qkz::r_modified(b1, b2, p);
  };
  const int n = a.n;
  const cplx b1(a.beta1), b2(a.beta2), b3(a.beta3);
  const qkz::RMatrixValue R = mk(b1, b2);

  ojson entries = ojson::array();
  for (int o1 = 0; o1 < n; ++o1)
    for (int o2 = 0; o2 < n; ++o2)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
          const cplx v = R.entry(o1, o2, i1, i2);
          if (v == cplx(0.0)) continue;
          ojson e;
          e["out"] = {o1, o2};
          e["in"] = {i1, i2};
          e["value"] = cnum(v);
          entries.push_back(e);
        }

  // Yang-Baxter and inversion residuals over the full basis, relative to the
  // largest component that appears.
  const qkz::RMatrixValue r12 = mk(b1, b2), r13 = mk(b1, b3), r23 = mk(b2, b3);
  const qkz::RMatrixValue r21 = mk(b2, b1);
  double ybe = 0.0, inv = 0.0, scale = 0.0;
  const long dim3 = long(n) * n * n;
  for (long k = 0; k < dim3; ++k) {
    std::vector<cplx> v(size_t(dim3), cplx(0.0));
    v[size_t(k)] = 1.0;
    const auto lhs = qkz::apply_r(qkz::apply_r(qkz::apply_r(v, 3, 1, 2, r23), 3, 0, 2, r13), 3, 0, 1, r12);
    const auto rhs = qkz::apply_r(qkz::apply_r(qkz::apply_r(v, 3, 0, 1, r12), 3, 0, 2, r13), 3, 1, 2, r23);
    for (size_t i = 0; i < lhs.size(); ++i) {
      ybe = std::max(ybe, std::abs(lhs[i] - rhs[i]));
      scale = std::max(scale, std::abs(lhs[i]));
    }
  }
  ybe /= std::max(scale, 1e-300);
  const long dim2 = long(n) * n;
  for (long k = 0; k < dim2; ++k) {
    std::vector<cplx> v(size_t(dim2), cplx(0.0));
    v[size_t(k)] = 1.0;
    auto w = qkz::apply_r(v, 2, 1, 0, r21);
    w = qkz::apply_r(w, 2, 0, 1, r12);
    for (size_t i = 0; i < w.size(); ++i) inv = std::max(inv, std::abs(w[i] - v[i]));
  }

  const bool passed = ybe < a.tol && inv < a.tol;
  ojson outj;
  outj["meta"] = meta_block();
  outj["n"] = n;
  outj["rho"] = a.rho;
  outj["variant"] = a.plain ? "plain" : "modified";
  outj["beta1"] = a.beta1;
  outj["beta2"] = a.beta2;
  outj["beta3"] = a.beta3;
  outj["entries"] = entries;
  outj["ybe_residual"] = ybe;
  outj["inversion_residual"] = inv;
  outj["tol"] = a.tol;
  outj["passed"] = passed;
  emit_json(outj, a.out);
  return passed ? 0 : 1;
}

// ---------------------------------------------------------------------------
// forms: evaluate one layered form at a user-supplied point

int run_forms(const std::string& config_path, const std::string& out_path) {
  const ojson cfg = load_config(config_path);
  check_keys(cfg, "forms config", {"n", "rho", "which", "J", "betas"}, {"gammas"});
  const int n = cfg["n"].get<int>();
  const qkz::ModelParams p = qkz::ModelParams::make(n, cfg["rho"].get<double>());
  const std::string which = cfg["which"].get<std::string>();
  const std::vector<int> J = parse_ivec(cfg["J"], "\"J\"");
  const qkz::WeightProfile wp = qkz::profile_of(J, n);

  qkz::LayeredVariables v;
  v.beta = parse_cvec(cfg["betas"], "\"betas\"");
  if (int(v.beta.size()) != wp.nsites())
    throw qkz::ConfigInvalid("\"betas\" must have one entry per site");
  v.gamma.assign(size_t(n) - 1, {});
  if (cfg.contains("gammas")) {
    const ojson& gj = cfg["gammas"];
    if (!gj.is_array() || int(gj.size()) != n - 1)
      throw qkz::ConfigInvalid("\"gammas\" must be an array with one entry per layer");
    for (int j = 1; j < n; ++j)
      v.gamma[size_t(j) - 1] = parse_cvec(gj[size_t(j) - 1], "\"gammas\" layer");
  }
  for (int j = 1; j < n; ++j)
    if (int(v.gamma[size_t(j) - 1].size()) != wp.nu[size_t(j)])
      throw qkz::ConfigInvalid("layer " + std::to_string(j) + " needs " +
                               std::to_string(wp.nu[size_t(j)]) + " gamma entries");

  cplx value;
  if (which == "g") value = qkz::g_J(J, v, p);
  else if (which == "w") value = qkz::w_J(J, v, p);
  else if (which == "G") value = qkz::G_J(J, v, p);
  else if (which == "W") value = qkz::W_J(J, v, p);
  else if (which == "log_g") value = qkz::log_g_J(J, v, p);
  else if (which == "log_G") value = qkz::log_G_J(J, v, p);
  else throw qkz::ConfigInvalid("\"which\" must be one of g, w, G, W, log_g, log_G");

  ojson outj;
  outj["meta"] = meta_block();
  outj["n"] = n;
  outj["rho"] = cfg["rho"];
  outj["which"] = which;
  outj["J"] = cfg["J"];
  outj["value"] = cnum(value);
  emit_json(outj, out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// pair: the full antisymmetrized pairing I(w, W)

int run_pair(const std::string& config_path, const std::string& out_path) {
  const ojson cfg = load_config(config_path);
  check_keys(cfg, "pair config", {"n", "rho", "nu", "betas", "wJ", "WJ"}, {"eps", "offsets"});
  const int n = cfg["n"].get<int>();
  const qkz::ModelParams p = qkz::ModelParams::make(n, cfg["rho"].get<double>());
  const std::vector<cplx> betas = parse_cvec(cfg["betas"], "\"betas\"");
  const qkz::WeightProfile wp =
      make_profile(parse_ivec(cfg["nu"], "\"nu\""), int(betas.size()), n, true);
  const std::vector<int> jw = parse_ivec(cfg["wJ"], "\"wJ\"");
  const std::vector<int> jW = parse_ivec(cfg["WJ"], "\"WJ\"");
  if (qkz::profile_of(jw, n).nu != wp.nu || qkz::profile_of(jW, n).nu != wp.nu)
    throw qkz::ConfigInvalid("\"wJ\" and \"WJ\" must both realize the profile in \"nu\"");
  const double eps = cfg.contains("eps") ? cfg["eps"].get<double>() : 0.0;

  qkz::ContourPlan plan = qkz::build_contours(wp, betas, p, eps);
  if (cfg.contains("offsets")) {
    const std::vector<double> off = parse_dvec(cfg["offsets"], "\"offsets\"");
    if (int(off.size()) != n - 1)
      throw qkz::ConfigInvalid("\"offsets\" must list one imaginary offset per layer");
    plan.eta = off;
  }

  // I(w, W) equals nu! times the pairing of the elementary form against the
  // antisymmetrized dual, so one permutation sum is enough.
  qkz::PairSide a, b;
  a.J = jw;
  b.J = jW;
  b.skewed = true;
  const qkz::PairingResult r = qkz::pair(a, b, betas, plan, p);
  const double fact = nu_factorial(wp);

  ojson outj;
  outj["meta"] = meta_block();
  outj["n"] = n;
  outj["rho"] = cfg["rho"];
  outj["nu"] = cfg["nu"];
  outj["betas"] = cfg["betas"];
  outj["wJ"] = cfg["wJ"];
  outj["WJ"] = cfg["WJ"];
  outj["value"] = cnum(fact * r.value);
  outj["err"] = fact * r.abs_error_estimate;
  outj["nodes"] = r.node_counts;
  emit_json(outj, out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// solve: all components of the integral solution for one dual assignment

int run_solve(const std::string& config_path, const std::string& out_path) {
  const ojson cfg = load_config(config_path);
  check_keys(cfg, "solve config", {"n", "rho", "nu", "betas", "WJ"}, {"eps"});
  const int n = cfg["n"].get<int>();
  const qkz::ModelParams p = qkz::ModelParams::make(n, cfg["rho"].get<double>());
  const std::vector<cplx> betas = parse_cvec(cfg["betas"], "\"betas\"");
  const qkz::WeightProfile wp =
      make_profile(parse_ivec(cfg["nu"], "\"nu\""), int(betas.size()), n, true);
  const std::vector<int> jW = parse_ivec(cfg["WJ"], "\"WJ\"");
  if (qkz::profile_of(jW, n).nu != wp.nu)
    throw qkz::ConfigInvalid("\"WJ\" must realize the profile in \"nu\"");
  const double eps = cfg.contains("eps") ? cfg["eps"].get<double>() : 0.0;

  const qkz::SolutionVector sol = qkz::solve(wp, betas, jW, p, eps);

  ojson comps = ojson::array();
  for (size_t i = 0; i < sol.assignments.size(); ++i) {
    ojson c;
    c["J"] = sol.assignments[i];
    c["value"] = cnum(sol.components[i]);
    c["err"] = sol.error_estimates[i];
    comps.push_back(c);
  }
  std::vector<int> weight(size_t(n), 0);
  for (int j = 0; j < n; ++j)
    weight[size_t(j)] = wp.nu[size_t(j)] - (j + 1 < n ? wp.nu[size_t(j) + 1] : 0);

  ojson outj;
  outj["meta"] = meta_block();
  outj["n"] = n;
  outj["rho"] = cfg["rho"];
  outj["nu"] = cfg["nu"];
  outj["betas"] = cfg["betas"];
  outj["WJ"] = cfg["WJ"];
  outj["weight"] = weight;
  outj["components"] = comps;
  emit_json(outj, out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// verify: the bundled identity checks

struct VerifyArgs {
  std::string check = "all";
  std::string config;
  double tol = 0.0;  // 0 means per-check default
  long seed = 0;     // 0 means per-case value or built-in default
  int jobs = 0;      // 0 means QKZ_JOBS or 1
  std::string out;
};

int run_verify(const VerifyArgs& a) {
  const ojson cfg = load_config(a.config);
  check_keys(cfg, "verify config", {}, {"exchange", "shift", "qkz", "convergence"});
  const bool all = a.check == "all";
  qkz::set_worker_count(a.jobs >= 1 ? a.jobs : default_jobs());

  std::vector<qkz::CheckReport> reports;

  if ((all || a.check == "exchange") && cfg.contains("exchange")) {
    for (const ojson& c : cfg["exchange"]) {
      check_keys(c, "exchange case", {"n", "rho"}, {"trials", "seed", "tol"});
      const qkz::ModelParams p =
          qkz::ModelParams::make(c["n"].get<int>(), c["rho"].get<double>());
      const int trials = c.contains("trials") ? c["trials"].get<int>() : 20;
      const unsigned seed = c.contains("seed") ? c["seed"].get<unsigned>()
                            : a.seed > 0      ? unsigned(a.seed)
                                              : 20260819u;
      const double tol = c.contains("tol") ? c["tol"].get<double>()
                         : a.tol > 0.0     ? a.tol
                                           : 1e-9;
      reports.push_back(qkz::check_exchange_relation(p, trials, seed, tol));
    }
  }
  if ((all || a.check == "shift") && cfg.contains("shift")) {
    for (const ojson& c : cfg["shift"]) {
      check_keys(c, "shift case", {"n", "rho", "jg", "jw", "betas"}, {"eps"});
      const qkz::ModelParams p =
          qkz::ModelParams::make(c["n"].get<int>(), c["rho"].get<double>());
      const double eps = c.contains("eps") ? c["eps"].get<double>() : 0.0;
      reports.push_back(qkz::check_shift_identity(parse_ivec(c["jg"], "\"jg\""),
                                                  parse_ivec(c["jw"], "\"jw\""),
                                                  parse_cvec(c["betas"], "\"betas\""), p, eps));
    }
  }
  if ((all || a.check == "qkz") && cfg.contains("qkz")) {
    for (const ojson& c : cfg["qkz"]) {
      check_keys(c, "qkz case", {"n", "rho", "nu", "betas", "jw"}, {"tol", "eps"});
      const int n = c["n"].get<int>();
      const qkz::ModelParams p = qkz::ModelParams::make(n, c["rho"].get<double>());
      const std::vector<cplx> betas = parse_cvec(c["betas"], "\"betas\"");
      const qkz::WeightProfile wp =
          make_profile(parse_ivec(c["nu"], "\"nu\""), int(betas.size()), n, true);
      const double tol = c.contains("tol") ? c["tol"].get<double>()
                         : a.tol > 0.0     ? a.tol
                                           : 1e-4;
      const double eps = c.contains("eps") ? c["eps"].get<double>() : 0.0;
      reports.push_back(qkz::check_qkz(wp, betas, parse_ivec(c["jw"], "\"jw\""), p, tol, eps));
    }
  }
  if ((all || a.check == "convergence") && cfg.contains("convergence")) {
    const ojson& c = cfg["convergence"];
    check_keys(c, "convergence case", {"n_max", "nsites_max"}, {});
    reports.push_back(
        qkz::check_convergence_region(c["n_max"].get<int>(), c["nsites_max"].get<int>()));
  }
  if (reports.empty())
    throw qkz::ConfigInvalid("config contains no cases for --check " + a.check);

  bool passed = true;
  ojson checks = ojson::array();
  for (const qkz::CheckReport& r : reports) {
    passed = passed && r.passed;
    ojson c;
    c["name"] = r.name;
    c["passed"] = r.passed;
    c["residual"] = r.residual;
    c["bound"] = r.bound;
    c["detail"] = r.detail;
    checks.push_back(c);
  }

  ojson outj;
  outj["meta"] = meta_block();
  outj["meta"]["seed"] = a.seed;
  outj["meta"]["tolerances"] = {{"tol", a.tol}};
  outj["check"] = a.check;
  outj["checks"] = checks;
  outj["passed"] = passed;
  emit_json(outj, a.out);
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"integral solutions of the level-0 difference equation: tables and checks"};
  app.require_subcommand(1);

  SpecfnArgs sa;
  CLI::App* sp = app.add_subcommand("specfn", "tabulate one scalar factor on a real grid (CSV)");
  sp->add_option("--fn", sa.fn, "function: s, varphi, psi, h, e")->capture_default_str();
  sp->add_option("--grid", sa.grid, "real grid lo:hi:step")->capture_default_str();
  sp->add_option("--n", sa.n, "rank (letters per site)")->capture_default_str();
  sp->add_option("--rho", sa.rho, "period parameter")->capture_default_str();
  sp->add_option("--out", sa.out, "output file (default stdout)");

  RmatArgs ra;
  CLI::App* rp = app.add_subcommand("rmat", "two-site matrix entries plus consistency residuals");
  rp->add_option("--n", ra.n, "rank")->capture_default_str();
  rp->add_option("--rho", ra.rho, "period parameter")->capture_default_str();
  rp->add_option("--beta1", ra.beta1, "first spectral parameter")->capture_default_str();
  rp->add_option("--beta2", ra.beta2, "second spectral parameter")->capture_default_str();
  rp->add_option("--beta3", ra.beta3, "third spectral parameter (consistency checks)")
      ->capture_default_str();
  rp->add_option("--tol", ra.tol, "pass threshold for the residuals")->capture_default_str();
  rp->add_flag("--plain", ra.plain, "use the unmodified variant");
  rp->add_option("--out", ra.out, "output file (default stdout)");

  std::string forms_config, forms_out;
  CLI::App* fp = app.add_subcommand("forms", "evaluate one layered form at a point");
  fp->add_option("--config", forms_config, "JSON config ('-' for stdin)")->required();
  fp->add_option("--out", forms_out, "output file (default stdout)");

  std::string pair_config, pair_out;
  CLI::App* pp = app.add_subcommand("pair", "integrate the pairing of two assignments");
  pp->add_option("--config", pair_config, "JSON config ('-' for stdin)")->required();
  pp->add_option("--out", pair_out, "output file (default stdout)");

  std::string solve_config, solve_out;
  CLI::App* vp = app.add_subcommand("solve", "all solution components for one dual assignment");
  vp->add_option("--config", solve_config, "JSON config ('-' for stdin)")->required();
  vp->add_option("--out", solve_out, "output file (default stdout)");

  VerifyArgs va;
  CLI::App* cp = app.add_subcommand("verify", "run the bundled identity checks");
  cp->add_option("--check", va.check, "exchange, shift, qkz, convergence, or all")
      ->check(CLI::IsMember({"exchange", "shift", "qkz", "convergence", "all"}))
      ->capture_default_str();
  cp->add_option("--config", va.config, "JSON config ('-' for stdin)")->required();
  cp->add_option("--tol", va.tol, "override default tolerance for cases without one");
  cp->add_option("--seed", va.seed, "override default seed for cases without one");
  cp->add_option("--jobs", va.jobs, "worker threads (default $QKZ_JOBS or 1)");
  cp->add_option("--out", va.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
    if (sp->parsed()) return run_specfn(sa);
    if (rp->parsed()) return run_rmat(ra);
    if (fp->parsed()) return run_forms(forms_config, forms_out);
    if (pp->parsed()) return run_pair(pair_config, pair_out);
    if (vp->parsed()) return run_solve(solve_config, solve_out);
    if (cp->parsed()) return run_verify(va);
    return 2;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const qkz::ConfigInvalid& e) {
    std::cerr << "qkz: config error: " << e.what() << "\n";
    return 2;
  } catch (const qkz::NumericalError& e) {
    std::cerr << "qkz: numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "qkz: error: " << e.what() << "\n";
    return 3;
  }
}
