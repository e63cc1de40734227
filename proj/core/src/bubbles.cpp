#include "choqlab/bubbles.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "choqlab/errors.hpp"
#include "fit.hpp"

namespace choq {

using boost::math::quadrature::gauss_kronrod;

namespace {

double sphere_area(int N) { return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N); }

// \int_a^b f on panels that double in length starting from `scale`/1024
double panel_integral(const std::function<double(double)>& f, double a, double b, double scale,
                      double tol = 1e-13) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double x = scale / 1024.0; x < b; x *= 2.0)
    if (x > a * (1.0 + 1e-12)) cuts.push_back(x);
  cuts.push_back(b);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    s += gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1], 12, tol);
  return s;
}

double local_spacing(const RadialGrid& g, double r) {
  const auto nodes = g.nodes();
  auto it = std::lower_bound(nodes.begin(), nodes.end(), r);
  const std::size_t i = std::min<std::size_t>(it - nodes.begin(), nodes.size() - 1);
  const double left = i == 0 ? nodes[0] : nodes[i] - nodes[i - 1];
  const double right = i + 1 < nodes.size() ? nodes[i + 1] - nodes[i] : left;
  return std::max(left, right);
}

void require_resolved(const RadialGrid& g, double eps) {
  if (eps < 10.0 * local_spacing(g, eps))
    throw ConfigError("bubble scale eps = " + std::to_string(eps) +
                      " is below 10x the local grid spacing; refine the grid");
}

}  // namespace

double BubbleSpec::rho() const { return fixed_radius ? *fixed_radius : std::pow(epsilon, tau); }

void BubbleSpec::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("bubble: epsilon must be positive");
  if (fixed_radius) {
    if (!(*fixed_radius > 0.0)) throw ConfigError("bubble: cutoff radius must be positive");
  } else if (!(tau > 0.5 && tau < 1.0)) {
    throw ConfigError("bubble: tau must lie in (1/2, 1)");
  }
}

double talenti_amplitude(int N) {
  // ||(1+|x|^2)^{-(N-2)/2}||_{2*}^{2*} = |S^{N-1}| B(N/2, N/2) / 2
  const double l = std::lgamma(0.5 * N);
  const double norm = 0.5 * sphere_area(N) * std::exp(2.0 * l - std::lgamma(double(N)));
  return std::pow(norm, -(N - 2.0) / (2.0 * N));
}

double talenti_profile(int N, double eps, double r) {
  const double l2 = eps * eps * sobolev_constant_exact(N);
  return std::pow(eps, -0.5 * (N - 2)) * talenti_amplitude(N) * std::pow(1.0 + r * r / l2, -0.5 * (N - 2));
}

double talenti_profile_dr(int N, double eps, double r) {
  const double l2 = eps * eps * sobolev_constant_exact(N);
  return -(N - 2.0) * (r / l2) * std::pow(eps, -0.5 * (N - 2)) * talenti_amplitude(N) *
         std::pow(1.0 + r * r / l2, -0.5 * N);
}

double cutoff_eta(double rho, double r) {
  if (r <= rho) return 1.0;
  if (r >= 2.0 * rho) return 0.0;
  const double s = (r - rho) / rho;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double cutoff_eta_dr(double rho, double r) {
  if (r <= rho || r >= 2.0 * rho) return 0.0;
  const double s = (r - rho) / rho;
  return -30.0 * s * s * (1.0 - s) * (1.0 - s) / rho;
}

RadialField talenti_bubble(const GridPtr& grid, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("talenti_bubble: epsilon must be positive");
  require_resolved(*grid, epsilon);
  const int N = grid->dimension();
  return RadialField::from_function(grid, [&](double r) { return talenti_profile(N, epsilon, r); });
}

RadialField cutoff_bubble(const GridPtr& grid, const BubbleSpec& spec) {
  spec.validate();
  const double rho = spec.rho();
  if (2.0 * rho > grid->r_max())
    throw ConfigError("cutoff_bubble: support radius 2 rho = " + std::to_string(2.0 * rho) +
                      " exceeds r_max = " + std::to_string(grid->r_max()));
  require_resolved(*grid, spec.epsilon);
  const int N = grid->dimension();
  return RadialField::from_function(
      grid, [&](double r) { return cutoff_eta(rho, r) * talenti_profile(N, spec.epsilon, r); });
}

double sobolev_constant_exact(int N) {
  return std::numbers::pi * N * (N - 2.0) * std::pow(std::tgamma(0.5 * N) / std::tgamma(double(N)), 2.0 / N);
}

double hls_constant_exact(int N, double mu) {
  return std::pow(std::numbers::pi, 0.5 * mu) * std::tgamma(0.5 * (N - mu)) / std::tgamma(N - 0.5 * mu) *
         std::pow(std::tgamma(0.5 * N) / std::tgamma(double(N)), -1.0 + mu / N);
}

double c_star_inf(const ProblemParams& p, double S_H) {
  const double q = p.two_star_mu();
  return (1.0 / p.alpha) * (0.5 - 0.5 / q) * std::pow(p.beta * p.beta * S_H / p.alpha, q / (q - 1.0));
}

Quotients rayleigh_quotients(const KernelTable& table, const RadialField& u) {
  const auto& g = u.grid();
  if (!g.same_as(table.grid())) throw ConfigError("rayleigh_quotients: field and table grids differ");
  const int N = g.dimension();
  const double q = (2.0 * N - table.mu()) / (N - 2.0);
  const double grad = g.dirichlet(u.values());
  const double l2s = lq_norm(u, 2.0 * N / (N - 2.0));
  const double D = double_integral(table, u, q);
  if (!(grad > 0.0) || !(D > 0.0)) throw DegenerateDirection("rayleigh_quotients: zero field");
  return {grad / (l2s * l2s), std::pow(l2s, 2.0 * q) / D, grad / std::pow(D, 1.0 / q)};
}

ConstantsReport constants(const ProblemParams& params, const KernelTable& table) {
  const auto& g = table.grid();
  const int N = g.dimension();
  if (N != params.dimension || table.mu() != params.mu)
    throw ConfigError("constants: kernel table does not match (N, mu) of the parameters");
  const double q = params.two_star_mu();
  const double tail = talenti_profile(N, 1.0, g.r_max());
  const RadialField U =
      RadialField::from_function(table.grid_ptr(), [&](double r) { return talenti_profile(N, 1.0, r) - tail; });
  const Quotients Q = rayleigh_quotients(table, U);

  ConstantsReport rep;
  rep.S = Q.sobolev;
  rep.C_N_mu = 1.0 / Q.hls;
  rep.S_H = rep.S / std::pow(rep.C_N_mu, 1.0 / q);
  rep.S_H_direct = Q.S_H;
  rep.c_star_inf = c_star_inf(params, rep.S_H_direct);
  rep.S_exact = sobolev_constant_exact(N);
  rep.C_N_mu_exact = hls_constant_exact(N, params.mu);
  rep.S_H_exact = rep.S_exact / std::pow(rep.C_N_mu_exact, 1.0 / q);
  rep.c_star_inf_exact = c_star_inf(params, rep.S_H_exact);

  if (g.size() < 2048) rep.warnings.push_back("grid has fewer than 2048 nodes; constants may be inaccurate");
  const double trunc = std::pow(std::sqrt(rep.S_exact) / g.r_max(), N - 2.0);
  if (trunc > 1e-4) rep.warnings.push_back("r_max too small for the unit bubble tail");
  for (auto [name, a, b] : {std::tuple{"S", rep.S, rep.S_exact}, std::tuple{"C(N,mu)", rep.C_N_mu, rep.C_N_mu_exact}})
    if (std::abs(a / b - 1.0) > 1e-3)
      rep.warnings.push_back(std::string(name) + " differs from its closed form by more than 1e-3");
  return rep;
}

nlohmann::json to_json(const ConstantsReport& r) {
  return {{"S", {{"value", r.S}, {"exact", r.S_exact}, {"method", r.method_S}}},
          {"C_N_mu", {{"value", r.C_N_mu}, {"exact", r.C_N_mu_exact}, {"method", r.method_C}}},
          {"S_H", {{"value", r.S_H}, {"exact", r.S_H_exact}, {"method", r.method_S_H}}},
          {"S_H_direct", {{"value", r.S_H_direct}, {"method", r.method_S_H_direct}}},
          {"S_H_relative_gap", std::abs(r.S_H / r.S_H_direct - 1.0)},
          {"c_star_inf", {{"value", r.c_star_inf}, {"exact", r.c_star_inf_exact}, {"method", r.method_c_star}}},
          {"warnings", r.warnings}};
}

bool ExtremalityReport::all_increase() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const ExtremalityRow& r) { return r.increased; });
}

ExtremalityReport extremality_check(const KernelTable& table, int count, double size, std::uint64_t seed) {
  const auto& g = table.grid();
  const int N = g.dimension();
  const double tail = talenti_profile(N, 1.0, g.r_max());
  auto U = [&](double r) { return talenti_profile(N, 1.0, r) - tail; };
  ExtremalityReport rep;
  rep.base = rayleigh_quotients(table, RadialField::from_function(table.grid_ptr(), U));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(0.0, 4.0), width(0.3, 2.0), sign(-1.0, 1.0);
  for (int k = 0; k < count; ++k) {
    ExtremalityRow row;
    row.center = center(rng);
    row.width = width(rng);
    row.amplitude = size * (sign(rng) < 0.0 ? -1.0 : 1.0);
    const RadialField u = RadialField::from_function(table.grid_ptr(), [&](double r) {
      const double z = (r - row.center) / row.width;
      return U(r) * (1.0 + row.amplitude * std::exp(-z * z));
    });
    row.perturbed = rayleigh_quotients(table, u);
    row.increased = row.perturbed.sobolev > rep.base.sobolev && row.perturbed.hls > rep.base.hls &&
                    row.perturbed.S_H > rep.base.S_H;
    rep.rows.push_back(row);
  }
  return rep;
}

nlohmann::json to_json(const ExtremalityReport& r) {
  auto q = [](const Quotients& x) { return nlohmann::json{{"sobolev", x.sobolev}, {"hls", x.hls}, {"S_H", x.S_H}}; };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"center", row.center},
                    {"width", row.width},
                    {"amplitude", row.amplitude},
                    {"quotients", q(row.perturbed)},
                    {"increased", row.increased}});
  return {{"base", q(r.base)}, {"perturbations", rows}, {"all_increase", r.all_increase()}};
}

// ---------------------------------------------------------------- cutoff-bubble asymptotics

Regime classify(int N, double t) {
  const double c = N / (N - 2.0);
  if (std::abs(t - c) <= 1e-12 * c) return Regime::critical;
  return t > c ? Regime::above : Regime::below;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::above: return "t > N/(N-2)";
    case Regime::critical: return "t = N/(N-2)";
    default: return "t < N/(N-2)";
  }
}

bool PowerFit::within(double rel) const { return std::abs(fitted - predicted) <= rel * std::abs(predicted); }

const PowerFit* Prop22Table::find(const std::string& quantity, double t) const {
  for (const auto& f : fits)
    if (f.quantity == quantity && std::abs(f.t - t) < 1e-12) return &f;
  return nullptr;
}

namespace {

struct Slope {
  double slope, rms;
};
Slope loglog(const std::vector<double>& eps, const std::vector<double>& y) {
  std::vector<std::vector<double>> X;
  std::vector<double> ly;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    X.push_back({1.0, std::log(eps[i])});
    ly.push_back(std::log(std::abs(y[i])));
  }
  const auto f = detail::least_squares(X, ly);
  return {f.coef[1], f.rms};
}

}  // namespace

Prop22Table prop22_table(int N, double mu, std::optional<double> fixed_radius, double tau,
                         const std::vector<double>& eps_list, const std::vector<double>& t_exponents) {
  if (N < 3) throw ConfigError("prop22_table: N must be at least 3");
  if (!(mu > 0.0 && mu < N)) throw ConfigError("prop22_table: mu must lie in (0, N)");
  if (eps_list.size() < 2) throw ConfigError("prop22_table: need at least two eps values");
  Prop22Table T;
  T.N = N, T.mu = mu, T.fixed_radius = fixed_radius, T.tau = tau, T.t_exponents = t_exponents;
  const double area = sphere_area(N);
  const double S = sobolev_constant_exact(N);
  const double ts = 2.0 * N / (N - 2.0);
  const double p = (2.0 * N - mu) / (N - 2.0);
  T.grad_limit = std::pow(S, 0.5 * N);
  T.l2star_limit = T.grad_limit;
  T.hls_limit = hls_constant_exact(N, mu) * std::pow(S, 0.5 * (2.0 * N - mu));
  // Riesz potential of the bubble's p-th power:
  // \int |x-y|^{-mu} (1+|y|^2)^{-(2N-mu)/2} dy = pi^{N/2} G((N-mu)/2)/G(N-mu/2) (1+|x|^2)^{-mu/2}
  const double riesz_c = std::pow(std::numbers::pi, 0.5 * N) * std::tgamma(0.5 * (N - mu)) / std::tgamma(N - 0.5 * mu);
  const double A = talenti_amplitude(N);

  for (double eps : eps_list) {
    BubbleSpec spec = fixed_radius ? BubbleSpec::fixed(eps, *fixed_radius) : BubbleSpec::shrinking(eps, tau);
    spec.validate();
    const double rho = spec.rho();
    const double ell = eps * std::sqrt(S);
    auto U = [&](double r) { return talenti_profile(N, eps, r); };
    auto dU = [&](double r) { return talenti_profile_dr(N, eps, r); };
    auto u = [&](double r) { return cutoff_eta(rho, r) * U(r); };
    auto du = [&](double r) { return cutoff_eta_dr(rho, r) * U(r) + cutoff_eta(rho, r) * dU(r); };
    const double far = 1e12 * std::max(rho, ell);

    Prop22Row row;
    row.epsilon = eps, row.rho = rho;
    row.grad_deficit =
        area * (panel_integral([&](double r) { return (dU(r) * dU(r) - du(r) * du(r)) * std::pow(r, N - 1); }, rho,
                               2.0 * rho, ell) +
                panel_integral([&](double r) { return dU(r) * dU(r) * std::pow(r, N - 1); }, 2.0 * rho, far, ell));
    row.grad_norm2 = T.grad_limit - row.grad_deficit;
    row.l2star_deficit = area * panel_integral(
                                    [&](double r) {
                                      return (1.0 - std::pow(cutoff_eta(rho, r), ts)) * std::pow(U(r), ts) *
                                             std::pow(r, N - 1);
                                    },
                                    rho, far, ell);
    row.l2star_pow = T.l2star_limit - row.l2star_deficit;

    // D(U) - D(eta U) = 2 \int a U^p Phi_U - \int\int (a U^p)(a U^p)|x-y|^{-mu},  a = 1 - eta^p
    auto aUp = [&](double r) { return (1.0 - std::pow(cutoff_eta(rho, r), p)) * std::pow(U(r), p); };
    const double phi_scale = std::pow(eps, -0.5 * (2.0 * N - mu)) * std::pow(A, p) * std::pow(ell, N - mu) * riesz_c;
    auto PhiU = [&](double r) { return phi_scale * std::pow(1.0 + r * r / (ell * ell), -0.5 * mu); };
    const double lin = area * panel_integral([&](double r) { return aUp(r) * PhiU(r) * std::pow(r, N - 1); }, rho,
                                             far, ell);
    auto inner = [&](double r) {
      auto f = [&](double s) { return kernel_value(N, mu, r, s) * aUp(s) * std::pow(s, N - 1); };
      return panel_integral(f, rho, std::min(r, far), ell, 1e-9) + panel_integral(f, r, far, ell, 1e-9);
    };
    const double quad = area * panel_integral([&](double r) { return aUp(r) * inner(r) * std::pow(r, N - 1); },
                                              rho, 64.0 * rho, ell, 1e-9);
    row.hls_deficit = 2.0 * lin - quad;
    row.hls_value = T.hls_limit - row.hls_deficit;

    for (double t : t_exponents)
      row.lt.push_back(area * panel_integral([&](double r) { return std::pow(u(r), t) * std::pow(r, N - 1); }, 0.0,
                                             2.0 * rho, ell));
    T.rows.push_back(std::move(row));
  }

  // exponent predictions; a shrinking cutoff multiplies the tails by powers of rho = eps^tau
  const bool shrink = !fixed_radius;
  const double k = shrink ? 1.0 - tau : 1.0;
  std::vector<double> eps = eps_list, y;
  auto add = [&](const std::string& name, double predicted, auto pick) {
    y.clear();
    for (const auto& r : T.rows) y.push_back(pick(r));
    const Slope s = loglog(eps, y);
    PowerFit f;
    f.quantity = name, f.predicted = predicted, f.fitted = s.slope, f.residual = s.rms;
    T.fits.push_back(f);
  };
  add("grad_deficit", (N - 2.0) * k, [](const Prop22Row& r) { return r.grad_deficit; });
  add("l2star_deficit", N * k, [](const Prop22Row& r) { return r.l2star_deficit; });
  add("hls_deficit", N * k, [](const Prop22Row& r) { return r.hls_deficit; });
  for (std::size_t j = 0; j < t_exponents.size(); ++j) {
    const double t = t_exponents[j];
    PowerFit f;
    f.quantity = "lt", f.t = t, f.regime = classify(N, t);
    y.clear();
    for (const auto& r : T.rows) y.push_back(r.lt[j]);
    const Slope plain = loglog(eps, y);
    f.plain_fitted = plain.slope, f.plain_residual = plain.rms;
    switch (f.regime) {
      case Regime::above: f.predicted = N - t * (N - 2.0) / 2.0; break;
      case Regime::critical: f.predicted = t * (N - 2.0) / 2.0; break;
      case Regime::below:
        f.predicted = t * (N - 2.0) / 2.0 + (shrink ? tau * (N - t * (N - 2.0)) : 0.0);
        break;
    }
    if (f.regime == Regime::critical) {
      std::vector<double> yc;
      for (std::size_t i = 0; i < eps.size(); ++i) yc.push_back(y[i] / std::abs(std::log(eps[i])));
      const Slope c = loglog(eps, yc);
      f.log_corrected = true, f.fitted = c.slope, f.residual = c.rms;
    } else {
      f.fitted = plain.slope, f.residual = plain.rms;
    }
    T.fits.push_back(f);
  }
  return T;
}

nlohmann::json to_json(const Prop22Table& T) {
  nlohmann::json rows = nlohmann::json::array(), fits = nlohmann::json::array();
  for (const auto& r : T.rows)
    rows.push_back({{"epsilon", r.epsilon},
                    {"rho", r.rho},
                    {"grad_norm2", r.grad_norm2},
                    {"grad_deficit", r.grad_deficit},
                    {"l2star_pow", r.l2star_pow},
                    {"l2star_deficit", r.l2star_deficit},
                    {"hls_value", r.hls_value},
                    {"hls_deficit", r.hls_deficit},
                    {"lt", r.lt}});
  for (const auto& f : T.fits) {
    nlohmann::json j = {{"quantity", f.quantity}, {"predicted", f.predicted}, {"fitted", f.fitted},
                        {"residual", f.residual}};
    if (f.quantity == "lt") {
      j["t"] = f.t;
      j["regime"] = to_string(f.regime);
      j["log_corrected"] = f.log_corrected;
      j["plain_fitted"] = f.plain_fitted;
      j["plain_residual"] = f.plain_residual;
    }
    fits.push_back(j);
  }
  nlohmann::json out = {{"N", T.N},
                        {"mu", T.mu},
                        {"cutoff", T.fixed_radius ? "fixed" : "shrinking"},
                        {"grad_limit", T.grad_limit},
                        {"l2star_limit", T.l2star_limit},
                        {"hls_limit", T.hls_limit},
                        {"t_exponents", T.t_exponents},
                        {"rows", rows},
                        {"fits", fits}};
  if (T.fixed_radius) out["radius"] = *T.fixed_radius;
  else out["tau"] = T.tau;
  return out;
}

// ---------------------------------------------------------------- regime gate

int theorem_case(const ProblemParams& p) {
  const int N = p.dimension;
  const double mt = p.mu_tilde, gp = p.gamma_plus(), a = p.alpha;
  if (N >= 6) {
    const double den = a * (mt - 1.0) - gp;
    if (mt > 2.0 && den > 0.0 && N >= 2.0 + 4.0 * a / den) return 1;
    return 0;
  }
  if (N == 5) return mt > 7.0 / 3.0 + gp / a ? 2 : 0;
  if (N == 4) return mt > 3.0 + gp / a ? 3 : 0;
  if (N == 3) return mt > 5.0 + gp / a ? 4 : 0;
  return 0;
}

double RegimeGate::min_term(double t, bool corrected) const {
  double m = std::min({N - 2.0, (N - 2.0) * delta / 2.0, (2.0 * N - mu) * (1.0 - t), (2.0 * N - mu) * (1.0 - t) / 2.0});
  if (corrected) m = std::min(m, (N - 2.0) * (1.0 - t));
  return m;
}

RegimeGate regime_gate(const ProblemParams& p) {
  RegimeGate g;
  g.N = p.dimension, g.mu = p.mu, g.delta = p.delta();
  g.theorem_case = theorem_case(p);
  g.target = p.dimension - (p.dimension - 2.0) * p.mu_tilde / 2.0;
  const double T = g.target;
  const int N = p.dimension;
  const bool fixed_ok = (N - 2.0) > T && (N - 2.0) * g.delta / 2.0 > T;
  g.tau_lo = 0.5;
  g.tau_hi = std::min(1.0, 1.0 - 2.0 * T / (2.0 * N - p.mu));
  g.tau_hi_corrected = std::min(g.tau_hi, 1.0 - T / (N - 2.0));
  g.feasible = fixed_ok && g.tau_hi > g.tau_lo;
  g.feasible_corrected = fixed_ok && g.tau_hi_corrected > g.tau_lo;
  if (g.feasible_corrected) g.tau = 0.5 * (g.tau_lo + g.tau_hi_corrected);
  else if (g.feasible) g.tau = 0.5 * (g.tau_lo + g.tau_hi);
  else g.tau = 0.75;
  return g;
}

nlohmann::json to_json(const RegimeGate& g) {
  return {{"theorem_case", g.theorem_case},
          {"target", g.target},
          {"tau_lo", g.tau_lo},
          {"tau_hi", g.tau_hi},
          {"tau_hi_corrected", g.tau_hi_corrected},
          {"feasible", g.feasible},
          {"feasible_corrected", g.feasible_corrected},
          {"tau", g.tau},
          {"min_term_at_tau", g.min_term(g.tau, false)},
          {"min_term_corrected_at_tau", g.min_term(g.tau, true)}};
}

// ---------------------------------------------------------------- threshold

ThresholdReport threshold_experiment(const Problem& pb, const BubbleSpec& spec, double c_star) {
  const auto& p = pb.params();
  const auto& grid = pb.grid();
  ThresholdReport rep;
  rep.epsilon = spec.epsilon, rep.tau = spec.tau, rep.rho = spec.rho(), rep.c_star_inf = c_star;
  const RegimeGate gate = regime_gate(p);
  rep.regime_case = gate.theorem_case;
  rep.regime_ok = gate.theorem_case != 0 && gate.feasible && !spec.fixed_radius && spec.tau > gate.tau_lo &&
                  spec.tau < gate.tau_hi;
  if (gate.theorem_case == 0) rep.warnings.push_back("(N, mu~) outside every case of the existence theorem");
  if (!rep.regime_ok) rep.warnings.push_back("tau outside the feasible window of the regime gate");
  else if (spec.tau >= gate.tau_hi_corrected)
    rep.warnings.push_back("tau leaves the kinetic deficit (N-2)(1-tau) below the leading gain");

  const RadialField u = cutoff_bubble(pb.grid_ptr(), spec);
  const RayMax rm = ray_max(pb, FunctionalKind::limit, u);
  rep.sup_J_inf = rm.sup_value;
  rep.t_at_max = rm.t_at_max;
  rep.margin = c_star - rm.sup_value;

  const double q = p.two_star_mu(), a = p.alpha, b = p.beta;
  rep.grad_norm2 = grid.dirichlet(u.values());
  rep.hls_norm = double_integral(pb.table(), u, q);
  rep.t_max_pred = std::pow(std::pow(b, 2.0 * q) / std::pow(a, 2.0 * q - 1.0) * rep.grad_norm2 / rep.hls_norm,
                            1.0 / (2.0 * q - 2.0));
  rep.K_max_pred = (1.0 / a) * std::pow(b * b / a, q / (q - 1.0)) * (0.5 - 0.5 / q) *
                   std::pow(rep.grad_norm2 / std::pow(rep.hls_norm, 1.0 / q), q / (q - 1.0));
  // K(t) = t^2/2 ||grad u||^2 - t^{2q} (a/b)^{2q} D(u) / (2 a q), maximised numerically
  const double cK = std::pow(a / b, 2.0 * q) * rep.hls_norm / (2.0 * a * q);
  auto negK = [&](double t) { return -(0.5 * t * t * rep.grad_norm2 - std::pow(t, 2.0 * q) * cK); };
  std::uintmax_t it = 200;
  rep.t_max_observed =
      boost::math::tools::brent_find_minima(negK, 0.05 * rep.t_max_pred, 20.0 * rep.t_max_pred, 50, it).first;
  return rep;
}

nlohmann::json to_json(const ThresholdReport& r) {
  return {{"epsilon", r.epsilon},
          {"tau", r.tau},
          {"rho", r.rho},
          {"sup_J_inf", r.sup_J_inf},
          {"t_at_max", r.t_at_max},
          {"c_star_inf", r.c_star_inf},
          {"margin", r.margin},
          {"t_max_pred", r.t_max_pred},
          {"K_max_pred", r.K_max_pred},
          {"t_max_observed", r.t_max_observed},
          {"grad_norm2", r.grad_norm2},
          {"hls_norm", r.hls_norm},
          {"regime_case", r.regime_case},
          {"regime_ok", r.regime_ok},
          {"warnings", r.warnings}};
}

}  // namespace choq
