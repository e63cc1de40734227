#include "choqlab/solver.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "choqlab/errors.hpp"
#include "fit.hpp"

namespace choq {

void SolverConfig::validate() const {
  if (max_iters < 1) throw ConfigError("solver: max_iters must be positive");
  if (!(step0 > 0.0)) throw ConfigError("solver: step0 must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("solver: armijo_c must lie in (0,1)");
  if (!(grad_tol >= 1e-10)) throw ConfigError("solver: grad_tol must be at least 1e-10");
  if (nehari_every < 1) throw ConfigError("solver: nehari_every must be positive");
  if (!(decay_lo > 0.0 && decay_hi > decay_lo)) throw ConfigError("solver: decay window must satisfy 0 < lo < hi");
}

std::vector<double> sobolev_gradient(const RadialGrid& grid, std::span<const double> g) {
  // (K + M) z = g / |S| with M = diag(w); z_{n-1} = 0. Thomas algorithm.
  const std::size_t n = grid.size();
  const auto sig = grid.fluxes();
  const double S = grid.sphere_area();
  std::vector<double> diag(n), upper(n, 0.0), rhs(n), z(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    diag[i] = grid.weight(i) + sig[i] + (i > 0 ? sig[i - 1] : 0.0);
    upper[i] = i + 2 < n ? -sig[i] : 0.0;  // coupling to the pinned node is dropped
    rhs[i] = g[i] / S;
  }
  const std::size_t m = n - 1;
  for (std::size_t i = 1; i < m; ++i) {
    const double f = -sig[i - 1] / diag[i - 1];
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  for (std::size_t k = m; k-- > 0;) z[k] = (rhs[k] - (k + 1 < m ? upper[k] * z[k + 1] : 0.0)) / diag[k];
  return z;
}

double weak_residual(const Problem& pb, const RadialField& v, FunctionalKind kind) {
  pb.check_field(v);
  const double h1 = norms(v).h1;
  if (h1 == 0.0) return 0.0;
  const Evaluation ev = evaluate(pb, kind, v, true);
  const auto& g = pb.grid();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) s += g.weight(i) * ev.residual[i] * ev.residual[i];
  return std::sqrt(g.sphere_area() * s) / h1;
}

DecayFit decay_fit(const RadialField& v, double r_lo, double r_hi) {
  const auto& g = v.grid();
  if (!(r_lo < r_hi)) throw ConfigError("decay_fit: empty window");
  if (r_hi > 0.8 * g.r_max()) throw ConfigError("decay_fit: window must end before 0.8 r_max");
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = g.node(i);
    if (r < r_lo || r > r_hi) continue;
    if (!(v[i] > 0.0)) throw ConfigError("decay_fit: field not positive on the window");
    X.push_back({1.0, -r, -std::log1p(r)});
    y.push_back(std::log(v[i]));
  }
  if (X.size() < 20) throw ConfigError("decay_fit: fewer than 20 nodes in the window");
  const auto f = detail::least_squares(X, y);
  DecayFit d;
  d.r_lo = r_lo, d.r_hi = r_hi, d.nodes = static_cast<int>(X.size());
  d.intercept = f.coef[0], d.slope = f.coef[1], d.algebraic_exp = f.coef[2], d.fit_residual = f.rms;
  return d;
}

namespace {

double h1_inner(const RadialGrid& g, std::span<const double> a, std::span<const double> b) {
  double s = g.dirichlet_inner(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) s += g.sphere_area() * g.weight(i) * a[i] * b[i];
  return s;
}

RadialField project(const Problem& pb, const RadialField& v) {
  return v.scaled(nehari_scale(pb, FunctionalKind::limit, v));
}

}  // namespace

GroundStateResult find_ground_state(const Problem& pb, const SolverConfig& cfg, std::optional<RadialField> start) {
  cfg.validate();
  pb.require_verified("find_ground_state");
  const auto kind = FunctionalKind::limit;
  const auto& grid = pb.grid();
  const std::size_t n = grid.size();

  RadialField v = start ? *start : RadialField::from_function(pb.grid_ptr(), [](double r) { return std::exp(-r * r); });
  pb.check_field(v);
  {
    std::vector<double> x(v.values().begin(), v.values().end());
    x.back() = 0.0;
    for (double& e : x) e = std::max(e, 0.0);
    v = RadialField(pb.grid_ptr(), std::move(x));
  }
  if (std::none_of(v.values().begin(), v.values().end(), [](double x) { return x > 0.0; }))
    throw DegenerateDirection("find_ground_state: starting field has no positive part");
  v = project(pb, v);

  GroundStateResult res{v, 0.0, 0.0, 0.0, std::nullopt, 0, false, {}, {}};
  Evaluation ev = evaluate(pb, kind, v, true);
  double res_norm = weak_residual(pb, v);
  double step = cfg.step0;
  std::vector<double> z_prev, v_prev;
  res.log.push_back({0, ev.energy.total, res_norm, 0.0});

  // Zhang-Hager reference: a weighted mean of past energies, so BB steps may climb briefly
  constexpr double eta = 0.85;
  double ref = ev.energy.total, ref_q = 1.0;
  // below this the energy difference is roundoff and cannot rank two trial fields
  const auto flat = [](double e) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(e)); };

  int it = 0;
  for (; it < cfg.max_iters && res_norm >= cfg.grad_tol; ++it) {
    std::vector<double> z = sobolev_gradient(grid, ev.gradient);
    if (!z_prev.empty()) {
      std::vector<double> dv(n), dz(n);
      for (std::size_t i = 0; i < n; ++i) dv[i] = v[i] - v_prev[i], dz[i] = z[i] - z_prev[i];
      const double num = h1_inner(grid, dv, dv), den = h1_inner(grid, dv, dz);
      if (den > 0.0 && num > 0.0) step = std::clamp(num / den, 1e-8, 1e8);
    }
    double slope = 0.0;  // <J'(v), z> = ||z||_{H^1}^2
    for (std::size_t i = 0; i < n; ++i) slope += ev.gradient[i] * z[i];
    const bool reproject = (it + 1) % cfg.nehari_every == 0;

    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = std::max(v[i] - step * z[i], 0.0);
      x.back() = 0.0;
      if (std::none_of(x.begin(), x.end(), [](double e) { return e > 0.0; })) continue;
      RadialField trial(pb.grid_ptr(), std::move(x));
      try {
        if (reproject) trial = project(pb, trial);
      } catch (const DegenerateDirection&) {
        continue;
      }
      const Evaluation et = evaluate(pb, kind, trial, true);
      bool ok = et.energy.total <= ref - cfg.armijo_c * step * slope;
      if (!ok && cfg.armijo_c * step * slope < flat(ref) && et.energy.total <= ev.energy.total + flat(ref))
        ok = weak_residual(pb, trial) < res_norm;
      if (ok) {
        v_prev.assign(v.values().begin(), v.values().end());
        z_prev = std::move(z);
        v = std::move(trial);
        ev = et;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no admissible step: report as not converged
    ref_q = eta * ref_q + 1.0;
    ref = ref + (ev.energy.total - ref) / ref_q;
    res_norm = weak_residual(pb, v);
    res.log.push_back({it + 1, ev.energy.total, res_norm, step});
  }

  res.field = v;
  res.iterations = it;
  res.energy_level = ev.energy.total;
  res.residual = res_norm;
  res.nehari_value = gateaux(pb, kind, v, v);
  res.converged = res_norm < cfg.grad_tol && std::abs(res.nehari_value) < 10.0 * cfg.grad_tol;
  {
    // half-maximum radius against the local spacing: a field narrower than a few cells is a grid artifact
    std::size_t k = 0;
    while (k + 1 < n && v[k] > 0.5 * v[0]) ++k;
    if (k < 4)
      res.warnings.push_back("field concentrates within " + std::to_string(k) +
                             " cells of the origin; the level is not resolved by this grid");
  }
  if (cfg.decay_hi <= 0.8 * grid.r_max()) {
    try {
      res.decay = decay_fit(v, cfg.decay_lo, cfg.decay_hi);
    } catch (const ConfigError&) {
    }
  }
  return res;
}

// ---------------------------------------------------------------- translated ratio bounds

bool Lemma45Table::pass(double band) const {
  return !rows.empty() && floor_ball >= 1.0 / band && ceiling_weighted <= band && ceiling_weighted_p <= band;
}

Lemma45Table lemma45_check(const RadialField& w, const std::vector<double>& R_list, double mu_hat, double p) {
  const auto& g = w.grid();
  const int N = g.dimension();
  if (R_list.empty()) throw ConfigError("lemma45_check: empty R list");
  for (double R : R_list)
    if (R < 1.0 || R > 0.5 * g.r_max()) throw ConfigError("lemma45_check: R must lie in [1, r_max/2]");
  if (!w.nonnegative()) throw ConfigError("lemma45_check: w must be nonnegative");
  Lemma45Table T;
  T.mu_hat = mu_hat, T.p = p;
  for (double R : R_list) {
    Lemma45Row row{};
    row.R = R;
    row.inner_ball = translated_integral(w, R, [](double, double gv) { return gv * gv; }, 1.0);
    row.weighted = pair_integral(w, [&](double r) { return std::exp(-mu_hat * r); },
                                 [](double gv) { return gv * gv; }, R);
    row.weighted_p = pair_integral(w, [&](double r) { return std::exp(-mu_hat * r); },
                                   [&](double gv) { return std::pow(std::max(gv, 0.0), p + 1.0); }, R);
    const double base = std::pow(R, -(N - 1.0)) * std::exp(-2.0 * R);
    row.ratio_ball = row.inner_ball / base;
    row.ratio_weighted = row.weighted / base;
    row.ratio_weighted_p = row.weighted_p / std::exp(-std::min(mu_hat, p + 1.0) * R);
    T.rows.push_back(row);
  }
  const auto& r0 = T.rows.front();
  T.floor_ball = std::numeric_limits<double>::infinity();
  for (const auto& r : T.rows) {
    T.floor_ball = std::min(T.floor_ball, r.ratio_ball / r0.ratio_ball);
    T.ceiling_weighted = std::max(T.ceiling_weighted, r.ratio_weighted / r0.ratio_weighted);
    T.ceiling_weighted_p = std::max(T.ceiling_weighted_p, r.ratio_weighted_p / r0.ratio_weighted_p);
  }
  return T;
}

// ---------------------------------------------------------------- translated competitors

namespace {

// J(v) - J^inf(v) = -1/2 \int (1-a) G^{-1}(v)^2 + \int (Hbar - H)(x, G^{-1}(v))
struct Corrections {
  double potential, h;
};

Corrections corrections(const Problem& pb, const RadialField& w, double R, double t) {
  const auto& m = pb.model();
  const double k = m.h_exponent() + 1.0;
  auto pot = [&](double r, double gv) {
    const double u = m.G_inverse(t * gv);
    return -0.5 * m.a_defect(r) * u * u;
  };
  auto hl = [&](double r, double gv) {
    if (!(gv > 0.0)) return 0.0;
    const double u = m.G_inverse(t * gv);
    return m.h_defect(r, u) * u / k;  // H = h u / (m+1) for power-type h
  };
  return {translated_integral(w, R, pot), translated_integral(w, R, hl)};
}

}  // namespace

double lemma52_correction(const Problem& pb, const RadialField& w, double R, double t) {
  const Corrections c = corrections(pb, w, R, t);
  return c.potential + c.h;
}

bool Lemma52Table::all_positive() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const Lemma52Row& r) { return r.margin > 0.0; });
}

Lemma52Table lemma52_experiment(const Problem& pb, const RadialField& w, const std::vector<double>& R_list,
                                const std::vector<double>& control_t) {
  pb.require_verified("lemma52_experiment");
  pb.check_field(w);
  const auto& g = pb.grid();
  for (double R : R_list)
    if (R < 0.0 || R > 0.5 * g.r_max()) throw ConfigError("lemma52_experiment: R must lie in [0, r_max/2]");
  const RayMax ground = ray_max(pb, FunctionalKind::limit, w);
  auto Jinf = [&](double t) { return energy(pb, FunctionalKind::limit, w.scaled(t)).total; };

  Lemma52Table T;
  for (double R : R_list) {
    // f(t) = J(t w_R) - sup J^inf, maximised near the ray maximum of J^inf
    auto f = [&](double t) { return (Jinf(t) - ground.sup_value) + lemma52_correction(pb, w, R, t); };
    const double ts = ground.t_at_max;
    std::uintmax_t it = 60;
    const auto [tb, fb] = boost::math::tools::brent_find_minima([&](double t) { return -f(t); }, 0.8 * ts, 1.2 * ts,
                                                                 40, it);
    double best_t = tb, best = -fb;
    const double f0 = f(ts);
    if (f0 > best) best = f0, best_t = ts;
    const Corrections c = corrections(pb, w, R, best_t);
    T.rows.push_back({R, ground.sup_value + best, best_t, ground.sup_value, -best, c.potential, c.h});
  }
  for (double t : control_t) {
    const double direct = energy(pb, FunctionalKind::full, w.scaled(t)).total - Jinf(t);
    T.control.push_back({t, direct});
  }
  return T;
}

// ---------------------------------------------------------------- output

void write_iterations_csv(std::ostream& os, const std::vector<IterationRecord>& log) {
  std::ostringstream s;
  s << std::setprecision(17) << "iter,energy,residual,step\n";
  for (const auto& r : log) s << r.iter << ',' << r.energy << ',' << r.residual << ',' << r.step << '\n';
  os << s.str();
}

nlohmann::json to_json(const DecayFit& d) {
  return {{"r_lo", d.r_lo},         {"r_hi", d.r_hi},       {"nodes", d.nodes},
          {"slope", d.slope},       {"algebraic_exp", d.algebraic_exp},
          {"intercept", d.intercept}, {"fit_residual", d.fit_residual}};
}

nlohmann::json to_json(const Lemma45Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"R", r.R},
                    {"inner_ball", r.inner_ball},
                    {"weighted", r.weighted},
                    {"weighted_p", r.weighted_p},
                    {"ratio_ball", r.ratio_ball},
                    {"ratio_weighted", r.ratio_weighted},
                    {"ratio_weighted_p", r.ratio_weighted_p}});
  return {{"mu_hat", t.mu_hat},
          {"p", t.p},
          {"rows", rows},
          {"floor_ball", t.floor_ball},
          {"ceiling_weighted", t.ceiling_weighted},
          {"ceiling_weighted_p", t.ceiling_weighted_p},
          {"pass", t.pass()}};
}

nlohmann::json to_json(const Lemma52Table& t) {
  nlohmann::json rows = nlohmann::json::array(), ctl = nlohmann::json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"R", r.R},
                    {"sup_J", r.sup_J},
                    {"t_at_sup", r.t_at_sup},
                    {"J_inf", r.J_inf},
                    {"margin", r.margin},
                    {"potential_gain", r.potential_gain},
                    {"h_loss", r.h_loss}});
  for (const auto& c : t.control) ctl.push_back({{"t", c.t}, {"J_minus_Jinf", c.difference}});
  return {{"rows", rows}, {"control_R0", ctl}, {"all_positive", t.all_positive()}};
}

}  // namespace choq
