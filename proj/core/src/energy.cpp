#include "choqlab/energy.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "choqlab/errors.hpp"

namespace choq {

Problem::Problem(CoefficientModel model, ProblemParams params, TablePtr table)
    : model_(std::move(model)), params_(params), table_(std::move(table)) {
  if (!table_) throw ConfigError("problem: missing kernel table");
  if (table_->mu() != params_.mu) throw ConfigError("problem: kernel table built for a different mu");
  if (table_->grid().dimension() != params_.dimension)
    throw ConfigError("problem: kernel table built for a different dimension");
  const auto r = grid().nodes();
  a_.resize(r.size());
  hw_.resize(r.size());
  ones_.assign(r.size(), 1.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    a_[i] = model_.a(r[i]);
    hw_[i] = model_.h_weight(r[i]);
  }
}

void Problem::attach_verification(const AxiomReport& report) { verified_ = report.all_pass(); }

void Problem::require_verified(const char* op) const {
  if (!verified_)
    throw UnverifiedHypothesis(std::string(op) +
                               ": structural hypotheses not verified for this model (run the axiom suite)");
}

void Problem::check_field(const RadialField& v) const {
  if (!grid().same_as(v.grid())) throw ConfigError("field grid does not match the kernel table grid");
}

Evaluation evaluate(const Problem& pb, FunctionalKind kind, const RadialField& v, bool with_gradient) {
  pb.check_field(v);
  const auto& g = pb.grid();
  const auto& m = pb.model();
  const std::size_t n = v.size();
  const double S = g.sphere_area();
  const double p = pb.params().choquard_power();
  const auto& a = pb.a_nodes(kind);
  const auto& hw = pb.h_nodes(kind);

  std::vector<double> u(n), up(n), q(n), phi(n, 0.0);
  bool any_positive = false;
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = m.G_inverse(v[i]);
    up[i] = std::max(u[i], 0.0);
    any_positive = any_positive || up[i] > 0.0;
    q[i] = g.weight(i) * std::pow(up[i], p);
  }
  if (any_positive) pb.table().apply(q, phi);

  Evaluation out;
  EnergyBreakdown& e = out.energy;
  e.kinetic = 0.5 * g.dirichlet(v.values());
  double pot = 0.0, hterm = 0.0, dsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = g.weight(i);
    pot += w * a[i] * u[i] * u[i];
    hterm += w * hw[i] * m.hbar(up[i]).H;
    dsum += q[i] * phi[i];
  }
  e.potential = 0.5 * S * pot;
  e.f_term = S * hterm;
  e.choquard = S * dsum / (2.0 * p);
  e.total = e.kinetic + e.potential - e.f_term - e.choquard;

  if (with_gradient) {
    out.gradient.resize(n);
    out.residual.resize(n);
    g.stiffness_apply(v.values(), out.gradient);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = g.weight(i);
      const double gu = m.g(u[i]).value;
      double local = (a[i] * u[i] - hw[i] * m.hbar(u[i]).h) / gu;
      if (up[i] > 0.0) local -= std::pow(up[i], p - 1.0) * phi[i] / gu;
      out.residual[i] = out.gradient[i] / w + local;
      out.gradient[i] = S * (out.gradient[i] + w * local);
    }
  }
  return out;
}

EnergyBreakdown energy(const Problem& pb, FunctionalKind kind, const RadialField& v) {
  return evaluate(pb, kind, v, false).energy;
}

double gateaux(const Problem& pb, FunctionalKind kind, const RadialField& v, const RadialField& phi) {
  pb.check_field(phi);
  const Evaluation ev = evaluate(pb, kind, v, true);
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += ev.gradient[i] * phi[i];
  return s;
}

double ray_derivative(const Problem& pb, FunctionalKind kind, const RadialField& u, double t) {
  return gateaux(pb, kind, u.scaled(t), u);
}

double nehari_factor(const Problem& pb, FunctionalKind kind, const RadialField& u, double t) {
  return ray_derivative(pb, kind, u, t) / t;
}

double nehari_scale(const Problem& pb, FunctionalKind kind, const RadialField& u) {
  pb.require_verified("nehari_scale");
  pb.check_field(u);
  if (std::none_of(u.values().begin(), u.values().end(), [](double x) { return x > 0.0; }))
    throw DegenerateDirection("nehari_scale: u^+ vanishes identically");
  auto nu = [&](double t) { return nehari_factor(pb, kind, u, t); };
  double lo = 1.0, hi = 1.0;
  double flo = nu(1.0), fhi = flo;
  if (flo > 0.0) {
    while (fhi > 0.0) {
      lo = hi, flo = fhi;
      hi *= 2.0;
      if (hi > 1e8) throw DegenerateDirection("nehari_scale: no sign change of nu(t) up to t = 1e8");
      fhi = nu(hi);
    }
  } else {
    while (flo <= 0.0) {
      hi = lo, fhi = flo;
      lo *= 0.5;
      if (lo < 1e-12) throw DegenerateDirection("nehari_scale: nu(t) not positive near t = 0");
      flo = nu(lo);
    }
  }
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 4e-15 * std::max(std::abs(a), std::abs(b)); };
  auto [a, b] = boost::math::tools::toms748_solve(nu, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (a + b);
}

RayMax ray_max(const Problem& pb, FunctionalKind kind, const RadialField& u) {
  const double ts = nehari_scale(pb, kind, u);
  RayMax best{ts, energy(pb, kind, u.scaled(ts)).total};
  // Brent (golden-section with parabolic steps) on a window around the Nehari scaling
  auto neg = [&](double t) { return -energy(pb, kind, u.scaled(t)).total; };
  std::uintmax_t it = 100;
  const auto [t, fv] = boost::math::tools::brent_find_minima(neg, 0.5 * ts, 1.5 * ts, 40, it);
  if (-fv > best.sup_value) best = {t, -fv};
  return best;
}

MountainPassReport mp_geometry_check(const Problem& pb, FunctionalKind kind,
                                     const std::vector<RadialField>& directions,
                                     const std::vector<double>& rho_grid) {
  if (directions.empty()) throw ConfigError("mp_geometry_check: need at least one direction");
  MountainPassReport rep;
  std::vector<RadialField> unit;
  std::vector<double> nrm;
  for (const auto& d : directions) {
    pb.check_field(d);
    const double h1 = norms(d).h1;
    if (!(h1 > 0.0)) throw DegenerateDirection("mp_geometry_check: zero direction");
    unit.push_back(d.scaled(1.0 / h1));
    nrm.push_back(h1);
  }
  rep.rows.push_back({0.0, 0.0});
  rep.best_floor = -std::numeric_limits<double>::infinity();
  for (double rho : rho_grid) {
    double inf = std::numeric_limits<double>::infinity();
    for (const auto& d : unit) inf = std::min(inf, energy(pb, kind, d.scaled(rho)).total);
    rep.rows.push_back({rho, inf});
    if (inf > rep.best_floor) rep.best_floor = inf, rep.best_rho = rho;
  }
  rep.floor_positive = rep.best_floor > 0.0;
  rep.all_directions_negative = true;
  for (std::size_t k = 0; k < unit.size(); ++k) {
    double found = std::numeric_limits<double>::quiet_NaN();
    for (double t = 1.0; t <= 1e8; t *= 2.0)
      if (energy(pb, kind, unit[k].scaled(t)).total < 0.0) {
        found = t / nrm[k];
        break;
      }
    rep.negative_t.push_back(found);
    rep.all_directions_negative = rep.all_directions_negative && !std::isnan(found);
  }
  return rep;
}

std::vector<CurvePoint> energy_curve(const Problem& pb, FunctionalKind kind, const RadialField& u,
                                     const std::vector<double>& t_values) {
  pb.check_field(u);
  if (std::none_of(u.values().begin(), u.values().end(), [](double x) { return x != 0.0; }))
    throw DegenerateDirection("energy_curve: zero direction");
  std::vector<CurvePoint> out;
  out.reserve(t_values.size());
  for (double t : t_values) out.push_back({t, energy(pb, kind, u.scaled(t))});
  return out;
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  std::ostringstream s;
  s << std::setprecision(17) << "t,total,kinetic,potential,f_term,choquard\n";
  for (const auto& c : curve)
    s << c.t << ',' << c.e.total << ',' << c.e.kinetic << ',' << c.e.potential << ',' << c.e.f_term << ','
      << c.e.choquard << '\n';
  os << s.str();
}

}  // namespace choq
