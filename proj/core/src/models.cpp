#include "choqlab/models.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "choqlab/errors.hpp"

namespace choq {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void ProblemParams::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid parameters: " + what); };
  if (dimension < 3) fail("dimension must be >= 3");
  if (!(mu > 0.0 && mu < std::min<double>(dimension, 4.0))) fail("mu must lie in (0, min{N,4})");
  if (!(alpha >= 1.0)) fail("alpha must be >= 1");
  if (!(beta > 0.0)) fail("beta must be positive");
  if (!(gamma < alpha)) fail("gamma must be < alpha");
  if (!(mu_tilde > 2.0 && mu_tilde < two_star())) fail("mu_tilde must lie in (2, 2*)");
  if (!(nu_decay > 2.0)) fail("nu must be > 2");
  if (!(p_growth > 1.0 && p_growth < two_star() - 1.0)) fail("p must lie in (1, 2*-1)");
}

CoefficientModel::CoefficientModel(GFamily g, ExpWeightedPower h, ExpWell a, Fault fault)
    : g_(g), h_(h), a_(a), fault_(fault) {
  std::visit(overloaded{[this](const SqrtPower& s) {
                          if (!(s.q > 0.5)) throw ConfigError("SqrtPower needs q > 1/2");
                          alpha_ = s.q + 1.0;
                          beta_ = (s.q + 1.0) / kSqrt2;
                          if (s.q == 1.0) closed_form_ = 1;
                        },
                        [this](const PlainPower& p) {
                          if (!(p.alpha >= 1.0)) throw ConfigError("PlainPower needs alpha >= 1");
                          alpha_ = p.alpha;
                          beta_ = 1.0;
                          if (p.alpha == 1.0) closed_form_ = 2;
                          if (p.alpha == 2.0) closed_form_ = 3;
                          if (p.alpha == 3.0) closed_form_ = 4;
                        }},
             g_);
  if (!(a_.k >= 0.0 && a_.k < 1.0)) throw ConfigError("ExpWell needs k in [0,1)");
  if (!(a_.nu > 0.0) || !(h_.nu > 0.0)) throw ConfigError("decay rates must be positive");
  if (!(h_.q_h > 0.0)) throw ConfigError("ExpWeightedPower needs q_h > 0");
  m_ = alpha_ * h_.q_h + alpha_ - 1.0;
}

GValue CoefficientModel::g(double t) const {
  const double at = std::abs(t);
  const double sgn = t < 0.0 ? -1.0 : 1.0;
  GValue out = std::visit(
      overloaded{[at, sgn](const SqrtPower& s) {
                   const double c = 0.5 * (s.q + 1.0) * (s.q + 1.0);
                   const double g = std::sqrt(1.0 + c * std::pow(at, 2.0 * s.q));
                   const double dg = s.q * c * std::pow(at, 2.0 * s.q - 1.0) / g;
                   return GValue{g, sgn * dg};
                 },
                 [at, sgn](const PlainPower& p) {
                   const double base = 1.0 + at * at;
                   const double g = std::pow(base, 0.5 * (p.alpha - 1.0));
                   const double dg = (p.alpha - 1.0) * at * g / base;
                   return GValue{g, sgn * dg};
                 }},
      g_);
  if (fault_ == Fault::negate_g_derivative) out.derivative = -out.derivative;
  return out;
}

double CoefficientModel::G_quadrature(double t) const {
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [this](double x) { return g(x).value; };
  // depth is capped: below ~1e-13 the error estimate is roundoff and refinement would never stop
  return gauss_kronrod<double, 21>::integrate(integrand, 0.0, t, 12, 1e-13);
}

double CoefficientModel::G(double t) const {
  const double at = std::abs(t);
  double val = 0.0;
  switch (closed_form_) {
    case 1:
      val = 0.5 * at * std::sqrt(1.0 + 2.0 * at * at) + std::asinh(kSqrt2 * at) / (2.0 * kSqrt2);
      break;
    case 2:
      val = at;
      break;
    case 3:
      val = 0.5 * at * std::sqrt(1.0 + at * at) + 0.5 * std::asinh(at);
      break;
    case 4:
      val = at + at * at * at / 3.0;
      break;
    default:
      val = at > 0.0 ? G_quadrature(at) : 0.0;
  }
  return t < 0.0 ? -val : val;
}

double CoefficientModel::G_inverse(double s) const {
  if (s == 0.0) return 0.0;
  if (!std::isfinite(s)) throw NumericFailure("G_inverse: non-finite argument");
  const double as = std::abs(s);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  // g >= 1 and t^alpha <= (alpha/beta) G(t) both bound the root from above
  double hi = std::min(as, std::pow(as * alpha_ / beta_, 1.0 / alpha_));
  if (G(hi) < as) hi = as;
  double lo = 0.0;
  double x = hi;
  bool done = false;
  // G is convex on [0,inf), so Newton started right of the root stays right of it;
  // the bracket only matters for models that break the hypotheses.
  for (int it = 0; it < 200 && !done; ++it) {
    const double r = G(x) - as;
    if (r == 0.0) break;
    (r > 0.0 ? hi : lo) = x;
    double next = x - r / std::abs(g(x).value);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    done = std::abs(next - x) <= 4.0 * eps * x || hi - lo <= 4.0 * eps * hi;
    x = next;
  }
  if (!(std::abs(G(x) - as) <= 1e-12 * std::max(1.0, as)))
    throw NumericFailure("G_inverse did not converge");
  return s < 0.0 ? -x : x;
}

double CoefficientModel::h_weight(double x_radius) const {
  return -std::expm1(-h_.nu * std::abs(x_radius));
}

HValue CoefficientModel::hbar(double t) const {
  if (t <= 0.0) return {0.0, 0.0};
  const double tm = std::pow(t, m_);
  return {tm, tm * t / (m_ + 1.0)};
}

double CoefficientModel::hbar_dt(double t) const {
  if (t <= 0.0) return 0.0;
  return m_ * std::pow(t, m_ - 1.0);
}

HValue CoefficientModel::h(double x_radius, double t) const {
  const HValue b = hbar(t);
  const double w = h_weight(x_radius);
  return {w * b.h, w * b.H};
}

double CoefficientModel::h_dt(double x_radius, double t) const {
  return h_weight(x_radius) * hbar_dt(t);
}

double CoefficientModel::a(double x_radius) const {
  return 1.0 - a_.k * std::exp(-a_.nu * std::abs(x_radius));
}

double CoefficientModel::a_defect(double x_radius) const {
  return a_.k * std::exp(-a_.nu * std::abs(x_radius));
}

double CoefficientModel::h_defect(double x_radius, double t) const {
  return std::exp(-h_.nu * std::abs(x_radius)) * hbar(t).h;
}

FValue CoefficientModel::reduced_f(double x_radius, double s) const {
  if (s <= 0.0) return {0.0, 0.0};
  const double u = G_inverse(s);
  const double gu = g(u).value;
  const double av = a(x_radius);
  const HValue hv = h(x_radius, u);
  const double f = av * s - av * u / gu + hv.h / gu;
  const double F = 0.5 * av * (s - u) * (s + u) + hv.H;
  return {f, F};
}

FValue CoefficientModel::reduced_fbar(double s) const {
  if (s <= 0.0) return {0.0, 0.0};
  const double u = G_inverse(s);
  const double gu = g(u).value;
  const HValue hv = hbar(u);
  return {s - u / gu + hv.h / gu, 0.5 * (s - u) * (s + u) + hv.H};
}

double CoefficientModel::limit_k(double t) const {
  const double u = G_inverse(t);
  return (t - u) * (t + u) + hbar(u).h * u;
}

std::string CoefficientModel::describe() const {
  std::ostringstream os;
  std::visit(overloaded{[&os](const SqrtPower& s) { os << "SqrtPower(q=" << s.q << ")"; },
                        [&os](const PlainPower& p) { os << "PlainPower(alpha=" << p.alpha << ")"; }},
             g_);
  os << " + ExpWeightedPower(q_h=" << h_.q_h << ", nu=" << h_.nu << ")"
     << " + ExpWell(k=" << a_.k << ", nu=" << a_.nu << ")";
  if (fault_ != Fault::none) os << " [fault injected]";
  return os.str();
}

ProblemParams make_params(const CoefficientModel& model, int dimension, double mu, double mu_tilde,
                          double p_growth, double gamma) {
  ProblemParams p;
  p.dimension = dimension;
  p.mu = mu;
  p.alpha = model.alpha();
  p.beta = model.beta();
  p.gamma = gamma;
  p.mu_tilde = mu_tilde;
  p.nu_decay = std::min(model.h_family().nu, model.a_family().nu);
  p.p_growth = p_growth;
  return p;
}

}  // namespace choq
