#pragma once
#include <string>
#include <variant>

#include "choqlab/params.hpp"

namespace choq {

// g(t) = sqrt(1 + ((q+1)^2/2) t^{2q});  alpha = q+1, beta = (q+1)/sqrt2
struct SqrtPower {
  double q = 1.0;
};
// g(t) = (1+t^2)^{(alpha-1)/2};  beta = 1
struct PlainPower {
  double alpha = 2.0;
};
using GFamily = std::variant<SqrtPower, PlainPower>;

// h(x,t) = (1 - e^{-nu|x|}) t^{alpha q_h + alpha - 1} for t > 0, zero otherwise
struct ExpWeightedPower {
  double q_h = 1.5;
  double nu = 3.0;
};

// a(x) = 1 - k e^{-nu|x|}
struct ExpWell {
  double k = 0.5;
  double nu = 3.0;
};

// Deliberately broken variants, only for exercising the axiom checks.
enum class Fault { none, negate_g_derivative };

struct GValue {
  double value;
  double derivative;
};
struct HValue {
  double h;
  double H;  // antiderivative in t, H(x,0) = 0
};
struct FValue {
  double f;
  double F;
};

class CoefficientModel {
 public:
  CoefficientModel(GFamily g, ExpWeightedPower h, ExpWell a, Fault fault = Fault::none);

  const GFamily& g_family() const { return g_; }
  const ExpWeightedPower& h_family() const { return h_; }
  const ExpWell& a_family() const { return a_; }
  Fault fault() const { return fault_; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double h_exponent() const { return m_; }  // alpha q_h + alpha - 1

  GValue g(double t) const;
  double G(double t) const;
  double G_inverse(double s) const;

  HValue h(double x_radius, double t) const;
  double h_dt(double x_radius, double t) const;
  HValue hbar(double t) const;
  double hbar_dt(double t) const;
  double h_weight(double x_radius) const;  // 1 - e^{-nu|x|}

  double a(double x_radius) const;
  // 1 - a(x) and hbar(t) - h(x,t), computed without cancellation
  double a_defect(double x_radius) const;
  double h_defect(double x_radius, double t) const;

  // f(x,s) = a s - a u/g(u) + h(x,u)/g(u),  u = G^{-1}(s); zero for s <= 0
  FValue reduced_f(double x_radius, double s) const;
  FValue reduced_fbar(double s) const;

  // k(t) = t^2 - G^{-1}(t)^2 + hbar(G^{-1}(t)) G^{-1}(t)
  double limit_k(double t) const;

  std::string describe() const;

 private:
  double G_quadrature(double t) const;

  GFamily g_;
  ExpWeightedPower h_;
  ExpWell a_;
  Fault fault_;
  double alpha_ = 2.0;
  double beta_ = 1.0;
  double m_ = 0.0;
  int closed_form_ = 0;  // which closed-form antiderivative applies, 0 = none
};

// Parameters implied by the model plus the free exponents.
ProblemParams make_params(const CoefficientModel& model, int dimension, double mu, double mu_tilde,
                          double p_growth, double gamma = 0.0);

}  // namespace choq
