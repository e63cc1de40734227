#pragma once

namespace choq {

// Dimension, kernel exponent and the structural exponents of the problem.
// Derived exponents are recomputed on every call, never cached.
struct ProblemParams {
  int dimension = 6;
  double mu = 2.0;         // kernel |x-y|^{-mu}
  double alpha = 2.0;      // growth of g: g(t) ~ beta t^{alpha-1}
  double beta = 1.4142135623730951;
  double gamma = 0.0;      // next-order exponent in the expansion of g
  double mu_tilde = 2.5;   // Ambrosetti-Rabinowitz type exponent of h
  double nu_decay = 3.0;   // decay rate of the perturbations
  double p_growth = 1.8;   // subcritical growth in the (h3) remainder

  double two_star() const { return 2.0 * dimension / (dimension - 2.0); }
  double two_star_mu() const { return (2.0 * dimension - mu) / (dimension - 2.0); }
  double gamma_plus() const { return gamma > 0.0 ? gamma : 0.0; }
  double delta() const { return 1.0 - gamma_plus() / alpha; }
  // exponent applied to G^{-1}(v) inside the Choquard term
  double choquard_power() const { return alpha * two_star_mu(); }

  // throws ConfigError naming the first violated constraint
  void validate() const;
};

}  // namespace choq
