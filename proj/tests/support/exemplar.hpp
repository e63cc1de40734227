#pragma once
#include <cmath>
#include <numbers>
#include <random>

#include "choqlab/axioms.hpp"
#include "choqlab/energy.hpp"
#include "choqlab/models.hpp"
#include "choqlab/riesz.hpp"

namespace choq::testing {

inline CoefficientModel exemplar_model(Fault fault = Fault::none) {
  return CoefficientModel(SqrtPower{1.0}, ExpWeightedPower{1.5, 3.0}, ExpWell{0.5, 3.0}, fault);
}

inline ProblemParams exemplar_params() { return make_params(exemplar_model(), 6, 2.0, 2.5, 1.8); }

// Verified exemplar problem on the given grid; the axiom suite is run once per process.
inline Problem exemplar_problem(const GridPtr& grid) {
  static const AxiomReport rep = axiom_suite(exemplar_model(), exemplar_params());
  Problem pb(exemplar_model(), exemplar_params(), cached_kernel(grid, 2.0));
  pb.attach_verification(rep);
  return pb;
}

// Monte-Carlo estimate of \int\int e^{-2|x|^2} e^{-2|y|^2} |x-y|^{-1} dx dy in R^3:
// x, y ~ N(0, I/4) and the Gaussian mass (pi/2)^{3/2} per factor.
struct McEstimate {
  double mean, sigma;
};
inline McEstimate gaussian_choquard_mc(long samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.5);
  double s = 0.0, s2 = 0.0;
  for (long k = 0; k < samples; ++k) {
    const double a = n(rng) - n(rng), b = n(rng) - n(rng), c = n(rng) - n(rng);
    const double f = 1.0 / std::sqrt(a * a + b * b + c * c);
    s += f, s2 += f * f;
  }
  const double mass = std::pow(std::numbers::pi / 2.0, 3.0);
  const double m = s / samples, var = s2 / samples - m * m;
  return {mass * m, mass * std::sqrt(var / samples)};
}

// Smooth positive bump with random centre, width and height.
inline std::function<double(double)> random_bump(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(0.0, 3.0), w(0.5, 2.0), h(0.2, 2.0);
  const double cc = c(rng), ww = w(rng), hh = h(rng);
  return [=](double r) { return hh * (std::exp(-((r - cc) / ww) * ((r - cc) / ww)) + std::exp(-((r + cc) / ww) * ((r + cc) / ww))); };
}

}  // namespace choq::testing
