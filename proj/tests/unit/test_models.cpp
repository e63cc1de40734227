#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "choqlab/axioms.hpp"
#include "choqlab/errors.hpp"
#include "choqlab/models.hpp"
#include "exemplar.hpp"

using namespace choq;
using choq::testing::exemplar_model;
using choq::testing::exemplar_params;

TEST(Params, DerivedExponents) {
  const ProblemParams p = exemplar_params();
  EXPECT_DOUBLE_EQ(p.two_star(), 3.0);
  EXPECT_DOUBLE_EQ(p.two_star_mu(), 2.5);
  EXPECT_DOUBLE_EQ(p.delta(), 1.0);
  EXPECT_DOUBLE_EQ(p.alpha, 2.0);
  EXPECT_NEAR(p.beta, std::sqrt(2.0), 1e-15);
  EXPECT_NO_THROW(p.validate());
}

TEST(Params, RejectsOutOfRange) {
  ProblemParams p = exemplar_params();
  p.mu = 4.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = exemplar_params();
  p.mu_tilde = p.two_star() + 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = exemplar_params();
  p.gamma = 2.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = exemplar_params();
  p.p_growth = 2.5;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Models, GValues) {
  const auto m = exemplar_model();
  EXPECT_DOUBLE_EQ(m.g(0.0).value, 1.0);
  EXPECT_NEAR(m.g(1.0).value, std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(m.g(-1.0).value, std::sqrt(3.0), 1e-15);
  EXPECT_DOUBLE_EQ(m.G(0.0), 0.0);
}

TEST(Models, GClosedFormAgainstQuadrature) {
  const auto m = exemplar_model();
  const double t = 2.0;
  const double closed = t * std::sqrt(1 + 2 * t * t) / 2 + std::asinh(std::sqrt(2.0) * t) / (2 * std::sqrt(2.0));
  EXPECT_NEAR(m.G(t), closed, 1e-12);
  // q slightly off 1 forces the quadrature path; G is continuous in q
  const CoefficientModel near(SqrtPower{1.0 + 1e-9}, ExpWeightedPower{1.5, 3.0}, ExpWell{0.5, 3.0});
  EXPECT_NEAR(near.G(t), closed, 1e-7);
}

TEST(Models, InverseAndLowerBound) {
  const auto m = exemplar_model();
  EXPECT_DOUBLE_EQ(m.G_inverse(0.0), 0.0);
  EXPECT_NEAR(m.G_inverse(m.G(2.0)), 2.0, 1e-10);
  for (double s = 0.01; s < 100.0; s *= 1.3) EXPECT_LE(m.G_inverse(s), s * (1 + 1e-14));
  for (double t = 0.01; t < 100.0; t *= 1.3) EXPECT_GE(m.G(t), m.beta() / m.alpha() * t * t * (1 - 1e-14));
}

TEST(Models, InverseOddnessRandom) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (auto m : {exemplar_model(), CoefficientModel(PlainPower{2.0}, {1.5, 3.0}, {0.5, 3.0}),
                 CoefficientModel(SqrtPower{1.5}, {1.5, 3.0}, {0.5, 3.0})}) {
    for (int k = 0; k < 1000; ++k) {
      const double t = u(rng);
      EXPECT_LE(std::abs(m.G_inverse(m.G(t)) - t), 1e-10 * (1 + std::abs(t)));
      EXPECT_LE(std::abs(m.G(-t) + m.G(t)), 1e-12 * (1 + std::abs(m.G(t))));
      EXPECT_LE(std::abs(m.G_inverse(-t) + m.G_inverse(t)), 1e-12 * (1 + std::abs(t)));
      EXPECT_EQ(m.g(-t).value, m.g(t).value);
    }
  }
}

TEST(Models, HFamily) {
  const auto m = exemplar_model();
  EXPECT_EQ(m.h(2.0, -1.0).h, 0.0);
  EXPECT_EQ(m.h(0.0, 3.0).h, 0.0);
  const double t = 1.7, ex = m.h_exponent();
  EXPECT_NEAR(m.h(1e3, t).h, std::pow(t, ex), 1e-9);
  EXPECT_EQ(m.hbar(0.0).h, 0.0);
  EXPECT_EQ(m.hbar(0.0).H, 0.0);
  for (double s = 0.05; s < 20.0; s *= 1.5) EXPECT_GE(m.hbar(s).h * s, m.alpha() * 2.5 * m.hbar(s).H * (1 - 1e-14));
}

TEST(Models, AFamily) {
  const auto m = exemplar_model();
  EXPECT_DOUBLE_EQ(m.a(0.0), 0.5);
  EXPECT_NEAR(m.a(1e3), 1.0, 1e-12);
  for (double x : {0.0, 0.3, 1.0, 4.0}) EXPECT_NEAR(m.a_defect(x), 0.5 * std::exp(-3.0 * x), 1e-16);
}

TEST(Models, ReducedF) {
  const auto m = exemplar_model();
  EXPECT_EQ(m.reduced_f(1.0, 0.0).f, 0.0);
  EXPECT_EQ(m.reduced_f(1.0, 0.0).F, 0.0);
  for (double x = 0.0; x <= 10.0; x += 0.5)
    for (double s = 0.0; s <= 10.0; s += 0.25) {
      const FValue f = m.reduced_f(x, s);
      EXPECT_GE(f.f, -1e-12);
      EXPECT_GE(f.f * s - 2.0 * f.F, -1e-9 * (1 + std::abs(f.f * s)));
    }
}

TEST(Models, LimitK) {
  const auto m = exemplar_model();
  EXPECT_EQ(m.limit_k(0.0), 0.0);
  EXPECT_LT(m.limit_k(1e-4) / 1e-8, 1e-3);
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {1e2, 1e3, 1e4}) {
    const double r = m.limit_k(t) / std::pow(t, 3.0);
    EXPECT_LT(r, prev);
    prev = r;
  }
  // G^{-1}(t) ~ (sqrt2 t)^{1/2} and hbar(u) u = u^5, so k(t)/t^3 ~ 2^{5/4} t^{-1/2}: 0.0238 at t = 1e4
  EXPECT_NEAR(prev / (std::pow(2.0, 1.25) * 1e-2), 1.0, 0.05);
}

TEST(Axioms, ExemplarPassesEveryClause) {
  const SampleSpec spec;
  const AxiomReport rep = axiom_suite(exemplar_model(), exemplar_params(), spec);
  for (const auto& c : rep.clauses) {
    EXPECT_TRUE(c.pass) << c.name << " worst margin " << c.worst_margin;
    EXPECT_GE(c.samples, 1000) << c.name;
  }
}

TEST(Axioms, InjectedFaultIsCaught) {
  const AxiomReport rep = axiom_suite(exemplar_model(Fault::negate_g_derivative), exemplar_params());
  ASSERT_NE(rep.find("g0"), nullptr);
  EXPECT_FALSE(rep.find("g0")->pass);
  EXPECT_FALSE(rep.all_pass());
}

TEST(Axioms, H2BoundViolation) {
  ProblemParams p = exemplar_params();
  p.mu_tilde = 1.5 + 1.1;
  const AxiomReport rep = axiom_suite(exemplar_model(), p);
  ASSERT_NE(rep.find("h2"), nullptr);
  EXPECT_FALSE(rep.find("h2")->pass);
}

TEST(Axioms, JsonShape) {
  const auto j = to_json(axiom_suite(exemplar_model(), exemplar_params()));
  ASSERT_TRUE(j.contains("clauses"));
  for (const auto& c : j["clauses"]) {
    EXPECT_TRUE(c.contains("name"));
    EXPECT_TRUE(c.contains("pass"));
    EXPECT_TRUE(c.contains("worst_margin"));
    EXPECT_TRUE(c.contains("worst_point"));
  }
}
