#include <gsl/gsl_sf_hyperg.h>
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "choqlab/errors.hpp"
#include "choqlab/riesz.hpp"
#include "exemplar.hpp"

using namespace choq;
constexpr double pi = std::numbers::pi;

namespace {
double beta_fn(double a, double b) { return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b); }
double sphere(int d) { return 2.0 * std::pow(pi, (d + 1) / 2.0) / std::tgamma((d + 1) / 2.0); }  // |S^d|
}  // namespace

TEST(Angular, GslHypergeometricOracle) {
  // I(rho) = B(1/2,(N-1)/2) 2F1(mu/2, mu/2 - N/2 + 1; N/2; rho^2); GSL is trusted for rho^2 <= 1/4
  for (int N : {3, 4, 5, 6, 7})
    for (double mu : {0.5, 1.0, 1.5, 2.0, 2.5})
      for (double rho : {0.0, 0.1, 0.3, 0.5}) {
        const double ref =
            beta_fn(0.5, (N - 1) / 2.0) * gsl_sf_hyperg_2F1(mu / 2, mu / 2 - N / 2.0 + 1, N / 2.0, rho * rho);
        EXPECT_NEAR(angular_integral(N, mu, rho), ref, 1e-12 * ref) << N << ' ' << mu << ' ' << rho;
      }
}

TEST(Angular, ClosedFormsUpToTheDiagonal) {
  for (double rho : {0.2, 0.7, 0.9, 0.99, 0.999})
    for (double mu : {0.5, 1.0, 1.5}) {
      const double ref = (std::pow(1 + rho, 2 - mu) - std::pow(1 - rho, 2 - mu)) / ((2 - mu) * rho);
      EXPECT_NEAR(angular_integral(3, mu, rho), ref, 1e-12 * ref) << mu << ' ' << rho;
    }
  for (double rho : {0.2, 0.7, 0.9, 0.99, 1.0}) {
    const double ref = 3.0 * pi / 8.0 * (1.0 - rho * rho / 3.0);
    EXPECT_NEAR(angular_integral(6, 2.0, rho), ref, 1e-12 * ref) << rho;
  }
}

TEST(Kernel, OriginAndFarField) {
  for (int N : {3, 6}) {
    const double mu = 2.0 - 0.5 * (N == 3);
    const double c = sphere(N - 2) * beta_fn((N - 1) / 2.0, 0.5);
    for (double s : {0.1, 1.0, 7.0}) EXPECT_NEAR(kernel_value(N, mu, 0.0, s) * std::pow(s, mu), c, 1e-12 * c);
    const double far = sphere(N - 1) * std::pow(10.0, -mu);
    EXPECT_NEAR(kernel_value(N, mu, 10.0, 0.1) / far, 1.0, 0.01);
  }
}

TEST(Kernel, TableSymmetricFinitePositive) {
  const auto g = RadialGrid::make(6, 10.0, 200);
  const auto T = KernelTable::build(g, 2.0);
  for (std::size_t i = 0; i < T->size(); ++i)
    for (std::size_t j = 0; j < T->size(); ++j) {
      EXPECT_EQ((*T)(i, j), (*T)(j, i));
      ASSERT_TRUE(std::isfinite((*T)(i, j)) && (*T)(i, j) > 0.0) << i << ' ' << j;
    }
  EXPECT_THROW(KernelTable::build(g, 4.5), ConfigError);
}

TEST(Kernel, DiskCacheRoundTrip) {
  const auto g = RadialGrid::make(4, 5.0, 64);
  const auto T = KernelTable::build(g, 1.5);
  const auto dir = std::filesystem::temp_directory_path() / "choqlab_kernel_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "k.bin").string();
  T->save(path);
  const auto L = KernelTable::load(path, g, 1.5);
  ASSERT_NE(L, nullptr);
  for (std::size_t i = 0; i < T->size(); ++i)
    for (std::size_t j = 0; j < T->size(); ++j) EXPECT_EQ((*L)(i, j), (*T)(i, j));
  EXPECT_EQ(KernelTable::load(path, g, 1.0), nullptr);
  EXPECT_EQ(KernelTable::load(path, RadialGrid::make(4, 5.0, 65), 1.5), nullptr);
  std::filesystem::remove_all(dir);
}

TEST(Convolution, RieszIdentityForTheBubbleProfile) {
  const int N = 6;
  const double mu = 2.0, p = (2.0 * N - mu) / (N - 2.0);
  const auto g = RadialGrid::make(N, 200.0, 2048);
  const auto T = cached_kernel(g, mu);
  const auto u = RadialField::from_function(g, [&](double r) { return std::pow(1 + r * r, -(N - 2) / 2.0); });
  const auto phi = riesz_convolve(*T, u, p);
  const double c = std::pow(pi, N / 2.0) * std::tgamma((N - mu) / 2.0) / std::tgamma(N - mu / 2.0);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = g->node(i);
    if (r > 5.0) break;
    const double ref = c * std::pow(1 + r * r, -mu / 2.0);
    EXPECT_NEAR(phi[i] / ref, 1.0, 1e-5) << r;
  }
}

TEST(Convolution, HomogeneityAndZero) {
  const auto g = RadialGrid::make(3, 8.0, 300);
  const auto T = cached_kernel(g, 1.0);
  const auto u = RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
  const double p = 2.0, lam = 1.7;
  const auto a = riesz_convolve(*T, u, p), b = riesz_convolve(*T, u.scaled(lam), p);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_NEAR(b[i], std::pow(lam, p) * a[i], 1e-13 * b[i]);
  const auto z = riesz_convolve(*T, RadialField::zeros(g), p);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_EQ(z[i], 0.0);
  EXPECT_EQ(double_integral(*T, RadialField::zeros(g), p), 0.0);
  EXPECT_NEAR(double_integral(*T, u.scaled(lam), p), std::pow(lam, 2 * p) * double_integral(*T, u, p),
              1e-12 * double_integral(*T, u.scaled(lam), p));
}

TEST(Convolution, GaussianAgainstClosedFormAndMonteCarlo) {
  const auto g = RadialGrid::make(3, 8.0, 2048);
  const auto T = cached_kernel(g, 1.0);
  const auto u = RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
  const double D = double_integral(*T, u, 2.0);
  const double exact = std::pow(pi / 2.0, 3.0) * 2.0 / std::sqrt(pi);
  EXPECT_NEAR(D / exact, 1.0, 1e-5);
  const auto mc = choq::testing::gaussian_choquard_mc(1'000'000, 11);
  EXPECT_LT(std::abs(D - mc.mean), 3.0 * mc.sigma);
  EXPECT_LT(std::abs(D - mc.mean) / mc.mean, 0.005);
  // Phi(0) = \int e^{-2|y|^2}/|y| dy = 4 pi \int r e^{-2r^2} dr = pi
  const auto phi = riesz_convolve(*T, u, 2.0);
  EXPECT_NEAR(phi[0] / pi, 1.0, 1e-5);
}

TEST(Translation, PairIntegralIdentities) {
  const auto g = RadialGrid::make(3, 20.0, 1024);
  const auto w = RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
  const double direct = g->integrate(w.values());
  const double r0 = pair_integral(w, [](double) { return 1.0; }, [](double v) { return v; }, 0.0);
  EXPECT_NEAR(r0, direct, 1e-8 * direct);
  const auto sq = [&](double R) { return pair_integral(w, [](double) { return 1.0; }, [](double v) { return v * v; }, R); };
  const double t0 = sq(0.5);
  EXPECT_NEAR(t0 / std::pow(pi / 2.0, 1.5), 1.0, 1e-5);
  for (double R : {2.0, 5.0}) EXPECT_NEAR(sq(R) / t0, 1.0, 1e-6) << R;
}

TEST(Translation, InterpolantIsEvenAndVanishesOutside) {
  const auto g = RadialGrid::make(3, 6.0, 400);
  const auto w = RadialField::from_function(g, [](double r) { return std::exp(-r * r) - std::exp(-36.0); });
  const FieldInterpolant f(w);
  for (double r : {0.0, 0.013, 0.5, 1.7, 3.3}) EXPECT_NEAR(f(r), std::exp(-r * r) - std::exp(-36.0), 1e-8) << r;
  EXPECT_EQ(f(7.0), 0.0);
}
