#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "choqlab/errors.hpp"
#include "choqlab/grid.hpp"

using namespace choq;
constexpr double pi = std::numbers::pi;

TEST(Grid, Structure) {
  for (auto gr : {Grading::uniform, Grading::geometric}) {
    const auto g = RadialGrid::make(5, 12.0, 300, gr);
    EXPECT_EQ(g->size(), 300u);
    EXPECT_DOUBLE_EQ(g->r_max(), 12.0);
    for (std::size_t i = 1; i < g->size(); ++i) {
      EXPECT_GT(g->node(i), g->node(i - 1));
      EXPECT_GT(g->weight(i), 0.0);
    }
  }
  EXPECT_THROW(RadialGrid::make(3, -1.0, 100), ConfigError);
  EXPECT_THROW(RadialGrid::make(3, 1.0, 2), ConfigError);
}

TEST(Grid, UnitBallVolume) {
  // trapezoid error on r^{N-1} is (N-1) h^2 / 12, so 2^14 uniform nodes reach 1e-8
  for (int N : {3, 4, 6}) {
    const auto g = RadialGrid::make(N, 1.0, 16384, Grading::uniform);
    const double vol = std::pow(pi, N / 2.0) / std::tgamma(N / 2.0 + 1.0);
    EXPECT_NEAR(g->integrate([](double) { return 1.0; }) / vol, 1.0, 1e-8) << N;
  }
  const auto g3 = RadialGrid::make(3, 1.0, 2048, Grading::uniform);
  EXPECT_NEAR(g3->integrate([](double) { return 1.0; }), 4.0 * pi / 3.0, 1e-6 * 4.0 * pi / 3.0);
}

TEST(Grid, GaussianIntegral) {
  // r^2 e^{-r^2} is even and smooth: the uniform trapezoid rule converges spectrally
  const auto g = RadialGrid::make(3, 12.0, 1024, Grading::uniform);
  EXPECT_NEAR(g->integrate([](double r) { return std::exp(-r * r); }), std::pow(pi, 1.5), 1e-8);
  EXPECT_EQ(g->integrate([](double) { return 0.0; }), 0.0);
}

TEST(Grid, NormsOfGaussian) {
  const auto g = RadialGrid::make(3, 14.0, 4096, Grading::uniform);
  const auto u = RadialField::from_function(g, [](double r) { return std::exp(-r * r / 2.0); });
  // \int |grad u|^2 = \int r^2 e^{-r^2} = (3/2) pi^{3/2};  \int u^2 = pi^{3/2}
  const Norms n = norms(u);
  EXPECT_NEAR(n.grad_l2 * n.grad_l2 / (1.5 * std::pow(pi, 1.5)), 1.0, 1e-5);
  EXPECT_NEAR(n.l2 * n.l2 / std::pow(pi, 1.5), 1.0, 1e-7);
  const Norms z = norms(RadialField::zeros(g));
  EXPECT_EQ(z.l2, 0.0);
  EXPECT_EQ(z.grad_l2, 0.0);
  EXPECT_EQ(z.h1, 0.0);
  for (double lam : {-2.0, 0.5, 3.0}) {
    const Norms s = norms(u.scaled(lam));
    EXPECT_NEAR(s.l2, std::abs(lam) * n.l2, 1e-13 * s.l2);
    EXPECT_NEAR(s.grad_l2, std::abs(lam) * n.grad_l2, 1e-13 * s.grad_l2);
    EXPECT_NEAR(s.h1, std::abs(lam) * n.h1, 1e-13 * s.h1);
    EXPECT_NEAR(lq_norm(u.scaled(lam), 3.0), std::abs(lam) * lq_norm(u, 3.0), 1e-13);
  }
}

TEST(Grid, LaplacianPolynomialAndConstant) {
  for (int N : {3, 6}) {
    const auto g = RadialGrid::make(N, 3.0, 400);
    const auto L = radial_laplacian(RadialField::from_function(g, [](double r) { return r * r; }));
    for (std::size_t i = 0; i + 1 < g->size(); ++i) EXPECT_NEAR(L[i], 2.0 * N, 1e-6) << i;
    const auto C = radial_laplacian(RadialField::from_function(g, [](double) { return 4.0; }));
    for (std::size_t i = 0; i + 1 < g->size(); ++i) EXPECT_NEAR(C[i], 0.0, 1e-9);
  }
}

TEST(Grid, LaplacianExponential) {
  const int N = 3;
  const auto g = RadialGrid::make(N, 10.0, 8192, Grading::uniform);
  const auto L = radial_laplacian(RadialField::from_function(g, [](double r) { return std::exp(-r); }));
  for (std::size_t i = 0; i + 1 < g->size(); ++i) {
    const double r = g->node(i);
    if (r < 0.5) continue;
    EXPECT_NEAR(L[i], (1.0 - (N - 1.0) / r) * std::exp(-r), 1e-5) << r;
  }
}

TEST(Grid, SummationByParts) {
  const auto g = RadialGrid::make(6, 8.0, 500);
  const auto u = RadialField::from_function(g, [](double r) { return std::exp(-r) * std::cos(r); });
  auto v = RadialField::from_function(g, [](double r) { return 1.0 / (1.0 + r * r); });
  std::vector<double> vv(v.values().begin(), v.values().end());
  vv.back() = 0.0;
  v = RadialField(g, vv);
  const auto L = radial_laplacian(u);
  double lhs = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) lhs += g->weight(i) * L[i] * v[i];
  lhs *= g->sphere_area();
  EXPECT_NEAR(lhs, -g->dirichlet_inner(u.values(), v.values()), 1e-12 * std::abs(lhs));
}

TEST(Grid, CsvRoundTrip) {
  const auto g = RadialGrid::make(6, 5.0, 64);
  const auto u = RadialField::from_function(g, [](double r) { return std::exp(-r) / 3.0; });
  std::stringstream ss;
  write_csv(ss, u);
  const auto back = read_csv(ss, 6);
  EXPECT_TRUE(back.grid().same_as(*g));
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(back[i], u[i]);
  std::stringstream bad("r,v\n1,2\n");
  EXPECT_THROW(read_csv(bad, 6), ConfigError);
}
