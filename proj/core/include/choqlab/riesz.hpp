#pragma once
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "choqlab/grid.hpp"

namespace choq {

// I(rho) = \int_0^pi (1 + rho^2 - 2 rho cos t)^{-mu/2} sin^{N-2} t dt,  0 <= rho <= 1
double angular_integral(int N, double mu, double rho);

// W(r,s) = |S^{N-2}| \int_0^pi (r^2 + s^2 - 2rs cos t)^{-mu/2} sin^{N-2} t dt
//        = |S^{N-2}| max(r,s)^{-mu} I(min/max)
double kernel_value(int N, double mu, double r, double s);

// Dense symmetric table of W(r_i, r_j) on a grid. When mu >= N-1 the diagonal is
// not integrable pointwise and is replaced by its average over the trapezoid cell.
class KernelTable {
 public:
  static std::shared_ptr<const KernelTable> build(GridPtr grid, double mu, int threads = 1);
  // nullptr when the file is missing or keyed to a different (N, mu, grid)
  static std::shared_ptr<const KernelTable> load(const std::string& path, GridPtr grid, double mu);
  void save(const std::string& path) const;

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  double mu() const { return mu_; }
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {w_.data() + i * n_, n_}; }
  bool matches(const RadialGrid& g, double mu) const;

  // out_i = sum_j W_ij q_j
  void apply(std::span<const double> q, std::span<double> out) const;

 private:
  KernelTable(GridPtr grid, double mu) : grid_(std::move(grid)), mu_(mu), n_(grid_->size()) {}
  GridPtr grid_;
  double mu_;
  std::size_t n_;
  std::vector<double> w_;
};

using TablePtr = std::shared_ptr<const KernelTable>;

// Process-wide cache keyed by (grid hash, mu); optionally backed by a directory on disk.
TablePtr cached_kernel(GridPtr grid, double mu, int threads = 1, const std::string& cache_dir = "");

// Phi(r_i) = \int W(r_i, s) |u(s)|^p s^{N-1} ds
RadialField riesz_convolve(const KernelTable& table, const RadialField& u, double p);
// D_p(u) = \int\int |u(x)|^p |u(y)|^p |x-y|^{-mu} dx dy
double double_integral(const KernelTable& table, const RadialField& u, double p);

// Piecewise sixth-order Lagrange interpolation of a radial field: even across the
// origin, zero beyond r_max.
class FieldInterpolant {
 public:
  explicit FieldInterpolant(const RadialField& u);
  double operator()(double r) const;

 private:
  std::vector<double> r_, v_;
};

// \int_{R^N} F(|x|, g(|x - R e|)) dx for a radial field g and a unit vector e.
// r_limit restricts the outer radius (|x| <= r_limit).
double translated_integral(const RadialField& g, double R,
                           const std::function<double(double r, double gval)>& F,
                           double r_limit = std::numeric_limits<double>::infinity(),
                           double tol = 1e-9);

// \int f(|x|) psi(g(|x - R e|)) dx
double pair_integral(const RadialField& g, const std::function<double(double)>& f,
                     const std::function<double(double)>& psi, double R);

}  // namespace choq
