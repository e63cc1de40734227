#pragma once
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace choq {

enum class Grading { uniform, geometric };

// Radial nodes 0 < r_1 < ... < r_n = r_max for radial functions on R^N.
//   weights: trapezoid rule for \int_0^rmax f(r) r^{N-1} dr (the origin has zero weight)
//   fluxes:  sigma_k couples nodes k, k+1; chosen so that the discrete divergence
//            reproduces Delta r^2 = 2N exactly: sigma_k (r_{k+1}^2 - r_k^2) = 2N sum_{i<=k} w_i
// Fields vanish beyond r_max; the last node is treated as a Dirichlet node by consumers.
class RadialGrid {
 public:
  static std::shared_ptr<const RadialGrid> make(int N, double r_max, int n_nodes,
                                                Grading grading = Grading::geometric,
                                                double stretch = 4.0);
  static std::shared_ptr<const RadialGrid> from_nodes(int N, std::vector<double> nodes);

  int dimension() const { return N_; }
  std::size_t size() const { return r_.size(); }
  double r_max() const { return r_.back(); }
  double sphere_area() const { return area_; }  // |S^{N-1}|
  std::span<const double> nodes() const { return r_; }
  std::span<const double> weights() const { return w_; }
  std::span<const double> fluxes() const { return sigma_; }
  double node(std::size_t i) const { return r_[i]; }
  double weight(std::size_t i) const { return w_[i]; }
  double min_spacing() const;
  std::uint64_t hash() const { return hash_; }
  bool same_as(const RadialGrid& other) const;

  // \int_{R^N} f(|x|) dx
  double integrate(std::span<const double> f) const;
  double integrate(const std::function<double(double)>& f) const;
  // \int |grad v|^2 with the flux discretisation
  double dirichlet(std::span<const double> v) const;
  double dirichlet_inner(std::span<const double> u, std::span<const double> v) const;
  // (K v)_i = d/dv_i of (1/2) sum sigma_k (v_{k+1}-v_k)^2, without the |S| factor
  void stiffness_apply(std::span<const double> v, std::span<double> out) const;

 private:
  RadialGrid(int N, std::vector<double> nodes);
  int N_;
  double area_;
  std::vector<double> r_, w_, sigma_;
  std::uint64_t hash_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

class RadialField {
 public:
  RadialField(GridPtr grid, std::vector<double> values);
  static RadialField zeros(GridPtr grid);
  static RadialField from_function(GridPtr grid, const std::function<double(double)>& f);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  std::span<const double> values() const { return v_; }
  double operator[](std::size_t i) const { return v_[i]; }

  RadialField scaled(double lambda) const;
  RadialField positive_part() const;
  RadialField axpy(double a, const RadialField& x) const;  // *this + a x
  RadialField map(const std::function<double(double r, double v)>& f) const;
  bool nonnegative() const;

 private:
  GridPtr grid_;
  std::vector<double> v_;
};

struct Norms {
  double l2 = 0.0;
  double grad_l2 = 0.0;
  double h1 = 0.0;
};

Norms norms(const RadialField& u);
double lq_norm(const RadialField& u, double q);
double inner_l2(const RadialField& u, const RadialField& v);
double inner_h1(const RadialField& u, const RadialField& v);
RadialField radial_laplacian(const RadialField& u);

void write_csv(std::ostream& os, const RadialField& u);
RadialField read_csv(std::istream& is, int N);

}  // namespace choq
