#include "choqlab/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "choqlab/errors.hpp"

namespace choq {

namespace {

double sphere_area_of(int N) { return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N); }

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t word) {
  for (int b = 0; b < 8; ++b) {
    h ^= (word >> (8 * b)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

void check_same(const RadialField& a, const RadialField& b) {
  if (&a.grid() != &b.grid() && !a.grid().same_as(b.grid()))
    throw ConfigError("fields live on different grids");
}

}  // namespace

GridPtr RadialGrid::make(int N, double r_max, int n, Grading grading, double stretch) {
  if (N < 3) throw ConfigError("grid: dimension must be >= 3");
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw ConfigError("grid: r_max must be positive");
  if (n < 16) throw ConfigError("grid: need at least 16 nodes");
  std::vector<double> r(n);
  const bool geo = grading == Grading::geometric && stretch > 1e-8;
  const double denom = geo ? std::expm1(stretch) : 1.0;
  for (int i = 1; i <= n; ++i) {
    const double x = static_cast<double>(i) / n;
    r[i - 1] = geo ? r_max * std::expm1(stretch * x) / denom : r_max * x;
  }
  r.back() = r_max;
  return GridPtr(new RadialGrid(N, std::move(r)));
}

GridPtr RadialGrid::from_nodes(int N, std::vector<double> nodes) {
  if (N < 3) throw ConfigError("grid: dimension must be >= 3");
  if (nodes.size() < 16) throw ConfigError("grid: need at least 16 nodes");
  if (!(nodes.front() > 0.0)) throw ConfigError("grid: nodes must be positive");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1]) || !std::isfinite(nodes[i]))
      throw ConfigError("grid: nodes must be strictly increasing and finite");
  return GridPtr(new RadialGrid(N, std::move(nodes)));
}

RadialGrid::RadialGrid(int N, std::vector<double> nodes)
    : N_(N), area_(sphere_area_of(N)), r_(std::move(nodes)) {
  const std::size_t n = r_.size();
  w_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? 0.0 : r_[i - 1];
    const double right = i + 1 < n ? r_[i + 1] : r_[i];
    w_[i] = 0.5 * (right - left) * std::pow(r_[i], N - 1);
  }
  sigma_.resize(n - 1);
  double vol = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    vol += w_[k];
    sigma_[k] = 2.0 * N * vol / ((r_[k + 1] - r_[k]) * (r_[k + 1] + r_[k]));
  }
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a(h, static_cast<std::uint64_t>(N));
  for (double x : r_) h = fnv1a(h, std::bit_cast<std::uint64_t>(x));
  hash_ = h;
}

double RadialGrid::min_spacing() const {
  double m = r_[0];
  for (std::size_t i = 1; i < r_.size(); ++i) m = std::min(m, r_[i] - r_[i - 1]);
  return m;
}

bool RadialGrid::same_as(const RadialGrid& o) const {
  return this == &o || (N_ == o.N_ && hash_ == o.hash_ && r_ == o.r_);
}

double RadialGrid::integrate(std::span<const double> f) const {
  if (f.size() != r_.size()) throw ConfigError("integrate: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w_[i] * f[i];
  return area_ * s;
}

double RadialGrid::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < r_.size(); ++i) s += w_[i] * f(r_[i]);
  return area_ * s;
}

double RadialGrid::dirichlet(std::span<const double> v) const { return dirichlet_inner(v, v); }

double RadialGrid::dirichlet_inner(std::span<const double> u, std::span<const double> v) const {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < r_.size(); ++k)
    s += sigma_[k] * (u[k + 1] - u[k]) * (v[k + 1] - v[k]);
  return area_ * s;
}

void RadialGrid::stiffness_apply(std::span<const double> v, std::span<double> out) const {
  const std::size_t n = r_.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double flux = sigma_[k] * (v[k + 1] - v[k]);
    out[k] -= flux;
    out[k + 1] += flux;
  }
}

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
  if (!grid_) throw ConfigError("field: null grid");
  if (v_.size() != grid_->size()) throw ConfigError("field: length does not match grid");
  for (double x : v_)
    if (!std::isfinite(x)) throw ConfigError("field: non-finite value");
}

RadialField RadialField::zeros(GridPtr grid) {
  const auto n = grid->size();
  return RadialField(std::move(grid), std::vector<double>(n, 0.0));
}

RadialField RadialField::from_function(GridPtr grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
  return RadialField(std::move(grid), std::move(v));
}

RadialField RadialField::scaled(double lambda) const {
  std::vector<double> v(v_);
  for (double& x : v) x *= lambda;
  return RadialField(grid_, std::move(v));
}

RadialField RadialField::positive_part() const {
  std::vector<double> v(v_);
  for (double& x : v) x = std::max(x, 0.0);
  return RadialField(grid_, std::move(v));
}

RadialField RadialField::axpy(double a, const RadialField& x) const {
  check_same(*this, x);
  std::vector<double> v(v_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += a * x.v_[i];
  return RadialField(grid_, std::move(v));
}

RadialField RadialField::map(const std::function<double(double, double)>& f) const {
  std::vector<double> v(v_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid_->node(i), v_[i]);
  return RadialField(grid_, std::move(v));
}

bool RadialField::nonnegative() const {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return x >= 0.0; });
}

double inner_l2(const RadialField& u, const RadialField& v) {
  check_same(u, v);
  const auto& g = u.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += g.weight(i) * u[i] * v[i];
  return g.sphere_area() * s;
}

double inner_h1(const RadialField& u, const RadialField& v) {
  return inner_l2(u, v) + u.grid().dirichlet_inner(u.values(), v.values());
}

Norms norms(const RadialField& u) {
  Norms n;
  const double l2sq = inner_l2(u, u);
  const double gsq = u.grid().dirichlet(u.values());
  n.l2 = std::sqrt(l2sq);
  n.grad_l2 = std::sqrt(gsq);
  n.h1 = std::sqrt(l2sq + gsq);
  return n;
}

double lq_norm(const RadialField& u, double q) {
  if (!(q >= 1.0)) throw ConfigError("lq_norm: q must be >= 1");
  const auto& g = u.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += g.weight(i) * std::pow(std::abs(u[i]), q);
  return std::pow(g.sphere_area() * s, 1.0 / q);
}

RadialField radial_laplacian(const RadialField& u) {
  const auto& g = u.grid();
  std::vector<double> out(u.size());
  g.stiffness_apply(u.values(), out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -out[i] / g.weight(i);
  return RadialField(u.grid_ptr(), std::move(out));
}

void write_csv(std::ostream& os, const RadialField& u) {
  os << "radius,value\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < u.size(); ++i) line << u.grid().node(i) << ',' << u[i] << '\n';
  os << line.str();
}

RadialField read_csv(std::istream& is, int N) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("radius,value", 0) != 0)
    throw ConfigError("csv: expected header 'radius,value'");
  std::vector<double> r, v;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("csv: malformed line '" + line + "'");
    try {
      r.push_back(std::stod(line.substr(0, comma)));
      v.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError("csv: malformed number in '" + line + "'");
    }
  }
  return RadialField(RadialGrid::from_nodes(N, std::move(r)), std::move(v));
}

}  // namespace choq
