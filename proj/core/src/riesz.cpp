#include "choqlab/riesz.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "choqlab/errors.hpp"

namespace choq {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

double ipow(double x, int k) {
  double r = 1.0;
  for (; k > 0; --k) r *= x;
  return r;
}

double sphere_area(int d) { return 2.0 * std::pow(M_PI, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1)); }

// |S^{N-2}|, the measure of the equatorial sphere
double equator_area(int N) { return sphere_area(N - 2); }

struct Angular {
  int N;
  double mu;

  double powm(double z) const {
    if (mu == 2.0) return 1.0 / z;
    if (mu == 1.0) return 1.0 / std::sqrt(z);
    return std::pow(z, -0.5 * mu);
  }
  // (2 - x^2)^{(N-3)/2}
  double jac(double z) const {
    return (N % 2 == 1) ? ipow(z, (N - 3) / 2) : ipow(z, (N - 4) / 2) * std::sqrt(z);
  }

  double at_one() const {
    if (mu >= N - 1.0) return std::numeric_limits<double>::infinity();
    return std::pow(2.0, N - 2.0 - mu) * std::beta(0.5 * (N - 1.0 - mu), 0.5 * (N - 1.0));
  }

  // rho in (0,1), gap = 1 - rho supplied separately to avoid cancellation
  double value(double rho, double gap) const {
    if (rho <= 0.0) return std::sqrt(M_PI) * std::tgamma(0.5 * (N - 1.0)) / std::tgamma(0.5 * N);
    if (gap <= 0.0) return at_one();
    const double a = gap * gap, b = 2.0 * rho, c = (1.0 + rho) * (1.0 + rho);
    // near side, u = cos t = 1 - x^2: peak of width x0 at x = 0
    auto near = [&](double x) {
      const double x2 = x * x;
      return 2.0 * powm(a + b * x2) * ipow(x, N - 2) * jac(2.0 - x2);
    };
    // far side, u = y^2 - 1: smooth
    auto far = [&](double y) {
      const double y2 = y * y;
      return 2.0 * powm(c - b * y2) * ipow(y, N - 2) * jac(2.0 - y2);
    };
    double s = gauss<double, 20>::integrate(far, 0.0, 1.0);
    const double x0 = gap / std::sqrt(b);
    if (x0 >= 1.0) return s + gauss<double, 20>::integrate(near, 0.0, 1.0);
    s += gauss<double, 20>::integrate(near, 0.0, x0);
    for (double lo = x0; lo < 1.0; lo *= 6.0) s += gauss<double, 20>::integrate(near, lo, std::min(1.0, 6.0 * lo));
    return s;
  }
};

}  // namespace

double angular_integral(int N, double mu, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("angular_integral: rho must lie in [0,1]");
  return Angular{N, mu}.value(rho, 1.0 - rho);
}

double kernel_value(int N, double mu, double r, double s) {
  const double big = std::max(r, s), small = std::min(r, s);
  if (big <= 0.0) return std::numeric_limits<double>::infinity();
  return equator_area(N) * std::pow(big, -mu) * Angular{N, mu}.value(small / big, (big - small) / big);
}

bool KernelTable::matches(const RadialGrid& g, double mu) const {
  return mu == mu_ && grid_->same_as(g);
}

TablePtr KernelTable::build(GridPtr grid, double mu, int threads) {
  const int N = grid->dimension();
  if (!(mu > 0.0 && mu < std::min<double>(N, 4.0))) throw ConfigError("kernel: mu must lie in (0, min{N,4})");
  std::shared_ptr<KernelTable> t(new KernelTable(grid, mu));
  const std::size_t n = t->n_;
  t->w_.assign(n * n, 0.0);
  const Angular ang{N, mu};
  const double cS = equator_area(N);
  const auto r = grid->nodes();
  const bool singular = mu >= N - 1.0;

  auto diag = [&](std::size_t i) {
    if (!singular) return cS * std::pow(r[i], -mu) * ang.at_one();
    // trapezoid-cell average of the integrable singularity |r - s|^{N-1-mu}
    const double ri = r[i];
    const double lo = i == 0 ? 0.0 : 0.5 * (r[i - 1] + ri);
    const double hi = i + 1 < n ? 0.5 * (ri + r[i + 1]) : ri;
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double s, double gap) {
      const double big = std::max(ri, s), small = std::min(ri, s);
      return cS * std::pow(big, -mu) * ang.value(small / big, std::abs(gap) / big) * std::pow(s, N - 1);
    };
    double acc = 0.0;
    acc += ts.integrate([&](double s, double sc) { return f(s, s < ri ? ri - s : sc); }, lo, ri);
    if (hi > ri) acc += ts.integrate([&](double s, double sc) { return f(s, s > ri ? s - ri : sc); }, ri, hi);
    return acc / grid->weight(i);
  };

  auto work = [&](int tid, int nthreads) {
    for (std::size_t i = tid; i < n; i += nthreads) {
      double* row = t->w_.data() + i * n;
      row[i] = diag(i);
      const double ri = r[i];
      for (std::size_t j = 0; j < i; ++j) {
        const double rj = r[j];  // rj < ri
        row[j] = cS * std::pow(ri, -mu) * ang.value(rj / ri, (ri - rj) / ri);
      }
    }
  };
  const int T = std::max(1, threads);
  if (T == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < T; ++k) pool.emplace_back(work, k, T);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) t->w_[i * n + j] = t->w_[j * n + i];
  return t;
}

namespace {
constexpr char kMagic[8] = {'C', 'H', 'Q', 'K', 'E', 'R', 'N', '1'};
}

void KernelTable::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write kernel cache " + path);
  const std::int32_t N = grid_->dimension();
  const std::uint64_t n = n_, h = grid_->hash();
  os.write(kMagic, sizeof kMagic);
  os.write(reinterpret_cast<const char*>(&N), sizeof N);
  os.write(reinterpret_cast<const char*>(&mu_), sizeof mu_);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&h), sizeof h);
  os.write(reinterpret_cast<const char*>(w_.data()), static_cast<std::streamsize>(w_.size() * sizeof(double)));
}

TablePtr KernelTable::load(const std::string& path, GridPtr grid, double mu) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return nullptr;
  char magic[8];
  std::int32_t N = 0;
  double m = 0.0;
  std::uint64_t n = 0, h = 0;
  is.read(magic, sizeof magic);
  is.read(reinterpret_cast<char*>(&N), sizeof N);
  is.read(reinterpret_cast<char*>(&m), sizeof m);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!is || !std::equal(magic, magic + 8, kMagic) || N != grid->dimension() || m != mu ||
      n != grid->size() || h != grid->hash())
    return nullptr;
  std::shared_ptr<KernelTable> t(new KernelTable(grid, mu));
  t->w_.resize(n * n);
  is.read(reinterpret_cast<char*>(t->w_.data()), static_cast<std::streamsize>(n * n * sizeof(double)));
  if (!is) return nullptr;
  return t;
}

TablePtr cached_kernel(GridPtr grid, double mu, int threads, const std::string& cache_dir) {
  static std::mutex mtx;
  static std::map<std::pair<std::uint64_t, double>, std::weak_ptr<const KernelTable>> memo;
  const auto key = std::make_pair(grid->hash(), mu);
  {
    std::lock_guard lock(mtx);
    if (auto it = memo.find(key); it != memo.end())
      if (auto t = it->second.lock(); t && t->matches(*grid, mu)) return t;
  }
  std::string path;
  if (!cache_dir.empty()) {
    char name[96];
    std::snprintf(name, sizeof name, "/kernel_N%d_mu%.6g_n%zu_%016llx.bin", grid->dimension(), mu,
                  grid->size(), static_cast<unsigned long long>(grid->hash()));
    path = cache_dir + name;
  }
  TablePtr t = path.empty() ? nullptr : KernelTable::load(path, grid, mu);
  if (!t) {
    t = KernelTable::build(grid, mu, threads);
    if (!path.empty()) t->save(path);
  }
  std::lock_guard lock(mtx);
  memo[key] = t;
  return t;
}

void KernelTable::apply(std::span<const double> q, std::span<double> out) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = w_.data() + i * n_;
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += row[j] * q[j];
    out[i] = s;
  }
}

RadialField riesz_convolve(const KernelTable& table, const RadialField& u, double p) {
  if (!table.grid().same_as(u.grid())) throw ConfigError("riesz: kernel table does not match field grid");
  if (!(p >= 1.0)) throw ConfigError("riesz: exponent must be >= 1");
  const auto& g = u.grid();
  std::vector<double> q(u.size()), phi(u.size());
  for (std::size_t j = 0; j < q.size(); ++j) q[j] = g.weight(j) * std::pow(std::abs(u[j]), p);
  table.apply(q, phi);
  return RadialField(u.grid_ptr(), std::move(phi));
}

double double_integral(const KernelTable& table, const RadialField& u, double p) {
  const RadialField phi = riesz_convolve(table, u, p);
  const auto& g = u.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += g.weight(i) * std::pow(std::abs(u[i]), p) * phi[i];
  return g.sphere_area() * s;
}

FieldInterpolant::FieldInterpolant(const RadialField& u)
    : r_(u.grid().nodes().begin(), u.grid().nodes().end()), v_(u.values().begin(), u.values().end()) {}

double FieldInterpolant::operator()(double r) const {
  r = std::abs(r);
  const long n = static_cast<long>(r_.size());
  if (r > r_.back()) return 0.0;
  const long j = std::upper_bound(r_.begin(), r_.end(), r) - r_.begin();  // r_[j-1] <= r < r_[j]
  long k0 = std::min(j - 3, n - 6);
  double xs[6], ys[6];
  for (int m = 0; m < 6; ++m) {
    const long k = k0 + m;  // negative indices mirror across the origin
    xs[m] = k >= 0 ? r_[k] : -r_[-k - 1];
    ys[m] = k >= 0 ? v_[k] : v_[-k - 1];
  }
  double s = 0.0;
  for (int a = 0; a < 6; ++a) {
    if (r == xs[a]) return ys[a];
    double l = 1.0;
    for (int b = 0; b < 6; ++b)
      if (b != a) l *= (r - xs[b]) / (xs[a] - xs[b]);
    s += l * ys[a];
  }
  return s;
}

double translated_integral(const RadialField& g, double R,
                           const std::function<double(double, double)>& F, double r_limit, double tol) {
  if (!(R >= 0.0)) throw ConfigError("translated_integral: offset must be >= 0");
  const auto& grid = g.grid();
  const int N = grid.dimension();
  const double rmax = grid.r_max();
  if (R == 0.0 && r_limit >= rmax) {
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = F(grid.node(i), g[i]);
    return grid.integrate(f);
  }
  const FieldInterpolant gi(g);
  const double cS = equator_area(N);

  auto inner = [&](double r) {
    if (r == 0.0) return F(0.0, gi(R)) * sphere_area(N - 1) / cS;
    if (R == 0.0) return F(r, gi(r)) * sphere_area(N - 1) / cS;
    const double c = (r * r + R * R - rmax * rmax) / (2.0 * r * R);
    const double th_c = c <= -1.0 ? M_PI : (c >= 1.0 ? 0.0 : std::acos(c));
    if (th_c <= 0.0) return 0.0;
    auto h = [&](double th) {
      const double rho2 = r * r + R * R - 2.0 * r * R * std::cos(th);
      return F(r, gi(std::sqrt(std::max(rho2, 0.0)))) * ipow(std::sin(th), N - 2);
    };
    return gauss_kronrod<double, 21>::integrate(h, 0.0, th_c, 8, tol);
  };
  auto outer = [&](double r) { return ipow(r, N - 1) * inner(r); };

  const double lo = std::max(0.0, R - rmax), hi = std::min(R + rmax, r_limit);
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts{lo, hi};
  for (double b : {R, rmax - R, R - rmax})
    if (b > lo && b < hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    total += gauss_kronrod<double, 31>::integrate(outer, cuts[k], cuts[k + 1], 10, tol);
  return cS * total;
}

double pair_integral(const RadialField& g, const std::function<double(double)>& f,
                     const std::function<double(double)>& psi, double R) {
  return translated_integral(g, R, [&](double r, double gv) { return f(r) * psi(gv); });
}

}  // namespace choq
