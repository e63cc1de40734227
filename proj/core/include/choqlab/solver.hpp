#pragma once
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "choqlab/energy.hpp"
#include "json.hpp"

namespace choq {

struct SolverConfig {
  int max_iters = 5000;  // the scale mode of a concentrated ground state is nearly flat
  double step0 = 1.0;      // first trial step (later steps use Barzilai-Borwein)
  double armijo_c = 1e-4;
  double grad_tol = 1e-7;  // on the normalised strong residual
  int nehari_every = 1;    // reproject onto the Nehari manifold every k steps
  double decay_lo = 5.0, decay_hi = 20.0;

  void validate() const;  // ConfigError
};

struct DecayFit {
  double r_lo = 0.0, r_hi = 0.0;
  int nodes = 0;
  double slope = 0.0;          // sigma in log v = c - sigma r - kappa log(1+r)
  double algebraic_exp = 0.0;  // kappa
  double intercept = 0.0;
  double fit_residual = 0.0;
};

struct IterationRecord {
  int iter;
  double energy;
  double residual;
  double step;
};

struct GroundStateResult {
  RadialField field;
  double energy_level = 0.0;
  double residual = 0.0;
  double nehari_value = 0.0;
  std::optional<DecayFit> decay;
  int iterations = 0;
  bool converged = false;
  std::vector<IterationRecord> log;
  std::vector<std::string> warnings;
};

// Nehari-projected descent for the limit functional. Steps use the H^1 Riesz
// representative of J'(v) (a tridiagonal solve), the positive-part map, and a
// rescaling v <- t*(v) v onto the Nehari manifold.
GroundStateResult find_ground_state(const Problem& pb, const SolverConfig& cfg,
                                    std::optional<RadialField> start = std::nullopt);

// ||strong residual of the limit equation||_{L^2} / ||v||_{H^1}, boundary node excluded; 0 for v = 0
double weak_residual(const Problem& pb, const RadialField& v, FunctionalKind kind = FunctionalKind::limit);

// least squares fit of log v = c - sigma r - kappa log(1+r) on nodes inside [r_lo, r_hi]
DecayFit decay_fit(const RadialField& v, double r_lo, double r_hi);

// H^1 Riesz representative z of a gradient g (g_i = dJ/dv_i with the |S| factor);
// the last node is pinned to zero.
std::vector<double> sobolev_gradient(const RadialGrid& grid, std::span<const double> g);

struct Lemma45Row {
  double R;
  double inner_ball;   // \int_{|x|<=1} w_R^2
  double weighted;     // \int e^{-mu^|x|} w_R^2
  double weighted_p;   // \int e^{-mu^|x|} w_R^{p+1}
  double ratio_ball, ratio_weighted, ratio_weighted_p;
};
struct Lemma45Table {
  double mu_hat = 3.0, p = 1.8;
  std::vector<Lemma45Row> rows;
  // ratios relative to the first R: item 1 bounded below, items 2 and 3 bounded above
  double floor_ball = 0.0, ceiling_weighted = 0.0, ceiling_weighted_p = 0.0;
  bool pass(double band = 10.0) const;
};
Lemma45Table lemma45_check(const RadialField& w, const std::vector<double>& R_list, double mu_hat, double p);

struct Lemma52Row {
  double R;
  double sup_J;       // sup_t J(t w_R)
  double t_at_sup;
  double J_inf;       // ground level sup_t J^inf(t w)
  double margin;      // J_inf - sup_J
  double potential_gain;  // (t*^2-scaled) -1/2 \int (1-a) G^{-1}(t w_R)^2 at t*
  double h_loss;          // \int (Hbar - H)(x, G^{-1}(t w_R)) at t*
};
struct Lemma52Control {
  double t;
  double difference;  // J(t w) - J^inf(t w) at R = 0
};
struct Lemma52Table {
  std::vector<Lemma52Row> rows;
  std::vector<Lemma52Control> control;  // R = 0 sign check over a t grid
  bool all_positive() const;
};
// J(t w_R) - J^inf(t w) for a unit vector translation R, via translated quadrature.
double lemma52_correction(const Problem& pb, const RadialField& w, double R, double t);
Lemma52Table lemma52_experiment(const Problem& pb, const RadialField& w, const std::vector<double>& R_list,
                                const std::vector<double>& control_t = {});

void write_iterations_csv(std::ostream& os, const std::vector<IterationRecord>& log);
nlohmann::json to_json(const DecayFit& d);
nlohmann::json to_json(const Lemma45Table& t);
nlohmann::json to_json(const Lemma52Table& t);

}  // namespace choq
