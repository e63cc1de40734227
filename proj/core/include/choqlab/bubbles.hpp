#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "choqlab/energy.hpp"
#include "choqlab/grid.hpp"
#include "choqlab/params.hpp"
#include "choqlab/riesz.hpp"
#include "json.hpp"

namespace choq {

// Cutoff bubble u = eta U_eps, eta = 1 on B_rho, 0 outside B_{2 rho}.
// rho = eps^tau unless a fixed radius is given.
struct BubbleSpec {
  double epsilon = 0.05;
  double tau = 0.75;
  std::optional<double> fixed_radius;

  static BubbleSpec shrinking(double epsilon, double tau) { return {epsilon, tau, std::nullopt}; }
  static BubbleSpec fixed(double epsilon, double radius) { return {epsilon, 0.75, radius}; }
  double rho() const;
  void validate() const;  // ConfigError on eps <= 0, tau outside (1/2,1), radius <= 0
};

// U_eps(r) = eps^{-(N-2)/2} A (1 + r^2/(eps^2 S))^{-(N-2)/2} with A = 1/||(1+|x|^2)^{-(N-2)/2}||_{2*},
// so -Delta U = U^{2*-1} and ||grad U||^2 = ||U||_{2*}^{2*} = S^{N/2}.
double talenti_amplitude(int N);
double talenti_profile(int N, double eps, double r);
double talenti_profile_dr(int N, double eps, double r);

// C^2 quintic blend: 1 on [0,rho], 0 on [2rho, inf)
double cutoff_eta(double rho, double r);
double cutoff_eta_dr(double rho, double r);

RadialField talenti_bubble(const GridPtr& grid, double epsilon);
RadialField cutoff_bubble(const GridPtr& grid, const BubbleSpec& spec);

double sobolev_constant_exact(int N);
double hls_constant_exact(int N, double mu);
// c*_inf = (1/alpha)(1/2 - 1/(2 2*_mu)) (beta^2 S_H / alpha)^{2*_mu/(2*_mu - 1)}
double c_star_inf(const ProblemParams& params, double S_H);

// Minimisation forms of the three quotients; the bubble minimises all of them.
struct Quotients {
  double sobolev = 0.0;  // ||grad u||^2 / ||u||_{2*}^2
  double hls = 0.0;      // ||u||_{2*}^{2 2*_mu} / D(u)  (reciprocal of the HLS ratio)
  double S_H = 0.0;      // ||grad u||^2 / D(u)^{1/2*_mu}
};
Quotients rayleigh_quotients(const KernelTable& table, const RadialField& u);

struct ConstantsReport {
  double S = 0.0, C_N_mu = 0.0, S_H = 0.0, S_H_direct = 0.0, c_star_inf = 0.0;
  double S_exact = 0.0, C_N_mu_exact = 0.0, S_H_exact = 0.0, c_star_inf_exact = 0.0;
  std::string method_S = "rayleigh quotient of the bubble on the grid";
  std::string method_C = "HLS ratio of the bubble with the kernel table";
  std::string method_S_H = "S / C^{1/2*_mu}";
  std::string method_S_H_direct = "||grad U||^2 / D(U)^{1/2*_mu}";
  std::string method_c_star = "closed form in S_H (direct)";
  std::vector<std::string> warnings;
};
// Evaluated on the unit bubble truncated to the table's grid (shifted to vanish at r_max).
ConstantsReport constants(const ProblemParams& params, const KernelTable& table);
nlohmann::json to_json(const ConstantsReport& r);

// The truncated unit bubble used by constants(), perturbed by u = U (1 + s b(r)) with
// random Gaussian bumps b. Each quotient must strictly increase.
struct ExtremalityRow {
  double center = 0.0, width = 0.0, amplitude = 0.0;
  Quotients perturbed;
  bool increased = false;
};
struct ExtremalityReport {
  Quotients base;
  std::vector<ExtremalityRow> rows;
  bool all_increase() const;
};
ExtremalityReport extremality_check(const KernelTable& table, int count, double size, std::uint64_t seed);
nlohmann::json to_json(const ExtremalityReport& r);

// ---- cutoff-bubble asymptotics, from 1-D quadrature of the exact profiles ----

enum class Regime { above, critical, below };  // t vs N/(N-2)

struct PowerFit {
  std::string quantity;
  double t = 0.0;             // exponent for the L^t rows, 0 otherwise
  Regime regime = Regime::above;
  double predicted = 0.0;
  double fitted = 0.0;
  double residual = 0.0;      // rms of the log-log fit
  bool log_corrected = false;
  double plain_fitted = 0.0;  // for the critical case: fit without the |ln eps| factor
  double plain_residual = 0.0;
  bool within(double rel) const;
};

struct Prop22Row {
  double epsilon = 0.0, rho = 0.0;
  double grad_norm2 = 0.0, grad_deficit = 0.0;     // limit S^{N/2}; deficit = limit - value
  double l2star_pow = 0.0, l2star_deficit = 0.0;   // ||u||_{2*}^{2*}
  double hls_value = 0.0, hls_deficit = 0.0;       // ||u||_0^{2 2*_mu} = D_{2*_mu}(u)
  std::vector<double> lt;                          // \int u^t, one per t exponent
};

struct Prop22Table {
  int N = 6;
  double mu = 2.0;
  std::optional<double> fixed_radius;
  double tau = 0.75;
  double grad_limit = 0.0, l2star_limit = 0.0, hls_limit = 0.0;
  std::vector<double> t_exponents;
  std::vector<Prop22Row> rows;
  std::vector<PowerFit> fits;  // gradient, L^{2*}, HLS, then one per t
  const PowerFit* find(const std::string& quantity, double t = 0.0) const;
};

Prop22Table prop22_table(int N, double mu, std::optional<double> fixed_radius, double tau,
                         const std::vector<double>& eps_list, const std::vector<double>& t_exponents);
nlohmann::json to_json(const Prop22Table& t);
Regime classify(int N, double t);
const char* to_string(Regime r);

// end condition of the threshold estimate: min{N-2, (N-2)delta/2, (2N-mu)(1-tau), (2N-mu)(1-tau)/2} > N - (N-2)mu~/2.
// The corrected form also requires (N-2)(1-tau), the kinetic deficit of a shrinking cutoff.
struct RegimeGate {
  int theorem_case = 0;  // 1..4 of the dimension/exponent table, 0 = none
  double target = 0.0;   // N - (N-2) mu~/2
  double tau_lo = 0.5, tau_hi = 0.5;              // feasible tau interval from the printed terms
  double tau_hi_corrected = 0.5;                  // ... including (N-2)(1-tau)
  bool feasible = false;
  bool feasible_corrected = false;
  double tau = 0.0;  // chosen: midpoint of the corrected interval when non-empty
  int N = 0;
  double mu = 0.0, delta = 1.0;
  double min_term(double tau, bool corrected) const;
};
RegimeGate regime_gate(const ProblemParams& params);
int theorem_case(const ProblemParams& params);
nlohmann::json to_json(const RegimeGate& g);

// ---- threshold experiment ----

struct ThresholdReport {
  double epsilon = 0.0, tau = 0.0, rho = 0.0;
  double sup_J_inf = 0.0, t_at_max = 0.0;
  double c_star_inf = 0.0, margin = 0.0;
  double t_max_pred = 0.0, K_max_pred = 0.0;  // closed forms for the pure K part
  double t_max_observed = 0.0;                // numerical argmax of K
  double grad_norm2 = 0.0, hls_norm = 0.0;    // ||grad u||^2 and D_{2*_mu}(u)
  int regime_case = 0;
  bool regime_ok = false;
  std::vector<std::string> warnings;
};
// The problem's grid must contain B_{2 rho}; the limit functional is used.
ThresholdReport threshold_experiment(const Problem& pb, const BubbleSpec& spec, double c_star);
nlohmann::json to_json(const ThresholdReport& r);

}  // namespace choq
