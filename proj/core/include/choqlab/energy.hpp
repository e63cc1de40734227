#pragma once
#include <iosfwd>
#include <optional>
#include <vector>

#include "choqlab/axioms.hpp"
#include "choqlab/models.hpp"
#include "choqlab/riesz.hpp"

namespace choq {

enum class FunctionalKind { full, limit };

struct EnergyBreakdown {
  double kinetic = 0.0;    // (1/2) \int |grad v|^2
  double potential = 0.0;  // (1/2) \int a (G^{-1}(v))^2
  double f_term = 0.0;     // \int H(x, G^{-1}(v)), subtracted
  double choquard = 0.0;   // D(G^{-1}(v^+)) / (2 alpha 2*_mu), subtracted
  double total = 0.0;
};

// Model, exponents and kernel table bundled for one grid. Axiom verification is
// attached separately; Nehari-based operations refuse unverified problems.
class Problem {
 public:
  Problem(CoefficientModel model, ProblemParams params, TablePtr table);

  const CoefficientModel& model() const { return model_; }
  const ProblemParams& params() const { return params_; }
  const KernelTable& table() const { return *table_; }
  const TablePtr& table_ptr() const { return table_; }
  const RadialGrid& grid() const { return table_->grid(); }
  const GridPtr& grid_ptr() const { return table_->grid_ptr(); }

  // per-node a(r_i) and h-weight (1 - e^{-nu r_i}); both 1 for the limit functional
  const std::vector<double>& a_nodes(FunctionalKind k) const { return k == FunctionalKind::full ? a_ : ones_; }
  const std::vector<double>& h_nodes(FunctionalKind k) const { return k == FunctionalKind::full ? hw_ : ones_; }

  void attach_verification(const AxiomReport& report);
  void trust_hypotheses() { verified_ = true; }  // for callers that verified elsewhere
  bool hypotheses_verified() const { return verified_; }
  void require_verified(const char* op) const;

  void check_field(const RadialField& v) const;

 private:
  CoefficientModel model_;
  ProblemParams params_;
  TablePtr table_;
  std::vector<double> a_, hw_, ones_;
  bool verified_ = false;
};

struct Evaluation {
  EnergyBreakdown energy;
  std::vector<double> gradient;  // dE/dv_i of the discrete energy (includes |S| w_i)
  std::vector<double> residual;  // gradient_i / (|S| w_i): strong form of J'(v)
};

Evaluation evaluate(const Problem& pb, FunctionalKind kind, const RadialField& v, bool with_gradient);
EnergyBreakdown energy(const Problem& pb, FunctionalKind kind, const RadialField& v);
double gateaux(const Problem& pb, FunctionalKind kind, const RadialField& v, const RadialField& phi);

// d/dt J(t u) = <J'(t u), u>
double ray_derivative(const Problem& pb, FunctionalKind kind, const RadialField& u, double t);
// nu(t) = <J'(t u), u> / t
double nehari_factor(const Problem& pb, FunctionalKind kind, const RadialField& u, double t);
double nehari_scale(const Problem& pb, FunctionalKind kind, const RadialField& u);

struct RayMax {
  double t_at_max = 0.0;
  double sup_value = 0.0;
};
RayMax ray_max(const Problem& pb, FunctionalKind kind, const RadialField& u);

struct MountainPassReport {
  struct Row {
    double rho;
    double inf_energy;  // min over directions of J at H^1-norm rho
  };
  std::vector<Row> rows;  // first row is rho = 0
  double best_floor = 0.0;
  double best_rho = 0.0;
  std::vector<double> negative_t;  // per direction, some t with J(t dir) < 0 (NaN if none)
  bool floor_positive = false;
  bool all_directions_negative = false;
};
MountainPassReport mp_geometry_check(const Problem& pb, FunctionalKind kind,
                                     const std::vector<RadialField>& directions,
                                     const std::vector<double>& rho_grid);

struct CurvePoint {
  double t;
  EnergyBreakdown e;
};
std::vector<CurvePoint> energy_curve(const Problem& pb, FunctionalKind kind, const RadialField& u,
                                     const std::vector<double>& t_values);
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);

}  // namespace choq
