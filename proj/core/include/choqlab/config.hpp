#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "choqlab/axioms.hpp"
#include "choqlab/grid.hpp"
#include "choqlab/models.hpp"
#include "choqlab/params.hpp"
#include "choqlab/solver.hpp"
#include "json.hpp"

namespace choq {

inline constexpr int kFormatVersion = 1;

struct ModelConfig {
  int dimension = 6;
  double mu = 2.0;
  GFamily g = SqrtPower{1.0};
  ExpWeightedPower h{1.5, 3.0};
  ExpWell a{0.5, 3.0};
  double mu_tilde = 2.5;
  double p = 1.8;
  double gamma = 0.0;
  Fault fault = Fault::none;

  CoefficientModel build_model() const;
  ProblemParams build_params() const;
};

struct GridConfig {
  double r_max = 30.0;
  int n_nodes = 2048;
  Grading grading = Grading::geometric;
  // first cell ~1e-6: the ground state sits at scale ~1e-3, and a grid that does not
  // resolve it lets the descent collapse into a one-cell spike below the true level
  double stretch = 12.0;

  GridPtr build(int N) const;
};

struct ThresholdConfig {
  std::vector<double> eps_list{0.1, 0.05, 0.025};
  std::optional<double> tau;  // empty: take it from the regime gate
  int n_nodes = 1024;         // uniform grid on [0, radius_factor * rho] per epsilon
  double radius_factor = 4.0;
};

struct Prop22Config {
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  std::vector<double> t_exponents{2.0, 1.5, 1.0};
  std::optional<double> radius = 4.0;  // empty: shrinking cutoff rho = eps^tau
  double tau = 0.75;
};

struct ConstantsConfig {
  GridConfig grid{200.0, 2048, Grading::geometric, 4.0};
  int perturbations = 5;
  double perturbation_size = 0.05;
};

struct TranslateConfig {
  std::vector<double> R_list{5.0, 8.0};
  std::vector<double> lemma45_R{2.0, 4.0, 6.0};
  double mu_hat = 3.0;
  std::vector<double> control_t{0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
  std::string ground_state = "ground_state.csv";  // relative paths resolve against the output directory
};

struct CurveConfig {
  std::string direction = "gaussian";  // gaussian | bubble | zero | file
  double width = 1.0;                  // gaussian width or bubble epsilon
  std::string file;                    // field CSV when direction = file
  std::string functional = "limit";    // limit | full
  double t_min = 0.0, t_max = 4.0;
  int count = 81;
};

struct RunConfig {
  ModelConfig model;
  GridConfig grid;
  SolverConfig solver;
  SampleSpec axioms;
  ConstantsConfig constants;
  ThresholdConfig threshold;
  Prop22Config prop22;
  TranslateConfig translate;
  CurveConfig energy_curve;
  std::uint64_t seed = 20240601;
  std::string kernel_cache;  // directory for cached kernel tables, empty = memory only

  // Parses and validates; unknown keys and violated invariants throw ConfigError.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  void validate() const;
  nlohmann::json to_json() const;  // fully resolved, defaults included
};

}  // namespace choq
