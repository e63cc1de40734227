#pragma once
#include <map>
#include <string>
#include <vector>

#include "choqlab/models.hpp"
#include "json.hpp"

namespace choq {

struct SampleSpec {
  int points = 1000;     // per clause (>= 10^3 for acceptance runs)
  double t_min = 1e-6;   // log range for one-variable clauses
  double t_max = 1e6;
  double x_max = 10.0;   // radial lattice [0, x_max]
  int x_count = 25;
  double s_max = 10.0;   // linear lattice [0, s_max] mixed into the log range
  double tolerance = 1e-9;
  double fit_headroom = 1.05;  // fitted constants are inflated before validation
};

struct ClauseResult {
  std::string name;
  bool pass = true;
  double worst_margin = 0.0;  // min over samples of (lhs - rhs)/scale, >= -tol passes
  std::vector<double> worst_point;
  long samples = 0;
  std::map<std::string, double> fitted;
  std::string note;
};

struct AxiomReport {
  std::vector<ClauseResult> clauses;
  bool all_pass() const;
  const ClauseResult* find(const std::string& name) const;
  std::vector<std::string> failing() const;
};

AxiomReport axiom_suite(const CoefficientModel& model, const ProblemParams& params,
                        const SampleSpec& spec = {});

nlohmann::json to_json(const AxiomReport& report);

}  // namespace choq
