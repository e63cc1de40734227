#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "choqlab/axioms.hpp"
#include "choqlab/bubbles.hpp"
#include "choqlab/energy.hpp"
#include "choqlab/errors.hpp"
#include "choqlab/riesz.hpp"
#include "choqlab/solver.hpp"

namespace choq::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string path_in(const Context& ctx, const std::string& name) { return (fs::path(ctx.out_dir) / name).string(); }

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  return os;
}

void write_report(const Context& ctx, const std::string& name, const std::string& command, json body) {
  json doc = {{"format_version", kFormatVersion}, {"command", command}, {"config", ctx.config.to_json()}};
  for (auto& [k, v] : body.items()) doc[k] = v;
  auto os = open_out(path_in(ctx, name));
  os << doc.dump(2) << '\n';
}

// Problems are only handed to Nehari-based routines once the axiom suite has passed.
Problem make_problem(const Context& ctx, const GridPtr& grid) {
  const auto& m = ctx.config.model;
  const CoefficientModel model = m.build_model();
  const ProblemParams params = m.build_params();
  Problem pb(model, params, cached_kernel(grid, params.mu, ctx.threads, ctx.config.kernel_cache));
  pb.attach_verification(axiom_suite(model, params, ctx.config.axioms));
  pb.require_verified("experiment");
  return pb;
}

double exact_c_star(const ProblemParams& p) {
  const double S_H = sobolev_constant_exact(p.dimension) /
                     std::pow(hls_constant_exact(p.dimension, p.mu), 1.0 / p.two_star_mu());
  return c_star_inf(p, S_H);
}

}  // namespace

int cmd_verify(const Context& ctx) {
  const auto& m = ctx.config.model;
  const AxiomReport rep = axiom_suite(m.build_model(), m.build_params(), ctx.config.axioms);
  write_report(ctx, "axioms.json", "verify", {{"model", m.build_model().describe()}, {"axioms", to_json(rep)}});
  for (const auto& name : rep.failing()) std::cerr << "failing clause: " << name << '\n';
  return rep.all_pass() ? 0 : 1;
}

int cmd_constants(const Context& ctx) {
  const auto& c = ctx.config;
  const ProblemParams params = c.model.build_params();
  const GridPtr grid = c.constants.grid.build(params.dimension);
  const TablePtr table = cached_kernel(grid, params.mu, ctx.threads, c.kernel_cache);
  const ConstantsReport rep = constants(params, *table);
  const ExtremalityReport ext = extremality_check(*table, c.constants.perturbations, c.constants.perturbation_size, c.seed);
  const Prop22Table p22 =
      prop22_table(params.dimension, params.mu, c.prop22.radius, c.prop22.tau, c.prop22.eps_list, c.prop22.t_exponents);
  const double gap = std::abs(rep.S_H / rep.S_H_direct - 1.0);
  write_report(ctx, "constants.json", "constants",
               {{"constants", to_json(rep)}, {"extremality", to_json(ext)}, {"prop22", to_json(p22)}});
  bool ok = gap <= 1e-5 && (c.constants.perturbations == 0 || ext.all_increase());
  for (const auto& f : p22.fits)
    if (!f.within(0.15)) ok = false;
  return ok ? 0 : 1;
}

int cmd_threshold(const Context& ctx) {
  const auto& c = ctx.config;
  const ProblemParams params = c.model.build_params();
  const RegimeGate gate = regime_gate(params);
  const double tau = c.threshold.tau.value_or(gate.tau);
  const double c_star = exact_c_star(params);
  json rows = json::array();
  std::vector<std::pair<double, double>> margins;
  for (double eps : c.threshold.eps_list) {
    const BubbleSpec spec = BubbleSpec::shrinking(eps, tau);
    const GridPtr grid =
        RadialGrid::make(params.dimension, c.threshold.radius_factor * spec.rho(), c.threshold.n_nodes, Grading::uniform);
    const Problem pb = make_problem(ctx, grid);
    const ThresholdReport r = threshold_experiment(pb, spec, c_star);
    rows.push_back(to_json(r));
    margins.emplace_back(eps, r.margin);
  }
  std::sort(margins.begin(), margins.end(), [](auto a, auto b) { return a.first > b.first; });
  bool positive = true, increasing = true;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    positive = positive && margins[i].second > 0.0;
    if (i > 0) increasing = increasing && margins[i].second > margins[i - 1].second;
  }
  write_report(ctx, "threshold.json", "threshold",
               {{"gate", to_json(gate)},
                {"tau", tau},
                {"c_star_inf", c_star},
                {"rows", rows},
                {"all_margins_positive", positive},
                {"margin_increasing_as_eps_decreases", increasing}});
  return positive && increasing ? 0 : 1;
}

int cmd_ground_state(const Context& ctx) {
  const auto& c = ctx.config;
  const ProblemParams params = c.model.build_params();
  const Problem pb = make_problem(ctx, c.grid.build(params.dimension));
  const GroundStateResult res = find_ground_state(pb, c.solver);

  {
    auto os = open_out(path_in(ctx, "ground_state.csv"));
    write_csv(os, res.field);
  }
  {
    auto os = open_out(path_in(ctx, "iterations.csv"));
    write_iterations_csv(os, res.log);
  }
  const double c_star = exact_c_star(params);
  const double kappa_ref = (params.dimension - 1.0) / 2.0;
  json decay = res.decay ? to_json(*res.decay) : json(nullptr);
  json summary = {{"converged", res.converged},
                  {"iterations", res.iterations},
                  {"energy_level", res.energy_level},
                  {"residual", res.residual},
                  {"nehari_value", res.nehari_value},
                  {"c_star_inf", c_star},
                  {"level_below_threshold", res.energy_level > 0.0 && res.energy_level < c_star},
                  {"warnings", res.warnings}};
  json bands = {{"slope", {0.85, 1.15}}, {"algebraic_exp", {0.7 * kappa_ref, 1.3 * kappa_ref}}};
  if (res.converged) summary["nehari_scale"] = nehari_scale(pb, FunctionalKind::limit, res.field);
  write_report(ctx, "decay.json", "ground-state", {{"ground_state", summary}, {"decay", decay}, {"bands", bands}});
  if (!res.converged) {
    std::cerr << "ground state did not converge: residual " << res.residual << " after " << res.iterations
              << " iterations\n";
    return 3;
  }
  const Lemma45Table l45 = lemma45_check(res.field, c.translate.lemma45_R, c.translate.mu_hat, params.p_growth);
  write_report(ctx, "lemma45.json", "ground-state", {{"lemma45", to_json(l45)}});
  return l45.pass() ? 0 : 1;
}

int cmd_translate(const Context& ctx) {
  const auto& c = ctx.config;
  const ProblemParams params = c.model.build_params();
  fs::path gs(c.translate.ground_state);
  if (gs.is_relative()) gs = fs::path(ctx.out_dir) / gs;
  std::ifstream in(gs);
  if (!in) throw ConfigError("translate: ground-state file '" + gs.string() + "' not found (run ground-state first)");
  const RadialField w = read_csv(in, params.dimension);
  const Problem pb = make_problem(ctx, w.grid_ptr());
  const Lemma52Table T = lemma52_experiment(pb, w, c.translate.R_list, c.translate.control_t);
  write_report(ctx, "lemma52.json", "translate", {{"lemma52", to_json(T)}});
  return T.all_positive() ? 0 : 1;
}

int cmd_energy_curve(const Context& ctx) {
  const auto& c = ctx.config;
  const auto& e = c.energy_curve;
  const ProblemParams params = c.model.build_params();
  std::optional<RadialField> dir;
  if (e.direction == "file") {
    std::ifstream in(e.file);
    if (!in) throw ConfigError("energy_curve.file '" + e.file + "' not found");
    dir = read_csv(in, params.dimension);
  } else {
    const GridPtr grid = c.grid.build(params.dimension);
    const int N = params.dimension;
    if (e.direction == "gaussian")
      dir = RadialField::from_function(grid, [&](double r) { return std::exp(-(r / e.width) * (r / e.width)); });
    else if (e.direction == "bubble") {
      const double tail = talenti_profile(N, e.width, grid->r_max());
      dir = RadialField::from_function(grid, [&](double r) { return talenti_profile(N, e.width, r) - tail; });
    } else
      dir = RadialField::zeros(grid);
  }
  const Problem pb(c.model.build_model(), params, cached_kernel(dir->grid_ptr(), params.mu, ctx.threads, c.kernel_cache));
  std::vector<double> ts(e.count);
  for (int i = 0; i < e.count; ++i) ts[i] = e.t_min + (e.t_max - e.t_min) * i / (e.count - 1);
  const auto kind = e.functional == "full" ? FunctionalKind::full : FunctionalKind::limit;
  const auto curve = energy_curve(pb, kind, *dir, ts);
  auto os = open_out(path_in(ctx, "curve.csv"));
  write_curve_csv(os, curve);
  return 0;
}

}  // namespace choq::cli
