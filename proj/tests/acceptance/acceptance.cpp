// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "choqlab/axioms.hpp"
#include "choqlab/bubbles.hpp"
#include "choqlab/config.hpp"
#include "choqlab/energy.hpp"
#include "choqlab/solver.hpp"
#include "commands.hpp"
#include "exemplar.hpp"

using namespace choq;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

RadialField pinned(const GridPtr& g, const std::function<double(double)>& f) {
  auto u = RadialField::from_function(g, f);
  std::vector<double> v(u.values().begin(), u.values().end());
  v.back() = 0.0;
  return RadialField(g, std::move(v));
}

double exact_c_star(const ProblemParams& p) {
  return c_star_inf(p, sobolev_constant_exact(p.dimension) /
                           std::pow(hls_constant_exact(p.dimension, p.mu), 1.0 / p.two_star_mu()));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  std::string out = "acceptance_runs";
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--out") out = argv[i + 1];
  fs::create_directories(out);

  const RunConfig cfg = RunConfig::load(CHOQLAB_EXEMPLAR_CONFIG);
  const CoefficientModel model = cfg.model.build_model();
  const ProblemParams P = cfg.model.build_params();
  const double c_star = exact_c_star(P);

  // 1. axiom suite
  {
    Clock c;
    SampleSpec spec = cfg.axioms;
    spec.points = std::max(spec.points, 1000);
    const AxiomReport rep = axiom_suite(model, P, spec);
    double worst = std::numeric_limits<double>::infinity();
    long fewest = std::numeric_limits<long>::max();
    for (const auto& cl : rep.clauses) worst = std::min(worst, cl.worst_margin), fewest = std::min(fewest, cl.samples);
    const double t = c.seconds();
    report(1, rep.all_pass() && worst >= -1e-9 && fewest >= 1000 && t < 10.0,
           fmt("%zu clauses, worst margin %.3e, fewest samples %ld, %.2f s", rep.clauses.size(), worst, fewest, t));
  }

  // 2. inverse and oddness
  {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(-50.0, 50.0);
    double inv = 0.0, odd = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double t = U(rng);
      inv = std::max(inv, std::abs(model.G_inverse(model.G(t)) - t) / (1 + std::abs(t)));
      odd = std::max({odd, std::abs(model.G(-t) + model.G(t)), std::abs(model.G_inverse(-t) + model.G_inverse(t)),
                      std::abs(model.g(-t).value - model.g(t).value)});
    }
    report(2, inv <= 1e-10 && odd <= 1e-12, fmt("max inverse error %.2e (<=1e-10), max oddness defect %.2e (<=1e-12)", inv, odd));
  }

  // 3. quadrature against Monte Carlo and the ball volume
  {
    Clock c;
    const auto g = RadialGrid::make(3, 8.0, 2048);
    const auto u = RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
    const double D = double_integral(*cached_kernel(g, 1.0), u, 2.0);
    const auto mc = testing::gaussian_choquard_mc(10'000'000, cfg.seed);
    const auto ball = RadialGrid::make(3, 1.0, 2048, Grading::uniform);
    const double vol = ball->integrate([](double) { return 1.0; }), exact = 4.0 * std::numbers::pi / 3.0;
    const double t = c.seconds();
    const double z = std::abs(D - mc.mean) / mc.sigma, vrel = std::abs(vol / exact - 1.0);
    report(3, z <= 3.0 && vrel <= 1e-6 && t < 60.0,
           fmt("D = %.8f, MC %.8f +- %.1e (%.2f sigma); ball volume rel. error %.1e; %.1f s", D, mc.mean, mc.sigma, z,
               vrel, t));
  }

  // 4. Gateaux derivative against central differences
  {
    const auto g = RadialGrid::make(6, cfg.grid.r_max, 2048, cfg.grid.grading, cfg.grid.stretch);
    const Problem pb = testing::exemplar_problem(g);
    std::mt19937_64 rng(cfg.seed + 4);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const auto v = pinned(g, testing::random_bump(rng)), phi = pinned(g, testing::random_bump(rng));
      const double d = 1e-5;
      const double fd = (energy(pb, FunctionalKind::full, v.axpy(d, phi)).total -
                         energy(pb, FunctionalKind::full, v.axpy(-d, phi)).total) / (2 * d);
      const double an = gateaux(pb, FunctionalKind::full, v, phi);
      worst = std::max(worst, std::abs(an - fd) / std::max(std::abs(an), 1e-300));
    }
    report(4, worst < 1e-5, fmt("worst relative error %.2e over 10 pairs at 2048 nodes", worst));
  }

  // 5. constants
  {
    const auto table = cached_kernel(cfg.constants.grid.build(6), 2.0);
    const ConstantsReport rep = constants(P, *table);
    const ExtremalityReport ext = extremality_check(*table, 5, cfg.constants.perturbation_size, cfg.seed);
    const double gap = std::abs(rep.S_H / rep.S_H_direct - 1.0);
    report(5, gap <= 1e-5 && ext.all_increase() && ext.rows.size() == 5,
           fmt("S_H %.9f vs direct %.9f (gap %.1e, closed form %.9f); %zu/5 perturbations raise all quotients",
               rep.S_H, rep.S_H_direct, gap, rep.S_H_exact,
               static_cast<std::size_t>(std::count_if(ext.rows.begin(), ext.rows.end(), [](auto& r) { return r.increased; }))));
  }

  // 6. bubble asymptotics
  {
    Clock c;
    const Prop22Table T = prop22_table(6, 2.0, cfg.prop22.radius, cfg.prop22.tau, {0.2, 0.1, 0.05, 0.025}, {2.0, 1.5, 1.0});
    bool ok = true;
    std::string d;
    for (const char* q : {"grad_deficit", "l2star_deficit"}) {
      const PowerFit* f = T.find(q);
      ok = ok && f && f->within(0.15);
      d += fmt("%s %.3f/%g ", q, f->fitted, f->predicted);
    }
    for (double t : {2.0, 1.5, 1.0}) {
      const PowerFit* f = T.find("lt", t);
      ok = ok && f && f->within(0.15);
      d += fmt("t=%g %.3f/%g ", t, f->fitted, f->predicted);
    }
    const double secs = c.seconds();
    report(6, ok && secs < 300.0, d + fmt("(%.1f s)", secs));
  }

  // 7. threshold below c*_inf
  {
    const RegimeGate gate = regime_gate(P);
    const double tau = cfg.threshold.tau.value_or(gate.tau);
    std::vector<double> margins;
    std::string d = fmt("tau %.4f, c* %.6f, margins:", tau, c_star);
    for (double eps : {0.1, 0.05, 0.025}) {
      const BubbleSpec s = BubbleSpec::shrinking(eps, tau);
      const auto g = RadialGrid::make(6, cfg.threshold.radius_factor * s.rho(), cfg.threshold.n_nodes, Grading::uniform);
      const auto r = threshold_experiment(testing::exemplar_problem(g), s, c_star);
      margins.push_back(r.margin);
      d += fmt(" eps=%g:%.4f", eps, r.margin);
    }
    const bool pos = std::all_of(margins.begin(), margins.end(), [](double m) { return m > 0.0; });
    const bool inc = margins[1] > margins[0] && margins[2] > margins[1];
    report(7, pos && inc, d + fmt(" (positive: %s, increasing: %s)", pos ? "yes" : "no", inc ? "yes" : "no"));
  }

  // 9 first: its ground state feeds 8 and 10
  const GridPtr gs_grid = cfg.grid.build(6);
  const Problem gs_pb = testing::exemplar_problem(gs_grid);
  Clock gs_clock;
  const GroundStateResult gs = find_ground_state(gs_pb, cfg.solver);
  const double gs_secs = gs_clock.seconds();

  // 8. single Nehari crossing
  {
    std::mt19937_64 rng(cfg.seed + 8);
    int single = 0;
    for (int k = 0; k < 50; ++k) {
      const auto u = pinned(gs_grid, testing::random_bump(rng));
      int changes = 0;
      double prev = nehari_factor(gs_pb, FunctionalKind::limit, u, 1e-4);
      for (int i = 1; i <= 80; ++i) {
        const double cur = nehari_factor(gs_pb, FunctionalKind::limit, u, std::pow(10.0, -4.0 + 0.1 * i));
        changes += (cur > 0.0) != (prev > 0.0);
        prev = cur;
      }
      single += changes == 1;
    }
    const double ts = nehari_scale(gs_pb, FunctionalKind::limit, gs.field);
    report(8, single == 50 && std::abs(ts - 1.0) <= 1e-6,
           fmt("%d/50 fields cross once on [1e-4,1e4]; t*(ground state) - 1 = %.1e", single, ts - 1.0));
  }

  // 9. ground state
  {
    const double kref = (6 - 1) / 2.0;
    const bool dec = gs.decay && gs.decay->slope >= 0.85 && gs.decay->slope <= 1.15 &&
                     gs.decay->algebraic_exp >= 0.7 * kref && gs.decay->algebraic_exp <= 1.3 * kref;
    const bool ok = gs.converged && gs.residual < 1e-5 && gs.energy_level > 0.0 && gs.energy_level < c_star && dec &&
                    gs_secs < 600.0;
    std::string d = fmt("converged %s in %d its, residual %.1e, level %.6f in (0, %.6f), ", gs.converged ? "yes" : "no",
                        gs.iterations, gs.residual, gs.energy_level, c_star);
    if (gs.decay) d += fmt("sigma %.3f [0.85,1.15], kappa %.3f [%.2f,%.2f]", gs.decay->slope, gs.decay->algebraic_exp, 0.7 * kref, 1.3 * kref);
    else d += "no decay fit";
    d += fmt(", %.1f s", gs_secs);
    for (const auto& w : gs.warnings) d += "; warning: " + w;
    report(9, ok, d);
  }

  // 10. translated competitors
  {
    const Lemma45Table l45 = lemma45_check(gs.field, {2.0, 4.0, 6.0}, cfg.translate.mu_hat, P.p_growth);
    const Lemma52Table l52 = lemma52_experiment(gs_pb, gs.field, {5.0, 8.0}, {});
    report(10, l45.pass() && l52.all_positive(),
           fmt("L4.5 floor %.3f ceilings %.3f/%.3f (%s); L5.2 margins R=5: %.3e, R=8: %.3e", l45.floor_ball,
               l45.ceiling_weighted, l45.ceiling_weighted_p, l45.pass() ? "bounded" : "unbounded", l52.rows[0].margin,
               l52.rows[1].margin));
  }

  // 11. determinism of the artifacts
  {
    nlohmann::json j = cfg.to_json();
    j["grid"]["n_nodes"] = 512;
    j["threshold"]["eps_list"] = {0.05};
    j["threshold"]["n_nodes"] = 256;
    const RunConfig small = RunConfig::from_json(j);
    std::vector<std::string> files;
    bool same = true;
    for (int run = 0; run < 2; ++run) {
      const cli::Context ctx{small, (fs::path(out) / ("run" + std::to_string(run))).string(), 1};
      fs::remove_all(ctx.out_dir);
      fs::create_directories(ctx.out_dir);
      cli::cmd_verify(ctx);
      cli::cmd_threshold(ctx);
      cli::cmd_ground_state(ctx);
      cli::cmd_translate(ctx);
      cli::cmd_energy_curve(ctx);
    }
    for (const auto& e : fs::directory_iterator(fs::path(out) / "run0")) {
      const auto name = e.path().filename();
      files.push_back(name.string());
      same = same && fs::exists(fs::path(out) / "run1" / name) && slurp(e.path()) == slurp(fs::path(out) / "run1" / name);
    }
    std::sort(files.begin(), files.end());
    std::string list;
    for (const auto& f : files) list += (list.empty() ? "" : ",") + f;
    report(11, same && files.size() >= 8, fmt("%zu artifacts byte-identical across two runs: %s", files.size(), list.c_str()));
  }

  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
