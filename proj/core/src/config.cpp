#include "choqlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "choqlab/errors.hpp"

namespace choq {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and remembers which were used, so leftovers can be rejected.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <class T>
  void get(const std::string& k, T& out) {
    seen_.insert(k);
    if (!j_.contains(k)) return;
    try {
      out = j_.at(k).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + k + ": " + e.what());
    }
  }

  void get_opt(const std::string& k, std::optional<double>& out) {
    seen_.insert(k);
    if (!j_.contains(k)) return;
    if (j_.at(k).is_null()) {
      out.reset();
      return;
    }
    double v = 0.0;
    get(k, v);
    out = v;
  }

  Block sub(const std::string& k) {
    seen_.insert(k);
    static const json empty = json::object();
    return Block(j_.contains(k) ? j_.at(k) : empty, path_ + "." + k);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* grading_name(Grading g) { return g == Grading::uniform ? "uniform" : "geometric"; }

Grading parse_grading(const std::string& s) {
  if (s == "uniform") return Grading::uniform;
  if (s == "geometric") return Grading::geometric;
  throw ConfigError("grid.grading must be 'uniform' or 'geometric', got '" + s + "'");
}

void read_grid(Block b, GridConfig& g) {
  std::string grading = grading_name(g.grading);
  b.get("r_max", g.r_max);
  b.get("n_nodes", g.n_nodes);
  b.get("grading", grading);
  b.get("stretch", g.stretch);
  b.finish();
  g.grading = parse_grading(grading);
}

json grid_json(const GridConfig& g) {
  return {{"r_max", g.r_max}, {"n_nodes", g.n_nodes}, {"grading", grading_name(g.grading)}, {"stretch", g.stretch}};
}

void check_grid(const GridConfig& g, const std::string& where) {
  if (!(g.r_max > 0.0)) throw ConfigError(where + ".r_max must be positive");
  if (g.n_nodes < 16) throw ConfigError(where + ".n_nodes must be at least 16");
  if (g.grading == Grading::geometric && !(g.stretch > 0.0)) throw ConfigError(where + ".stretch must be positive");
}

void check_positive_list(const std::vector<double>& v, const std::string& where) {
  if (v.empty()) throw ConfigError(where + " must not be empty");
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(where + " entries must be positive");
}

}  // namespace

CoefficientModel ModelConfig::build_model() const { return CoefficientModel(g, h, a, fault); }

ProblemParams ModelConfig::build_params() const {
  return make_params(build_model(), dimension, mu, mu_tilde, p, gamma);
}

GridPtr GridConfig::build(int N) const { return RadialGrid::make(N, r_max, n_nodes, grading, stretch); }

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  Block root(j, "config");
  {
    Block m = root.sub("model");
    ModelConfig& mc = c.model;
    m.get("dimension", mc.dimension);
    m.get("mu", mc.mu);
    m.get("mu_tilde", mc.mu_tilde);
    m.get("p", mc.p);
    m.get("gamma", mc.gamma);
    std::string fault = "none";
    m.get("fault", fault);
    if (fault == "none")
      mc.fault = Fault::none;
    else if (fault == "negate_g_derivative")
      mc.fault = Fault::negate_g_derivative;
    else
      throw ConfigError("model.fault must be 'none' or 'negate_g_derivative'");
    {
      Block g = m.sub("g_family");
      std::string kind = "sqrt_power";
      g.get("kind", kind);
      if (kind == "sqrt_power") {
        SqrtPower s;
        g.get("q", s.q);
        mc.g = s;
      } else if (kind == "plain_power") {
        PlainPower p;
        g.get("alpha", p.alpha);
        mc.g = p;
      } else {
        throw ConfigError("model.g_family.kind must be 'sqrt_power' or 'plain_power'");
      }
      g.finish();
    }
    {
      Block h = m.sub("h_family");
      std::string kind = "exp_weighted_power";
      h.get("kind", kind);
      if (kind != "exp_weighted_power") throw ConfigError("model.h_family.kind must be 'exp_weighted_power'");
      h.get("q_h", mc.h.q_h);
      h.get("nu", mc.h.nu);
      h.finish();
    }
    {
      Block a = m.sub("a_family");
      std::string kind = "exp_well";
      a.get("kind", kind);
      if (kind != "exp_well") throw ConfigError("model.a_family.kind must be 'exp_well'");
      a.get("k", mc.a.k);
      a.get("nu", mc.a.nu);
      a.finish();
    }
    m.finish();
  }
  read_grid(root.sub("grid"), c.grid);
  {
    Block s = root.sub("solver");
    s.get("max_iters", c.solver.max_iters);
    s.get("step0", c.solver.step0);
    s.get("armijo_c", c.solver.armijo_c);
    s.get("grad_tol", c.solver.grad_tol);
    s.get("nehari_every", c.solver.nehari_every);
    s.get("decay_lo", c.solver.decay_lo);
    s.get("decay_hi", c.solver.decay_hi);
    s.finish();
  }
  {
    Block a = root.sub("axioms");
    a.get("points", c.axioms.points);
    a.get("t_min", c.axioms.t_min);
    a.get("t_max", c.axioms.t_max);
    a.get("x_max", c.axioms.x_max);
    a.get("x_count", c.axioms.x_count);
    a.get("s_max", c.axioms.s_max);
    a.get("tolerance", c.axioms.tolerance);
    a.get("fit_headroom", c.axioms.fit_headroom);
    a.finish();
  }
  {
    Block k = root.sub("constants");
    read_grid(k.sub("grid"), c.constants.grid);
    k.get("perturbations", c.constants.perturbations);
    k.get("perturbation_size", c.constants.perturbation_size);
    k.finish();
  }
  {
    Block t = root.sub("threshold");
    t.get("eps_list", c.threshold.eps_list);
    t.get_opt("tau", c.threshold.tau);
    t.get("n_nodes", c.threshold.n_nodes);
    t.get("radius_factor", c.threshold.radius_factor);
    t.finish();
  }
  {
    Block p = root.sub("prop22");
    p.get("eps_list", c.prop22.eps_list);
    p.get("t_exponents", c.prop22.t_exponents);
    p.get_opt("radius", c.prop22.radius);
    p.get("tau", c.prop22.tau);
    p.finish();
  }
  {
    Block t = root.sub("translate");
    t.get("R_list", c.translate.R_list);
    t.get("lemma45_R", c.translate.lemma45_R);
    t.get("mu_hat", c.translate.mu_hat);
    t.get("control_t", c.translate.control_t);
    t.get("ground_state", c.translate.ground_state);
    t.finish();
  }
  {
    Block e = root.sub("energy_curve");
    e.get("direction", c.energy_curve.direction);
    e.get("width", c.energy_curve.width);
    e.get("file", c.energy_curve.file);
    e.get("functional", c.energy_curve.functional);
    e.get("t_min", c.energy_curve.t_min);
    e.get("t_max", c.energy_curve.t_max);
    e.get("count", c.energy_curve.count);
    e.finish();
  }
  root.get("seed", c.seed);
  root.get("kernel_cache", c.kernel_cache);
  // resolved dumps carry a format version; accept it so an embedded config reloads
  int version = kFormatVersion;
  root.get("format_version", version);
  if (version != kFormatVersion) throw ConfigError("config: unsupported format_version");
  root.finish();
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  return from_json(j);
}

void RunConfig::validate() const {
  model.build_params().validate();  // also validates the families through the model constructor
  if (model.h.q_h <= 0.0) throw ConfigError("model.h_family.q_h must be positive");
  if (!(model.a.k >= 0.0 && model.a.k < 1.0)) throw ConfigError("model.a_family.k must lie in [0,1)");
  check_grid(grid, "grid");
  check_grid(constants.grid, "constants.grid");
  solver.validate();
  if (axioms.points < 10) throw ConfigError("axioms.points must be at least 10");
  if (!(axioms.t_min > 0.0 && axioms.t_max > axioms.t_min)) throw ConfigError("axioms: need 0 < t_min < t_max");
  if (!(axioms.x_max > 0.0) || axioms.x_count < 2) throw ConfigError("axioms: bad radial lattice");
  if (!(axioms.tolerance >= 0.0)) throw ConfigError("axioms.tolerance must be nonnegative");
  if (constants.perturbations < 0 || !(constants.perturbation_size > 0.0))
    throw ConfigError("constants: bad perturbation settings");
  check_positive_list(threshold.eps_list, "threshold.eps_list");
  if (threshold.tau && !(*threshold.tau > 0.5 && *threshold.tau < 1.0))
    throw ConfigError("threshold.tau must lie in (1/2, 1)");
  if (threshold.n_nodes < 64) throw ConfigError("threshold.n_nodes must be at least 64");
  if (!(threshold.radius_factor >= 2.0)) throw ConfigError("threshold.radius_factor must be >= 2");
  check_positive_list(prop22.eps_list, "prop22.eps_list");
  if (prop22.eps_list.size() < 2) throw ConfigError("prop22.eps_list needs at least two values");
  check_positive_list(prop22.t_exponents, "prop22.t_exponents");
  if (prop22.radius && !(*prop22.radius > 0.0)) throw ConfigError("prop22.radius must be positive");
  if (!(prop22.tau > 0.5 && prop22.tau < 1.0)) throw ConfigError("prop22.tau must lie in (1/2, 1)");
  for (double R : translate.R_list)
    if (R < 0.0) throw ConfigError("translate.R_list entries must be nonnegative");
  check_positive_list(translate.lemma45_R, "translate.lemma45_R");
  if (!(translate.mu_hat > 0.0)) throw ConfigError("translate.mu_hat must be positive");
  const auto& e = energy_curve;
  if (e.direction != "gaussian" && e.direction != "bubble" && e.direction != "zero" && e.direction != "file")
    throw ConfigError("energy_curve.direction must be gaussian, bubble, zero or file");
  if (e.direction == "file" && e.file.empty()) throw ConfigError("energy_curve.file is required for direction 'file'");
  if (e.functional != "limit" && e.functional != "full")
    throw ConfigError("energy_curve.functional must be 'limit' or 'full'");
  if (!(e.width > 0.0)) throw ConfigError("energy_curve.width must be positive");
  if (!(e.t_max > e.t_min && e.t_min >= 0.0) || e.count < 2) throw ConfigError("energy_curve: bad t range");
}

json RunConfig::to_json() const {
  json g = std::visit(
      [](const auto& f) -> json {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, SqrtPower>)
          return {{"kind", "sqrt_power"}, {"q", f.q}};
        else
          return {{"kind", "plain_power"}, {"alpha", f.alpha}};
      },
      model.g);
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  return {
      {"format_version", kFormatVersion},
      {"model",
       {{"dimension", model.dimension},
        {"mu", model.mu},
        {"g_family", g},
        {"h_family", {{"kind", "exp_weighted_power"}, {"q_h", model.h.q_h}, {"nu", model.h.nu}}},
        {"a_family", {{"kind", "exp_well"}, {"k", model.a.k}, {"nu", model.a.nu}}},
        {"mu_tilde", model.mu_tilde},
        {"p", model.p},
        {"gamma", model.gamma},
        {"fault", model.fault == Fault::none ? "none" : "negate_g_derivative"}}},
      {"grid", grid_json(grid)},
      {"solver",
       {{"max_iters", solver.max_iters},
        {"step0", solver.step0},
        {"armijo_c", solver.armijo_c},
        {"grad_tol", solver.grad_tol},
        {"nehari_every", solver.nehari_every},
        {"decay_lo", solver.decay_lo},
        {"decay_hi", solver.decay_hi}}},
      {"axioms",
       {{"points", axioms.points},
        {"t_min", axioms.t_min},
        {"t_max", axioms.t_max},
        {"x_max", axioms.x_max},
        {"x_count", axioms.x_count},
        {"s_max", axioms.s_max},
        {"tolerance", axioms.tolerance},
        {"fit_headroom", axioms.fit_headroom}}},
      {"constants",
       {{"grid", grid_json(constants.grid)},
        {"perturbations", constants.perturbations},
        {"perturbation_size", constants.perturbation_size}}},
      {"threshold",
       {{"eps_list", threshold.eps_list},
        {"tau", opt(threshold.tau)},
        {"n_nodes", threshold.n_nodes},
        {"radius_factor", threshold.radius_factor}}},
      {"prop22",
       {{"eps_list", prop22.eps_list},
        {"t_exponents", prop22.t_exponents},
        {"radius", opt(prop22.radius)},
        {"tau", prop22.tau}}},
      {"translate",
       {{"R_list", translate.R_list},
        {"lemma45_R", translate.lemma45_R},
        {"mu_hat", translate.mu_hat},
        {"control_t", translate.control_t},
        {"ground_state", translate.ground_state}}},
      {"energy_curve",
       {{"direction", energy_curve.direction},
        {"width", energy_curve.width},
        {"file", energy_curve.file},
        {"functional", energy_curve.functional},
        {"t_min", energy_curve.t_min},
        {"t_max", energy_curve.t_max},
        {"count", energy_curve.count}}},
      {"seed", seed},
      {"kernel_cache", kernel_cache},
  };
}

}  // namespace choq
