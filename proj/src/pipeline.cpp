#include "kshock/pipeline.hpp"

#include "kshock/macro_micro.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace kshock {

namespace {

namespace pt = boost::property_tree;

double to_double(const std::string& key, const std::string& text)
{
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  require(used == text.size() && !text.empty(), ErrorKind::config, key + ": not a number: '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text)
{
  const double v = to_double(key, text);
  require(v == std::floor(v) && std::abs(v) < 1e9, ErrorKind::config, key + ": not an integer: '" + text + "'");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text)
{
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorKind::config, key + ": not a boolean: '" + text + "'");
}

std::vector<double> to_list(const std::string& key, std::string text)
{
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> out;
  for (std::string tok; in >> tok;) out.push_back(to_double(key, tok));
  return out;
}

double max_norm(const Profile& p)
{
  double m = 0.0;
  for (const auto& v : p) m = std::max(m, v.norm());
  return m;
}

double max_matrix_norm(const std::vector<Mat>& M)
{
  double m = 0.0;
  for (const auto& a : M) m = std::max(m, a.norm());
  return m;
}

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json vec_json(const std::vector<double>& v)
{
  nlohmann::json j = nlohmann::json::array();
  for (double x : v) j.push_back(number(x));
  return j;
}

nlohmann::json vec_json(const Vec& v) { return vec_json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

RunConfig RunConfig::parse(const std::string& text)
{
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::config, std::string("config: ") + e.what());
  }
  RunConfig c;
  std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters{
      {"system.backend", [&](auto&, auto& v) { c.backend = v; }},
      {"synthetic.model", [&](auto&, auto& v) { c.model = v; }},
      {"synthetic.a", [&](auto& k, auto& v) { c.jx_a = to_double(k, v); }},
      {"synthetic.kappa", [&](auto& k, auto& v) { c.jx_kappa = to_double(k, v); }},
      {"synthetic.gamma", [&](auto& k, auto& v) { c.jx_gamma = to_double(k, v); }},
      {"synthetic.f_plus", [&](auto& k, auto& v) { c.bw_f_plus = to_double(k, v); }},
      {"synthetic.f_minus", [&](auto& k, auto& v) { c.bw_f_minus = to_double(k, v); }},
      {"synthetic.frame_speed",
       [&](auto& k, auto& v) {
         if (v == "sonic")
           c.bw_frame_speed.reset();
         else
           c.bw_frame_speed = to_double(k, v);
       }},
      {"dense.n", [&](auto& k, auto& v) { c.dense_n = to_int(k, v); }},
      {"dense.r", [&](auto& k, auto& v) { c.dense_r = to_int(k, v); }},
      {"dense.A", [&](auto& k, auto& v) { c.dense_A = to_list(k, v); }},
      {"dense.T", [&](auto& k, auto& v) { c.dense_T = to_list(k, v); }},
      {"dense.C", [&](auto& k, auto& v) { c.dense_C = to_list(k, v); }},
      {"dense.d", [&](auto& k, auto& v) { c.dense_d = to_list(k, v); }},
      {"dense.reference", [&](auto& k, auto& v) { c.dense_reference = to_list(k, v); }},
      {"dense.metric", [&](auto& k, auto& v) { c.dense_metric = to_list(k, v); }},
      {"boltzmann.degree", [&](auto& k, auto& v) { c.degree = to_int(k, v); }},
      {"boltzmann.density", [&](auto& k, auto& v) { c.density = to_double(k, v); }},
      {"boltzmann.energy", [&](auto& k, auto& v) { c.energy = to_double(k, v); }},
      {"boltzmann.velocity",
       [&](auto& k, auto& v) {
         if (v == "sonic") {
           c.velocity.reset();
           return;
         }
         const auto l = to_list(k, v);
         require(l.size() == 3, ErrorKind::config, k + ": need three components");
         c.velocity = Vec3(l[0], l[1], l[2]);
       }},
      {"boltzmann.grid_n", [&](auto& k, auto& v) { c.grid_n = to_int(k, v); }},
      {"boltzmann.grid_radius", [&](auto& k, auto& v) { c.grid_radius = to_double(k, v); }},
      {"boltzmann.residual_samples", [&](auto& k, auto& v) { c.residual_samples = to_int(k, v); }},
      {"boltzmann.ranks",
       [&](auto& k, auto& v) {
         c.ranks.clear();
         for (double d : to_list(k, v)) {
           require(d == std::floor(d), ErrorKind::config, k + ": ranks must be integers");
           c.ranks.push_back(static_cast<int>(d));
         }
       }},
      {"shock.epsilons", [&](auto& k, auto& v) { c.epsilons = to_list(k, v); }},
      {"shock.epsilon", [&](auto& k, auto& v) { c.epsilon = to_double(k, v); }},
      {"shock.nodes", [&](auto& k, auto& v) { c.nodes = to_int(k, v); }},
      {"shock.half_length", [&](auto& k, auto& v) { c.half_length = to_double(k, v); }},
      {"weights.s", [&](auto& k, auto& v) { c.s = to_double(k, v); }},
      {"weights.bootstrap", [&](auto& k, auto& v) { c.bootstrap = to_list(k, v); }},
      {"weights.delta0", [&](auto& k, auto& v) { c.delta0 = to_double(k, v); }},
      {"solver.fp_tol", [&](auto& k, auto& v) { c.fp_tol = to_double(k, v); }},
      {"solver.lin_tol", [&](auto& k, auto& v) { c.lin_tol = to_double(k, v); }},
      {"solver.max_iter", [&](auto& k, auto& v) { c.max_iter = to_int(k, v); }},
      {"solver.viscous", [&](auto& k, auto& v) { c.viscous = to_bool(k, v); }},
      {"run.seed", [&](auto& k, auto& v) { c.seed = static_cast<unsigned>(to_int(k, v)); }},
      {"run.out", [&](auto&, auto& v) { c.out = v; }},
  };
  for (const auto& [section, body] : tree) {
    require(!body.empty() || body.data().empty(), ErrorKind::config, "config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      auto it = setters.find(full);
      require(it != setters.end(), ErrorKind::config, "config: unknown key '" + full + "'");
      it->second(full, value.data());
    }
  }
  c.check();
  return c;
}

RunConfig RunConfig::load(const std::string& path)
{
  std::ifstream in(path);
  require(in.good(), ErrorKind::config, "config: cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

double RunConfig::solve_epsilon() const { return epsilon ? *epsilon : epsilons.front(); }

void RunConfig::check() const
{
  require(backend == "synthetic" || backend == "boltzmann", ErrorKind::config,
          "config: backend must be synthetic or boltzmann, got '" + backend + "'");
  if (backend == "synthetic")
    require(model == "jin_xin" || model == "broadwell" || model == "dense", ErrorKind::config,
            "config: synthetic model must be jin_xin, broadwell or dense, got '" + model + "'");
  require(!epsilons.empty(), ErrorKind::config, "config: empty epsilon list");
  for (double e : epsilons) require(e > 0.0, ErrorKind::config, "degenerate shock: epsilon must be positive");
  for (size_t i = 1; i < epsilons.size(); ++i)
    require(epsilons[i] < epsilons[i - 1], ErrorKind::config, "config: epsilon list must be strictly decreasing");
  if (epsilon) require(*epsilon > 0.0, ErrorKind::config, "degenerate shock: epsilon must be positive");
  require(fp_tol > 0.0 && lin_tol > 0.0, ErrorKind::config, "config: tolerances must be positive");
  require(max_iter > 0, ErrorKind::config, "config: max_iter must be positive");
  require(nodes >= 11 && nodes % 2 == 1, ErrorKind::config, "config: nodes must be odd and at least 11");
  require(half_length >= 0.0, ErrorKind::config, "config: half_length must be nonnegative");
  require(s >= 0.5 && s < 1.0, ErrorKind::config, "config: weight s must lie in [1/2, 1)");
  for (double b : bootstrap) require(b > 0.5 && b < 1.0, ErrorKind::config, "config: bootstrap weights must lie in (1/2, 1)");
  require(delta0 > 0.0, ErrorKind::config, "config: delta0 must be positive");
  require(degree >= 3, ErrorKind::config, "config: Galerkin degree must be at least 3");
  for (size_t i = 0; i < ranks.size(); ++i) {
    require(ranks[i] >= 3, ErrorKind::config, "config: ranks must be at least 3");
    if (i) require(ranks[i] > ranks[i - 1], ErrorKind::config, "config: ranks must be increasing");
  }
  require(grid_n >= 4 && grid_radius > 0.0 && residual_samples >= 1, ErrorKind::config, "config: bad velocity grid");
  require(density > 0.0 && energy > 0.0, ErrorKind::config, "config: reference state needs positive density and energy");
  if (backend == "synthetic" && model == "dense") {
    const int m = dense_n + dense_r;
    require(dense_n > 0 && dense_r > 0, ErrorKind::config, "config: dense system needs n and r");
    require(static_cast<int>(dense_A.size()) == m * m, ErrorKind::config, "config: dense.A needs m*m entries");
    require(static_cast<int>(dense_T.size()) == m * m * m, ErrorKind::config, "config: dense.T needs m^3 entries");
    require(dense_C.empty() || static_cast<int>(dense_C.size()) == m * m, ErrorKind::config,
            "config: dense.C needs m*m entries");
    require(dense_d.empty() || static_cast<int>(dense_d.size()) == m, ErrorKind::config, "config: dense.d needs m entries");
    require(dense_reference.empty() || static_cast<int>(dense_reference.size()) == m, ErrorKind::config,
            "config: dense.reference needs m entries");
    require(dense_metric.empty() || static_cast<int>(dense_metric.size()) == m * m, ErrorKind::config,
            "config: dense.metric needs m*m entries");
  }
}

nlohmann::json RunConfig::to_json() const
{
  nlohmann::json j;
  j["backend"] = backend;
  if (backend == "synthetic") {
    j["model"] = model;
    if (model == "jin_xin") j["jin_xin"] = {{"a", jx_a}, {"kappa", jx_kappa}, {"gamma", jx_gamma}};
    if (model == "broadwell")
      j["broadwell"] = {{"f_plus", bw_f_plus},
                        {"f_minus", bw_f_minus},
                        {"frame_speed", bw_frame_speed ? nlohmann::json(*bw_frame_speed) : nlohmann::json("sonic")}};
    if (model == "dense") j["dense"] = {{"n", dense_n}, {"r", dense_r}};
  } else {
    j["boltzmann"] = {{"degree", degree},
                      {"density", density},
                      {"energy", energy},
                      {"velocity", velocity ? vec_json(Vec(*velocity)) : nlohmann::json("sonic")},
                      {"grid_n", grid_n},
                      {"grid_radius", grid_radius},
                      {"residual_samples", residual_samples},
                      {"ranks", ranks}};
  }
  j["shock"] = {{"epsilons", epsilons}, {"nodes", nodes}, {"half_length", half_length}};
  if (epsilon) j["shock"]["epsilon"] = *epsilon;
  j["weights"] = {{"s", s}, {"bootstrap", bootstrap}, {"delta0", delta0}};
  j["solver"] = {{"fp_tol", fp_tol}, {"lin_tol", lin_tol}, {"max_iter", max_iter}, {"viscous", viscous}};
  j["seed"] = seed;
  return j;
}

FluidState reference_state(const RunConfig& cfg)
{
  const double T = 2.0 * cfg.energy / 3.0;
  const Vec3 v = cfg.velocity ? *cfg.velocity : Vec3(std::sqrt(5.0 * T / 3.0), 0.0, 0.0);
  return FluidState::from_primitive(cfg.density, v, cfg.energy);
}

Backend make_backend(const RunConfig& cfg)
{
  cfg.check();
  Backend b;
  if (cfg.backend == "boltzmann") {
    auto g = std::make_shared<GalerkinSystem>(build_galerkin(cfg.degree, reference_state(cfg)));
    b.system = from_galerkin(*g);
    b.galerkin = g;
    b.fluid_names = {"rho", "m1", "m2", "m3", "E"};
    return b;
  }
  if (cfg.model == "jin_xin") {
    b.system = make_jin_xin(cfg.jx_a, cfg.jx_kappa, cfg.jx_gamma);
  } else if (cfg.model == "broadwell") {
    const double speed = cfg.bw_frame_speed ? *cfg.bw_frame_speed : broadwell_sonic_speed(cfg.bw_f_plus, cfg.bw_f_minus);
    b.system = make_broadwell({cfg.bw_f_plus, cfg.bw_f_minus, speed});
  } else {
    const int n = cfg.dense_n, r = cfg.dense_r, m = n + r;
    auto rowmajor = [](const std::vector<double>& v, int rows, int cols) {
      Mat M(rows, cols);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = v[i * cols + j];
      return M;
    };
    RelaxationSystem& s = b.system;
    s.name = "dense";
    s.n = n;
    s.r = r;
    s.A = rowmajor(cfg.dense_A, m, m);
    s.Q.T = rowmajor(cfg.dense_T, m * m, m);
    s.Q.C = cfg.dense_C.empty() ? Mat::Zero(m, m) : rowmajor(cfg.dense_C, m, m);
    s.Q.d = cfg.dense_d.empty() ? Vec::Zero(m) : Vec(Eigen::Map<const Vec>(cfg.dense_d.data(), m));
    s.reference = cfg.dense_reference.empty() ? Vec::Zero(m) : Vec(Eigen::Map<const Vec>(cfg.dense_reference.data(), m));
    s.metric = cfg.dense_metric.empty() ? Mat::Identity(m, m) : rowmajor(cfg.dense_metric, m, m);
    s.fluid_map = Mat::Identity(n, n);
    s.check();
  }
  for (int i = 0; i < b.system.n; ++i) b.fluid_names.push_back("u" + std::to_string(i + 1));
  return b;
}

SolveOptions solve_options(const RunConfig& cfg)
{
  SolveOptions o;
  o.nodes = cfg.nodes;
  o.half_length = cfg.half_length;
  o.delta0 = cfg.delta0;
  o.fp.tol = cfg.fp_tol;
  o.fp.max_iter = cfg.max_iter;
  o.fp.viscous = cfg.viscous;
  return o;
}

ShockRun run_shock(const ReducedSystem& red, const SlowField& slow, double eps, const SolveOptions& opt)
{
  require(eps > 0.0, ErrorKind::config, "degenerate shock: epsilon must be positive");
  const RelaxationSystem& sys = red.system();
  ShockRun run;
  run.epsilon = eps;
  run.spec = hugoniot_connect(red, slow, eps);
  NSOptions o;
  o.nodes = opt.nodes;
  o.half_length = opt.half_length;
  run.ns = solve_ns_profile(red, run.spec, slow.l, o);
  run.approx = build_approximate(red, run.ns, opt.correction);
  run.phase = choose_phase_vector(slow);
  auto op = std::make_shared<ProfileOperator>(sys, run.approx, run.phase);
  run.op = op;
  run.delta = 0.5 * std::min(opt.delta0, run.ns.theta_hat / (2.0 * eps));
  FixedPointOptions fo = opt.fp;
  fo.delta = run.delta;
  run.fp = iterate(sys, run.approx, *op, fo);
  run.ce_residual = max_norm(run.approx.residual);
  Sources F;
  F.f.assign(run.approx.size(), Vec::Zero(sys.n));
  F.g = iteration_source(sys, run.approx, run.fp.U);
  run.equation_residual = op->relative_residual(run.fp.U, F);
  run.diag = diagnose(red, run.approx, run.fp.f, run.delta);
  return run;
}

std::vector<BootstrapRow> bootstrap(const GalerkinSystem& g, const ReducedSystem& red, const ShockRun& run,
                                    const std::vector<double>& weights, const SolveOptions& opt)
{
  const RelaxationSystem& sys = red.system();
  const int c = run.approx.center;
  const Vec fluid = sys.fluid_map * run.ns.u[c];
  const Vec5 w5 = Eigen::Map<const Vec5>(fluid.data());
  const Vec dev = run.fp.f[c] - g.maxwellian_coefficients(FluidState::from_vec(w5));
  std::vector<BootstrapRow> rows;
  for (double s : weights) {
    BootstrapRow row;
    row.s = s;
    const CoercivityReport cr = weighted_coercivity(g, s);
    row.lambda = cr.lambda;
    row.delta = cr.delta;
    FixedPointOptions fo = opt.fp;
    fo.delta = run.delta;
    fo.metric = g.gram_s(s);
    const FixedPointResult r = iterate(sys, run.approx, *run.op, fo);
    row.iterations = r.iterations;
    for (int i = 0; i < run.approx.size(); ++i)
      row.macro_difference =
          std::max(row.macro_difference, (sys.fluid_map * (r.f[i].head(sys.n) - run.fp.f[i].head(sys.n))).norm());
    row.localization = localization(g, dev, s);
    rows.push_back(row);
  }
  return rows;
}

void boltzmann_extras(const Backend& backend, const ReducedSystem& red, ShockRun& run, const RunConfig& cfg)
{
  require(backend.galerkin != nullptr, ErrorKind::config, "Galerkin extras need the boltzmann backend");
  const GalerkinSystem& g = *backend.galerkin;
  VelocitySpace space(build_grid(cfg.grid_n, cfg.grid_radius, 4), reference_state(cfg));
  CollisionOperator op(space);
  run.nodal = nodal_kinetic_residual(g, op, run.approx.x, run.fp.f, cfg.residual_samples);
  std::vector<double> weights{cfg.s};
  for (double b : cfg.bootstrap)
    if (b != cfg.s) weights.push_back(b);
  run.boot = bootstrap(g, red, run, weights, solve_options(cfg));
}

nlohmann::json theorem_report(const Backend& backend, const ShockRun& run, const RunConfig& cfg)
{
  const auto& fp = run.fp;
  nlohmann::json j;
  j["kind"] = "theorem_report";
  j["system"] = backend.system.name;
  j["epsilon"] = run.epsilon;
  j["nodes"] = run.approx.size();
  j["half_length"] = run.ns.half_length;
  j["delta"] = run.delta;
  j["shock"] = {{"u_minus", vec_json(run.spec.u_minus)},
                {"u_plus", vec_json(run.spec.u_plus)},
                {"rh_residual", run.spec.rh_residual}};
  const DecayFit ns_fit = fit_profile_decay(run.ns);
  j["ns_profile"] = {{"theta_hat", run.ns.theta_hat},
                     {"iterations", run.ns.iterations},
                     {"residual", run.ns.residual},
                     {"decay_rate", ns_fit.rate()},
                     {"max_derivative", max_derivative(run.ns)}};
  j["ce_residual"] = run.ce_residual;
  j["m_norm"] = max_matrix_norm(run.approx.M);
  j["fixed_point"] = {{"converged", fp.converged},
                      {"iterations", fp.iterations},
                      {"steps", vec_json(fp.steps)},
                      {"factors", vec_json(fp.factors)},
                      {"first_norm", fp.first_norm},
                      {"corrector_norm", fp.corrector_norm},
                      {"ball_radius", fp.ball_radius},
                      {"phase", fp.phase},
                      {"equation_residual", number(run.equation_residual)}};
  j["kinetic_residual"] = {{"row_one", fp.residual.row_one}, {"row_two", fp.residual.row_two}};
  j["diagnostics"] = {{"max_du", run.diag.max_du},
                      {"attach0", run.diag.attach0},
                      {"attach1", run.diag.attach1},
                      {"decay_left", run.diag.decay_left},
                      {"decay_right", run.diag.decay_right}};
  nlohmann::json checks;
  checks["converged"] = fp.converged;
  bool contract = true;
  for (size_t k = 1; k < fp.factors.size(); ++k) contract = contract && fp.factors[k] < 1.0;
  checks["contraction_after_iterate_2"] = contract;
  checks["within_ball"] = fp.corrector_norm <= fp.ball_radius;
  checks["rh_residual"] = run.spec.rh_residual <= 1e-10;
  if (run.nodal) {
    const double ratio = run.nodal->residual / run.nodal->quadrature_error;
    j["nodal_residual"] = {{"residual", run.nodal->residual},
                           {"quadrature_error", run.nodal->quadrature_error},
                           {"ratio", ratio},
                           {"nodes", run.nodal->nodes},
                           {"grid_n", cfg.grid_n}};
    checks["kinetic_residual"] = ratio <= 10.0;
  } else {
    checks["kinetic_residual"] = std::max(fp.residual.row_one, fp.residual.row_two) <= 1e-7;
  }
  if (!run.boot.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    bool same = true, monotone = true;
    for (size_t k = 0; k < run.boot.size(); ++k) {
      const auto& b = run.boot[k];
      rows.push_back({{"s", b.s},
                      {"lambda", b.lambda},
                      {"coercivity", b.delta},
                      {"iterations", b.iterations},
                      {"macro_difference", b.macro_difference},
                      {"exponent", b.localization.exponent},
                      {"raw_exponent", b.localization.raw_exponent},
                      {"norm", b.localization.norm}});
      same = same && b.macro_difference <= 10.0 * cfg.fp_tol;
      if (k) monotone = monotone && b.localization.exponent > run.boot[k - 1].localization.exponent;
    }
    j["bootstrap"] = rows;
    checks["bootstrap_same_macro_profile"] = same;
    checks["localization_monotone"] = monotone;
    checks["localization_gain"] = run.boot.back().localization.exponent >= 1.5 * run.boot.front().localization.exponent;
  }
  bool all = true;
  for (const auto& [k, v] : checks.items()) all = all && v.get<bool>();
  j["checks"] = checks;
  j["pass"] = all;
  return j;
}

void write_profile_csv(const std::string& path, const Backend& backend, const ShockRun& run)
{
  std::ofstream out(path);
  require(out.good(), ErrorKind::config, "cannot write " + path);
  out << std::setprecision(17);
  const RelaxationSystem& sys = backend.system;
  out << "x";
  for (const auto& n : backend.fluid_names) out << ',' << n;
  out << ",micro_norm,residual\n";
  for (int i = 0; i < run.approx.size(); ++i) {
    const Vec w = sys.fluid_map * run.fp.f[i].head(sys.n);
    out << run.approx.x(i);
    for (int k = 0; k < w.size(); ++k) out << ',' << w(k);
    out << ',' << run.fp.f[i].tail(sys.r).norm() << ',' << run.fp.residual.per_node(i) << '\n';
  }
}

SweepSummary summarize(const std::vector<ShockRun>& runs)
{
  SweepSummary s;
  std::vector<double> du, a0, a1, corr, first, ce, mn, deriv, rate;
  for (const auto& r : runs) {
    s.epsilons.push_back(r.epsilon);
    du.push_back(r.diag.max_du);
    a0.push_back(r.diag.attach0);
    a1.push_back(r.diag.attach1);
    corr.push_back(r.fp.corrector_norm);
    first.push_back(r.fp.first_norm);
    ce.push_back(r.ce_residual);
    mn.push_back(max_matrix_norm(r.approx.M));
    deriv.push_back(max_derivative(r.ns));
    rate.push_back(fit_profile_decay(r.ns).rate());
  }
  auto ratios = [](const std::vector<double>& v) {
    std::vector<double> q;
    for (size_t k = 0; k + 1 < v.size(); ++k) q.push_back(v[k] / v[k + 1]);
    return q;
  };
  nlohmann::json& o = s.orders;
  const auto& e = s.epsilons;
  o["max_du"] = fit_order(e, du);
  o["attach0"] = fit_order(e, a0);
  o["attach1"] = fit_order(e, a1);
  o["corrector_norm"] = fit_order(e, corr);
  o["first_norm"] = fit_order(e, first);
  o["ce_residual"] = fit_order(e, ce);
  o["m_norm"] = fit_order(e, mn);
  o["ns_max_derivative"] = fit_order(e, deriv);
  o["ns_decay_rate"] = fit_order(e, rate);
  o["ratios"] = {{"corrector_norm", vec_json(ratios(corr))},
                 {"m_norm", vec_json(ratios(mn))},
                 {"ns_max_derivative", vec_json(ratios(deriv))},
                 {"ns_decay_rate", vec_json(ratios(rate))}};
  nlohmann::json checks;
  auto all_in = [](const std::vector<double>& q, double lo, double hi) {
    return std::all_of(q.begin(), q.end(), [&](double x) { return x >= lo && x <= hi; });
  };
  checks["max_du_order"] = o["max_du"].get<double>() >= 1.7;
  checks["attach0_order"] = o["attach0"].get<double>() >= 0.7;
  checks["attach1_order"] = o["attach1"].get<double>() >= 1.7;
  checks["ce_residual_order"] = o["ce_residual"].get<double>() >= 2.7;
  checks["corrector_ratio"] = all_in(ratios(corr), 3.0, 5.0);
  checks["m_norm_ratio"] = all_in(ratios(mn), 4.0 * 0.7, 4.0 * 1.3);
  checks["ns_derivative_ratio"] = all_in(ratios(deriv), 4.0 * 0.75, 4.0 * 1.25);
  checks["ns_decay_ratio"] = all_in(ratios(rate), 2.0 * 0.9, 2.0 * 1.1);
  bool all = true;
  for (const auto& [k, v] : checks.items()) all = all && v.get<bool>();
  o["checks"] = checks;
  o["pass"] = all;
  return s;
}

void write_sweep_csv(const std::string& path, const std::vector<ShockRun>& runs)
{
  std::ofstream out(path);
  require(out.good(), ErrorKind::config, "cannot write " + path);
  out << std::setprecision(17);
  out << "epsilon,iterations,first_norm,corrector_norm,ball_radius,max_du,attach0,attach1,ns_decay_rate,"
         "ns_max_derivative,ce_residual,m_norm,kinetic_residual\n";
  for (const auto& r : runs)
    out << r.epsilon << ',' << r.fp.iterations << ',' << r.fp.first_norm << ',' << r.fp.corrector_norm << ','
        << r.fp.ball_radius << ',' << r.diag.max_du << ',' << r.diag.attach0 << ',' << r.diag.attach1 << ','
        << fit_profile_decay(r.ns).rate() << ',' << max_derivative(r.ns) << ',' << r.ce_residual << ','
        << max_matrix_norm(r.approx.M) << ',' << std::max(r.fp.residual.row_one, r.fp.residual.row_two) << '\n';
}

void write_json(const std::string& path, const nlohmann::json& j)
{
  std::ofstream out(path);
  require(out.good(), ErrorKind::config, "cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_report(const std::string& dir)
{
  namespace fs = std::filesystem;
  require(fs::is_directory(dir), ErrorKind::config, "report: not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::ofstream md(fs::path(dir) / "summary.md");
  std::ofstream csv(fs::path(dir) / "summary.csv");
  require(md.good() && csv.good(), ErrorKind::config, "report: cannot write into " + dir);
  csv << "file,check,pass\n";
  md << "# Run summary\n\n";
  for (const auto& f : files) {
    std::ifstream in(f);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception&) {
      continue;
    }
    const std::string name = f.filename().string();
    const nlohmann::json* checks = nullptr;
    if (j.contains("checks") && j["checks"].is_object()) checks = &j["checks"];
    if (j.contains("orders") && j["orders"].contains("checks")) checks = &j["orders"]["checks"];
    md << "## " << name << "\n\n";
    if (j.contains("epsilon")) md << "epsilon = " << j["epsilon"].dump() << "\n\n";
    if (j.contains("checks") && j["checks"].is_array()) {
      md << "| check | pass | value |\n|---|---|---|\n";
      for (const auto& c : j["checks"]) {
        md << "| " << c["id"].get<std::string>() << " | " << (c["pass"].get<bool>() ? "yes" : "no") << " | "
           << c["value"].dump() << " |\n";
        csv << name << ',' << c["id"].get<std::string>() << ',' << c["pass"].dump() << '\n';
      }
      md << '\n';
    } else if (checks) {
      md << "| check | pass |\n|---|---|\n";
      for (const auto& [k, v] : checks->items()) {
        md << "| " << k << " | " << (v.get<bool>() ? "yes" : "no") << " |\n";
        csv << name << ',' << k << ',' << v.dump() << '\n';
      }
      md << '\n';
    }
    if (j.contains("orders")) {
      md << "| quantity | fitted order |\n|---|---|\n";
      for (const auto& [k, v] : j["orders"].items())
        if (v.is_number()) md << "| " << k << " | " << v.dump() << " |\n";
      md << '\n';
    }
  }
}

}  // namespace kshock
