#pragma once

#include "kshock/fixed_point.hpp"
#include "kshock/galerkin.hpp"
#include "kshock/theorem.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kshock {

// Flat key-value configuration with sections, e.g.
//   [system]  backend = synthetic | boltzmann
//   [synthetic] model = jin_xin | broadwell | dense
//   [shock]   epsilons = 0.1, 0.05, 0.025
// Unknown keys are rejected.
struct RunConfig
{
  std::string backend = "synthetic";
  std::string model = "broadwell";

  double jx_a = 1.0, jx_kappa = 1.0, jx_gamma = 1.0;
  double bw_f_plus = 0.5, bw_f_minus = 0.3;
  std::optional<double> bw_frame_speed;  // empty: sonic frame

  // Dense synthetic system: row-major A (m x m), T (m*m x m), C (m x m), d, reference, metric.
  int dense_n = 0, dense_r = 0;
  std::vector<double> dense_A, dense_T, dense_C, dense_d, dense_reference, dense_metric;

  int degree = 4;
  double density = 1.0, energy = 0.75;
  std::optional<Vec3> velocity;  // empty: sonic along xi_1
  int grid_n = 8;
  double grid_radius = 5.0;
  int residual_samples = 3;
  std::vector<int> ranks{3, 4, 5, 6};

  std::vector<double> epsilons{0.1, 0.05, 0.025};
  std::optional<double> epsilon;  // single solve; empty: the largest in epsilons
  int nodes = 601;
  double half_length = 0.0;

  double s = 0.5;
  std::vector<double> bootstrap{0.6, 0.75, 0.9};
  double delta0 = 1.0;

  double fp_tol = 1e-10;
  double lin_tol = 1e-9;
  int max_iter = 40;
  bool viscous = false;

  unsigned seed = 1;
  std::string out = "out";

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);
  void check() const;
  double solve_epsilon() const;
  nlohmann::json to_json() const;
};

struct Backend
{
  RelaxationSystem system;
  std::shared_ptr<const GalerkinSystem> galerkin;  // boltzmann only
  std::vector<std::string> fluid_names;
};
Backend make_backend(const RunConfig& cfg);
FluidState reference_state(const RunConfig& cfg);

struct SolveOptions
{
  int nodes = 601;
  double half_length = 0.0;
  double delta0 = 1.0;
  bool correction = true;
  FixedPointOptions fp;
};
SolveOptions solve_options(const RunConfig& cfg);

// Re-run of a converged Galerkin solve with the H^s norm.
struct BootstrapRow
{
  double s = 0.5;
  double lambda = 0.0;
  double delta = 0.0;        // weighted coercivity gap
  int iterations = 0;
  double macro_difference = 0.0;  // max_x |u_s - u_{1/2}| in fluid variables
  LocalizationFit localization;
};

// One standing shock of amplitude epsilon: Hugoniot endstates, NS profile,
// approximate profile, fixed point and diagnostics.
struct ShockRun
{
  double epsilon = 0.0;
  ShockSpec spec;
  NSProfile ns;
  ApproximateProfile approx;
  Vec phase;
  double delta = 0.0;  // 1/2 min(delta0, theta_hat / (2 eps))
  double ce_residual = 0.0;
  double equation_residual = 0.0;  // relative residual of the fixed-point equation
  FixedPointResult fp;
  ProfileDiagnostics diag;
  std::shared_ptr<const ProfileOperator> op;
  std::optional<NodalResidual> nodal;   // boltzmann only
  std::vector<BootstrapRow> boot;       // boltzmann only
};
ShockRun run_shock(const ReducedSystem& red, const SlowField& slow, double eps, const SolveOptions& opt);

std::vector<BootstrapRow> bootstrap(const GalerkinSystem& g, const ReducedSystem& red, const ShockRun& run,
                                    const std::vector<double>& weights, const SolveOptions& opt);

// Nodal residual and H^s bootstrap of a Galerkin run.
void boltzmann_extras(const Backend& backend, const ReducedSystem& red, ShockRun& run, const RunConfig& cfg);

nlohmann::json theorem_report(const Backend& backend, const ShockRun& run, const RunConfig& cfg);
void write_profile_csv(const std::string& path, const Backend& backend, const ShockRun& run);

// Order fits over a sweep; rows are sorted by decreasing epsilon.
struct SweepSummary
{
  std::vector<double> epsilons;
  std::vector<nlohmann::json> reports;
  nlohmann::json orders;
};
SweepSummary summarize(const std::vector<ShockRun>& runs);
void write_sweep_csv(const std::string& path, const std::vector<ShockRun>& runs);

// Consolidated Markdown and CSV summary of the JSON reports in a directory.
void write_report(const std::string& dir);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace kshock
