#pragma once

#include "kshock/pipeline.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace kshock {

struct RankRow
{
  int degree = 0;
  int size = 0;
  double negativity = 0.0;        // coercivity gap of L on V at s = 1/2
  double gamma = 0.0;             // Kawashima constant at the selected theta
  double theta = 0.0;
  double macro_positivity = 0.0;  // min eigenvalue of sym(K A) on U
};

// Per-rank dissipation constants and their uniformity: the minimum over the
// top three ranks is at least half the median, and the macro-block
// positivity varies by at most 20% of its median.
struct UniformityReport
{
  std::vector<RankRow> rows;
  int r_star = -1;  // smallest degree from which gamma > 0 on every larger rank
  double median_negativity = 0.0, median_gamma = 0.0, macro_spread = 0.0;
  bool negativity_uniform = false, gamma_uniform = false, macro_uniform = false;
  bool pass = false;
  nlohmann::json to_json() const;
};
UniformityReport check_uniformity(const GalerkinLadder& ladder);

// Fixed-point profiles per rank on a common x-grid, in top-rank coordinates.
struct RankConvergence
{
  double epsilon = 0.0;
  std::vector<int> degrees, sizes, iterations;
  std::vector<double> corrector_norm;
  std::vector<double> difference;        // max_x |f_r - f_{r+1}|, one fewer than ranks
  std::vector<double> macro_difference;  // same for the fluid variables
  double tail_estimate = 0.0;            // geometric estimate of |f_top - f_limit|
  bool monotone = true;
  nlohmann::json to_json() const;
};
RankConvergence converge_in_r(const GalerkinLadder& ladder, double eps, SolveOptions opt);
void write_rank_csv(const std::string& path, const RankConvergence& c);

}  // namespace kshock
