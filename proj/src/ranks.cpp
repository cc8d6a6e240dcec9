#include "kshock/ranks.hpp"

#include "kshock/macro_micro.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace kshock {

namespace {

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_macro_directions(const GalerkinSystem& g)
{
  const int m = g.size();
  const double micro = g.moment.rightCols(m - 5).norm();
  Eigen::JacobiSVD<Mat> svd(g.moment.leftCols(5));
  const double smin = svd.singularValues()(4);
  require(micro <= 1e-10 * g.moment.norm() && smin > 1e-8 * svd.singularValues()(0), ErrorKind::assumption,
          "Galerkin ladder invariant violated at degree " + std::to_string(g.basis.degree()) +
              ": the leading five directions do not span the fluid moments");
}

}  // namespace

UniformityReport check_uniformity(const GalerkinLadder& ladder)
{
  UniformityReport rep;
  for (size_t i = 0; i < ladder.degrees.size(); ++i) {
    const GalerkinSystem g = ladder.rank(static_cast<int>(i));
    check_macro_directions(g);
    const Mat L = g.dq(g.reference);
    RankRow row;
    row.degree = ladder.degrees[i];
    row.size = g.size();
    row.negativity = coercivity_gap(L, galerkin_space(g, 0.5, 0.0)).delta;
    const Compensator c = build_compensator(g.A, L, g.W, 5);
    row.gamma = c.gamma;
    row.theta = c.theta;
    row.macro_positivity = Eigen::SelfAdjointEigenSolver<Mat>(macro_block(c, g.A)).eigenvalues()(0);
    rep.rows.push_back(row);
  }
  const int R = static_cast<int>(rep.rows.size());
  for (int i = R - 1; i >= 0 && rep.rows[i].gamma > 0.0; --i) rep.r_star = rep.rows[i].degree;
  std::vector<double> neg, gam, mac;
  for (const auto& r : rep.rows) {
    neg.push_back(r.negativity);
    gam.push_back(r.gamma);
    mac.push_back(r.macro_positivity);
  }
  rep.median_negativity = median(neg);
  rep.median_gamma = median(gam);
  const int top = std::max(0, R - 3);
  const double min_neg = *std::min_element(neg.begin() + top, neg.end());
  const double min_gam = *std::min_element(gam.begin() + top, gam.end());
  rep.negativity_uniform = min_neg > 0.0 && min_neg >= 0.5 * rep.median_negativity;
  rep.gamma_uniform = min_gam > 0.0 && min_gam >= 0.5 * rep.median_gamma;
  const double mmed = median(mac);
  rep.macro_spread = (*std::max_element(mac.begin(), mac.end()) - *std::min_element(mac.begin(), mac.end())) / mmed;
  rep.macro_uniform = mmed > 0.0 && rep.macro_spread <= 0.2;
  rep.pass = rep.negativity_uniform && rep.gamma_uniform && rep.macro_uniform;
  return rep;
}

nlohmann::json UniformityReport::to_json() const
{
  nlohmann::json j;
  j["kind"] = "uniformity";
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows)
    j["rows"].push_back({{"degree", r.degree},
                         {"size", r.size},
                         {"negativity", r.negativity},
                         {"gamma", r.gamma},
                         {"theta", r.theta},
                         {"macro_positivity", r.macro_positivity}});
  j["r_star"] = r_star;
  j["median_negativity"] = median_negativity;
  j["median_gamma"] = median_gamma;
  j["macro_spread"] = macro_spread;
  j["checks"] = {{"negativity_uniform", negativity_uniform},
                 {"gamma_uniform", gamma_uniform},
                 {"macro_uniform", macro_uniform}};
  j["pass"] = pass;
  return j;
}

RankConvergence converge_in_r(const GalerkinLadder& ladder, double eps, SolveOptions opt)
{
  RankConvergence out;
  out.epsilon = eps;
  const int top = ladder.top.size();
  std::vector<Profile> f;
  std::vector<Mat> fluid;
  for (size_t i = 0; i < ladder.degrees.size(); ++i) {
    const GalerkinSystem g = ladder.rank(static_cast<int>(i));
    check_macro_directions(g);
    ReducedSystem red(from_galerkin(g));
    const SlowField slow = slow_field(red, red.base());
    ShockRun run = run_shock(red, slow, eps, opt);
    require(run.fp.converged, ErrorKind::solver,
            "fixed point did not converge at degree " + std::to_string(ladder.degrees[i]));
    if (i == 0) opt.half_length = run.ns.half_length;
    Profile padded(run.fp.f.size(), Vec::Zero(top));
    for (size_t k = 0; k < padded.size(); ++k) padded[k].head(g.size()) = run.fp.f[k];
    f.push_back(std::move(padded));
    fluid.push_back(red.system().fluid_map);
    out.degrees.push_back(ladder.degrees[i]);
    out.sizes.push_back(g.size());
    out.iterations.push_back(run.fp.iterations);
    out.corrector_norm.push_back(run.fp.corrector_norm);
  }
  for (size_t i = 0; i + 1 < f.size(); ++i) {
    double d = 0.0, dm = 0.0;
    for (size_t k = 0; k < f[i].size(); ++k) {
      d = std::max(d, (f[i][k] - f[i + 1][k]).norm());
      dm = std::max(dm, (fluid[i] * f[i][k].head(5) - fluid[i + 1] * f[i + 1][k].head(5)).norm());
    }
    out.difference.push_back(d);
    out.macro_difference.push_back(dm);
  }
  for (size_t i = 1; i < out.difference.size(); ++i)
    out.monotone = out.monotone && out.difference[i] < out.difference[i - 1];
  if (out.difference.size() >= 2) {
    const double q = out.difference.back() / out.difference[out.difference.size() - 2];
    out.tail_estimate = q < 1.0 ? out.difference.back() * q / (1.0 - q) : std::nan("");
  }
  return out;
}

nlohmann::json RankConvergence::to_json() const
{
  nlohmann::json j;
  j["kind"] = "rank_convergence";
  j["epsilon"] = epsilon;
  j["degrees"] = degrees;
  j["sizes"] = sizes;
  j["iterations"] = iterations;
  j["corrector_norm"] = corrector_norm;
  j["difference"] = difference;
  j["macro_difference"] = macro_difference;
  j["tail_estimate"] = std::isfinite(tail_estimate) ? nlohmann::json(tail_estimate) : nlohmann::json(nullptr);
  j["checks"] = {{"differences_decreasing", monotone}};
  j["pass"] = monotone;
  return j;
}

void write_rank_csv(const std::string& path, const RankConvergence& c)
{
  std::ofstream out(path);
  require(out.good(), ErrorKind::config, "cannot write " + path);
  out << std::setprecision(17) << "degree,size,iterations,corrector_norm,difference_next,macro_difference_next\n";
  for (size_t i = 0; i < c.degrees.size(); ++i) {
    out << c.degrees[i] << ',' << c.sizes[i] << ',' << c.iterations[i] << ',' << c.corrector_norm[i];
    if (i < c.difference.size())
      out << ',' << c.difference[i] << ',' << c.macro_difference[i];
    else
      out << ",,";
    out << '\n';
  }
}

}  // namespace kshock
