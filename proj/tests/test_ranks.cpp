#include "kshock/ranks.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace kshock;
using namespace kshock::testing;

namespace {

const GalerkinLadder& ladder34()
{
  static const GalerkinLadder l = build_ladder(reference_state(RunConfig{}), {3, 4});
  return l;
}

}  // namespace

TEST_CASE("uniformity over a two-rank ladder")
{
  const UniformityReport u = check_uniformity(ladder34());
  REQUIRE(u.rows.size() == 2);
  CHECK(u.rows[0].size == 20);
  CHECK(u.rows[1].size == 35);
  for (const auto& r : u.rows) {
    CHECK(r.negativity > 0.0);
    CHECK(r.gamma > 0.0);
    // The macro block of K A at theta = 1 does not depend on the rank.
    CHECK(r.macro_positivity == doctest::Approx(u.rows[0].macro_positivity).epsilon(1e-10));
  }
  CHECK(u.r_star == 3);
  CHECK(u.median_gamma == doctest::Approx(0.5 * (u.rows[0].gamma + u.rows[1].gamma)));
  CHECK(u.pass);
  CHECK(u.to_json()["pass"] == true);
}

TEST_CASE("a ladder whose leading directions miss the fluid moments is rejected")
{
  GalerkinLadder bad = ladder34();
  bad.top.moment(0, 7) = 0.5;
  bool thrown = false;
  try {
    check_uniformity(bad);
  } catch (const Error& e) {
    thrown = e.kind() == ErrorKind::assumption && std::string(e.what()).find("degree 3") != std::string::npos;
  }
  CHECK(thrown);
}

TEST_CASE("rank convergence: padding, single rank and a two-rank difference")
{
  SolveOptions opt;
  opt.nodes = 201;
  GalerkinLadder one = ladder34();
  one.degrees = {4};
  one.sizes = {35};
  const RankConvergence single = converge_in_r(one, 0.1, opt);
  CHECK(single.difference.empty());
  CHECK(single.monotone);
  CHECK(single.tail_estimate == 0.0);

  const RankConvergence two = converge_in_r(ladder34(), 0.1, opt);
  REQUIRE(two.difference.size() == 1);
  CHECK(two.sizes == std::vector<int>{20, 35});
  CHECK(two.difference[0] > 0.0);
  // Both ranks solve a shock of the same amplitude: the fluid profiles differ by far less than epsilon.
  CHECK(two.macro_difference[0] <= 0.01 * 0.1);
  CHECK(two.to_json()["degrees"].size() == 2);

  const auto p = std::filesystem::temp_directory_path() / "kshock_test_ranks.csv";
  write_rank_csv(p.string(), two);
  std::ifstream in(p);
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 3);
}
