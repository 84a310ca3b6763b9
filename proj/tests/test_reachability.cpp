#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "patchwork/reachability.hpp"

using namespace patchwork;
using Catch::Matchers::WithinAbs;

namespace {

analytic_family pair01() {
  return analytic_family({complex_poly{}, complex_poly{{1, 0}}}, {0, 0}, {-1, -1, 2, 2});
}

analytic_family triple01i() {
  return analytic_family({complex_poly{}, complex_poly{{1, 0}}, complex_poly{{0, 1}}}, {0, 0},
                         {-1, -1, 2, 2});
}

}  // namespace

TEST_CASE("half-plane reach set for the pair {0, 1}") {
  analytic_family fam = pair01();
  grid_window g = grid_window::over(fam.window(), 128, 128);
  cplx src{0.1, 0.2};
  reach_set r = descent_reachable(fam, src, g, 1);
  auto [sx, sy] = g.locate(src);
  double xs = g.center(sx, sy).real();
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      CHECK(r.at(ix, iy) == (g.center(ix, iy).real() <= xs + 1e-15));
}

TEST_CASE("quarter-plane reach set for {0, 1, i}") {
  analytic_family fam = triple01i();
  grid_window g = grid_window::over(fam.window(), 64, 64);
  cplx src{0.5, -0.5};
  reach_set r = descent_reachable(fam, src, g, 1);
  auto [sx, sy] = g.locate(src);
  cplx c0 = g.center(sx, sy);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      cplx z = g.center(ix, iy);
      bool expect = z.real() <= c0.real() + 1e-15 && z.imag() >= c0.imag() - 1e-15;
      CHECK(r.at(ix, iy) == expect);
    }
}

TEST_CASE("corner source with every admissible direction off-grid keeps only itself") {
  analytic_family tri = triple01i();
  grid_window g = grid_window::over(tri.window(), 32, 32);
  // descent from the top-left corner would need x to decrease or y to grow
  reach_set r = descent_reachable(tri, {-1 + 0.01, 1 - 0.01}, g, 1);
  int count = 0;
  for (std::uint8_t b : r.reachable) count += b;
  CHECK(count == 1);
}

TEST_CASE("reach transitivity on the discrete graph") {
  analytic_family fam = triple01i();
  grid_window g = grid_window::over(fam.window(), 48, 48);
  reach_set r1 = descent_reachable(fam, {0.4, -0.3}, g, 1);
  // pick a reachable cell away from the source
  std::pair<int, int> w{-1, -1};
  for (int iy = 0; iy < g.ny && w.first < 0; ++iy)
    for (int ix = 0; ix < g.nx && w.first < 0; ++ix)
      if (r1.at(ix, iy) && std::abs(g.center(ix, iy) - cplx{0.4, -0.3}) > 0.5) w = {ix, iy};
  REQUIRE(w.first >= 0);
  reach_set r2 = descent_reachable(fam, g.center(w.first, w.second), g, 1);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      if (r2.at(ix, iy)) CHECK(r1.at(ix, iy));
}

TEST_CASE("refinement keeps reachable regions up to a boundary band") {
  analytic_family fam = triple01i();
  grid_window coarse = grid_window::over(fam.window(), 32, 32);
  grid_window fine = grid_window::over(fam.window(), 64, 64);
  cplx src{0.3, -0.2};
  reach_set rc = descent_reachable(fam, src, coarse, 1);
  reach_set rf = descent_reachable(fam, src, fine, 1);
  double hc = coarse.cell();
  for (int iy = 0; iy < coarse.ny; ++iy)
    for (int ix = 0; ix < coarse.nx; ++ix) {
      if (!rc.at(ix, iy)) continue;
      // skip cells within one coarse cell of the reach boundary
      bool interior = true;
      for (int dy = -1; dy <= 1 && interior; ++dy)
        for (int dx = -1; dx <= 1 && interior; ++dx) {
          int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= coarse.nx || jy >= coarse.ny) interior = false;
          else if (!rc.at(jx, jy)) interior = false;
        }
      if (!interior) continue;
      auto [fx, fy] = fine.locate(coarse.center(ix, iy));
      CHECK(rf.at(fx, fy));
      (void)hc;
    }
}

TEST_CASE("limit coverage for the quarter-plane instance") {
  analytic_family fam = triple01i();
  grid_window g = grid_window::over(fam.window(), 64, 64);

  std::vector<std::pair<int, int>> target;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      cplx z = g.center(ix, iy);
      if (z.real() >= -0.6 && z.real() <= -0.2 && z.imag() >= 0.2 && z.imag() <= 0.6)
        target.push_back({ix, iy});
    }
  REQUIRE_FALSE(target.empty());

  std::vector<cplx> seq;
  for (int n = 1; n <= 12; ++n) seq.push_back(cplx{0.5, -0.5} / static_cast<double>(n));

  coverage_result res = limit_coverage_test(fam, {0, 0}, target, seq, g, 1);
  CHECK(res.ok);
  CHECK(res.n0 >= 1);
  CHECK(res.n0 <= 12);

  SECTION("target outside the open descent region is rejected") {
    std::vector<std::pair<int, int>> bad = target;
    auto [bx, by] = g.locate(cplx{0.5, 0.5});  // H2 = x > 0 there
    bad.push_back({bx, by});
    CHECK_THROWS_AS(limit_coverage_test(fam, {0, 0}, bad, seq, g, 1), error);
  }

  SECTION("empty target is rejected") {
    CHECK_THROWS_AS(limit_coverage_test(fam, {0, 0}, {}, seq, g, 1), error);
  }
}

TEST_CASE("limit coverage failure reports the uncovered cell") {
  analytic_family fam = triple01i();
  grid_window g = grid_window::over(fam.window(), 64, 64);
  // source at (-0.9, 0.9) reaches only {x <= -0.9, y >= 0.9}; the target cell
  // sits right of it and stays uncovered
  std::vector<cplx> seq{cplx{-0.9, 0.9}};
  coverage_result res =
      limit_coverage_test(fam, {0, 0}, {g.locate(cplx{-0.5, 0.5})}, seq, g, 1);
  CHECK_FALSE(res.ok);
  CHECK(res.uncovered_cell.first >= 0);
}

TEST_CASE("convolution monotonicity along admissible paths") {
  analytic_family fam = diagonal_pair_family();
  grid_window g = grid_window::over(fam.window(), 128, 128);
  mollifier mol(6 * g.cell());

  pa_field_t valid{fam, classify_grid(fam, g, 0.0)};

  SECTION("crossing into the baseline region is non-decreasing") {
    // baseline 1: admissible needs H2 - H1 = -(x+y) non-increasing, so x+y
    // non-decreasing; walk from deep M2 toward M1
    std::vector<cplx> path{cplx{-0.5, -0.3}, cplx{0.1, 0.3}, cplx{0.5, 0.5}};
    monotonicity_result r = convolution_monotonicity_check(valid, 1, mol, path);
    CHECK(r.holds);
  }

  SECTION("path inside the baseline region stays near one") {
    std::vector<cplx> path{cplx{0.5, 0.3}, cplx{0.6, 0.4}};
    monotonicity_result r = convolution_monotonicity_check(valid, 1, mol, path);
    CHECK(r.holds);
    // off-lattice kernel sums wobble at the 1e-5 level, well inside the slack
    CHECK(r.worst_violation >= -2e-4);
  }

  SECTION("inadmissible path is rejected") {
    std::vector<cplx> path{cplx{0.5, 0.5}, cplx{-0.5, -0.5}};  // x+y decreasing
    CHECK_THROWS_AS(convolution_monotonicity_check(valid, 1, mol, path), error);
  }

  SECTION("path too close to the window edge is rejected") {
    std::vector<cplx> path{cplx{0.97, 0.0}, cplx{0.97, 0.1}};
    CHECK_THROWS_AS(convolution_monotonicity_check(valid, 1, mol, path), error);
  }

  SECTION("the rotated labeling violates monotonicity") {
    region_labeling rot{g, {}, 0.0};
    rot.label.resize(static_cast<std::size_t>(g.count()));
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        cplx z = g.center(ix, iy);
        rot.at(ix, iy) = (z.real() - z.imag() >= 0) ? 1 : 2;
      }
    pa_field_t invalid{fam, rot};
    // along x + y = 0 the descent condition holds with equality; the walk
    // crosses x = y where the rotated chi_1 drops from 1 to 0
    std::vector<cplx> path{cplx{0.4, -0.4}, cplx{-0.4, 0.4}};
    monotonicity_result r = convolution_monotonicity_check(invalid, 1, mol, path);
    CHECK_FALSE(r.holds);
    CHECK(r.worst_violation < -0.01);
  }

  SECTION("100 random admissible walks hold") {
    std::mt19937_64 rng(67);
    int ran = 0;
    for (int t = 0; t < 100; ++t) {
      std::uniform_int_distribution<int> cell(20, 107);
      std::pair<int, int> start{cell(rng), cell(rng)};
      std::vector<cplx> path = random_descent_path(fam, g, 1, start, 60, rng);
      if (path.size() < 2) continue;
      bool clear = true;
      for (cplx v : path)
        if (std::abs(v.real()) > 0.85 || std::abs(v.imag()) > 0.85) clear = false;
      if (!clear) continue;
      monotonicity_result r = convolution_monotonicity_check(valid, 1, mol, path);
      CHECK(r.holds);
      ++ran;
    }
    CHECK(ran >= 50);
  }
}
