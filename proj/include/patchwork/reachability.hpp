#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "patchwork/family.hpp"
#include "patchwork/grid.hpp"
#include "patchwork/mollifier.hpp"
#include "patchwork/region.hpp"

namespace patchwork {

struct reach_set {
  grid_window grid;
  std::vector<std::uint8_t> reachable;
  cplx source;

  bool at(int ix, int iy) const {
    return reachable[static_cast<std::size_t>(grid.index(ix, iy))] != 0;
  }
};

namespace detail {

inline double family_scale(const analytic_family& fam, int baseline) {
  const window_rect& w = fam.window();
  double s = 0.0;
  for (int px = 0; px <= 8; ++px)
    for (int py = 0; py <= 8; ++py) {
      cplx z{w.x0 + w.width * px / 8.0, w.y0 + w.height * py / 8.0};
      cplx ab = fam.value(baseline, z);
      for (int i = 1; i <= fam.size(); ++i)
        if (i != baseline) s = std::max(s, std::abs(fam.value(i, z) - ab));
    }
  return s;
}

// A straight move c -> c+d is admissible when every H_i - H_baseline is
// non-increasing along it, tested by the directional derivative sign at both
// endpoints and the midpoint (exact for quadratic restrictions).
struct descent_edge_test {
  const analytic_family* fam;
  int baseline;
  double slack;

  bool operator()(cplx a, cplx b) const {
    cplx d = b - a;
    for (cplx m : {a, 0.5 * (a + b), b}) {
      cplx ab = fam->value(baseline, m);
      for (int i = 1; i <= fam->size(); ++i) {
        if (i == baseline) continue;
        if (((fam->value(i, m) - ab) * d).real() > slack) return false;
      }
    }
    return true;
  }
};

}  // namespace detail

// Breadth-first flood over the 8-neighbor cell graph from the cell of z;
// edges require every H_i - H_baseline non-increasing along the segment.
inline reach_set descent_reachable(const analytic_family& fam, cplx z, const grid_window& grid,
                                   int baseline) {
  if (baseline < 1 || baseline > fam.size())
    throw error(errc::index_out_of_range, "baseline member out of range");
  if (!grid.contains(z)) throw error(errc::config_error, "source point outside the grid");
  reach_set out{grid, std::vector<std::uint8_t>(static_cast<std::size_t>(grid.count()), 0), z};
  double slack = 1e-12 * detail::family_scale(fam, baseline) * grid.cell();
  detail::descent_edge_test admissible{&fam, baseline, slack};

  auto [sx, sy] = grid.locate(z);
  std::deque<std::pair<int, int>> frontier{{sx, sy}};
  out.reachable[static_cast<std::size_t>(grid.index(sx, sy))] = 1;
  while (!frontier.empty()) {
    auto [ix, iy] = frontier.front();
    frontier.pop_front();
    cplx a = grid.center(ix, iy);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        int jx = ix + dx, jy = iy + dy;
        if (jx < 0 || jy < 0 || jx >= grid.nx || jy >= grid.ny) continue;
        if (out.reachable[static_cast<std::size_t>(grid.index(jx, jy))]) continue;
        if (!admissible(a, grid.center(jx, jy))) continue;
        out.reachable[static_cast<std::size_t>(grid.index(jx, jy))] = 1;
        frontier.push_back({jx, jy});
      }
  }
  return out;
}

struct coverage_result {
  bool ok = false;
  int n0 = 0;                           // 1-based index into the sequence
  std::pair<int, int> uncovered_cell{-1, -1};
};

// Smallest n0 with target cells reachable from every z_n, n >= n0. Target
// cells must lie in the open descent region (every H_i - H_baseline < 0).
inline coverage_result limit_coverage_test(const analytic_family& fam, cplx p,
                                           const std::vector<std::pair<int, int>>& target,
                                           const std::vector<cplx>& sequence,
                                           const grid_window& grid, int baseline) {
  (void)p;
  if (target.empty()) throw error(errc::degenerate_input, "empty target set");
  if (sequence.empty()) throw error(errc::degenerate_input, "empty sequence");
  for (auto [ix, iy] : target) {
    cplx z = grid.center(ix, iy);
    cplx ab = fam.value(baseline, z);
    for (int i = 1; i <= fam.size(); ++i) {
      if (i == baseline) continue;
      if (fam.harmonic_part(i, z) - fam.harmonic_part(baseline, z) >= 0.0)
        throw error(errc::degenerate_input,
                    "target cell (" + std::to_string(ix) + "," + std::to_string(iy) +
                        ") outside the open descent region");
    }
    (void)ab;
  }
  coverage_result res;
  int last_uncovered = -1;
  for (std::size_t n = 0; n < sequence.size(); ++n) {
    reach_set r = descent_reachable(fam, sequence[n], grid, baseline);
    for (auto [ix, iy] : target)
      if (!r.at(ix, iy)) {
        last_uncovered = static_cast<int>(n);
        res.uncovered_cell = {ix, iy};
        break;
      }
  }
  if (last_uncovered == static_cast<int>(sequence.size()) - 1) {
    res.ok = false;
    return res;
  }
  res.ok = true;
  res.n0 = last_uncovered + 2;  // 1-based; first index covered onwards
  res.uncovered_cell = {-1, -1};
  return res;
}

struct monotonicity_result {
  bool holds = false;
  double worst_violation = 0.0;  // most negative increment of chi * phi_eps
};

// (chi_baseline * phi_eps) sampled along the path must be non-decreasing up
// to the discretization slack whenever the path is descent-admissible.
inline monotonicity_result convolution_monotonicity_check(const pa_field_t& field, int baseline,
                                                          const mollifier& mol,
                                                          const std::vector<cplx>& path,
                                                          double slack = 1e-3) {
  const grid_window& g = field.labeling.grid;
  const double h = g.cell();
  if (path.size() < 2) throw error(errc::invalid_path, "path needs at least two vertices");
  for (cplx v : path) {
    double dx = std::min(v.real() - g.origin.real(), g.origin.real() + g.width - v.real());
    double dy = std::min(v.imag() - g.origin.imag(), g.origin.imag() + g.height - v.imag());
    if (std::min(dx, dy) < mol.radius + h)
      throw error(errc::invalid_path, "mollifier support leaves the window along the path");
  }
  double edge_slack =
      1e-12 * detail::family_scale(field.family, baseline) * g.cell();
  detail::descent_edge_test admissible{&field.family, baseline, edge_slack};
  for (std::size_t s = 0; s + 1 < path.size(); ++s)
    if (!admissible(path[s], path[s + 1]))
      throw error(errc::invalid_path,
                  "segment " + std::to_string(s) + " violates the descent condition");

  // indicator of the baseline region on cells (ties excluded)
  std::vector<std::uint8_t> ind(static_cast<std::size_t>(g.count()), 0);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      if (field.labeling.at(ix, iy) == baseline)
        ind[static_cast<std::size_t>(g.index(ix, iy))] = 1;

  // exact kernel evaluation at arbitrary points, no grid resampling
  auto conv_at = [&](cplx z) {
    int m = static_cast<int>(std::ceil(mol.radius / h)) + 1;
    auto [cx, cy] = g.locate(z);
    double acc = 0.0;
    for (int iy = std::max(0, cy - m); iy <= std::min(g.ny - 1, cy + m); ++iy)
      for (int ix = std::max(0, cx - m); ix <= std::min(g.nx - 1, cx + m); ++ix)
        if (ind[static_cast<std::size_t>(g.index(ix, iy))])
          acc += mol.weight(z - g.center(ix, iy));
    return acc * h * h;
  };

  std::vector<double> seq;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    double len = std::abs(path[s + 1] - path[s]);
    int n = std::max(1, static_cast<int>(std::ceil(len / (0.5 * h))));
    for (int t = 0; t < n; ++t)
      seq.push_back(conv_at(path[s] + (static_cast<double>(t) / n) * (path[s + 1] - path[s])));
  }
  seq.push_back(conv_at(path.back()));

  monotonicity_result res;
  res.worst_violation = 0.0;
  for (std::size_t s = 0; s + 1 < seq.size(); ++s)
    res.worst_violation = std::min(res.worst_violation, seq[s + 1] - seq[s]);
  res.holds = res.worst_violation >= -slack;
  return res;
}

// Random admissible descent walk over cell centers; used by the monotonicity
// suites. Returns the trail even when the walk gets stuck early.
inline std::vector<cplx> random_descent_path(const analytic_family& fam, const grid_window& grid,
                                             int baseline, std::pair<int, int> start, int steps,
                                             std::mt19937_64& rng) {
  double slack = 1e-12 * detail::family_scale(fam, baseline) * grid.cell();
  detail::descent_edge_test admissible{&fam, baseline, slack};
  std::vector<cplx> path{grid.center(start.first, start.second)};
  int ix = start.first, iy = start.second;
  for (int s = 0; s < steps; ++s) {
    std::vector<std::pair<int, int>> options;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        int jx = ix + dx, jy = iy + dy;
        if (jx < 1 || jy < 1 || jx >= grid.nx - 1 || jy >= grid.ny - 1) continue;
        if (admissible(grid.center(ix, iy), grid.center(jx, jy))) options.push_back({jx, jy});
      }
    if (options.empty()) break;
    auto [jx, jy] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    ix = jx;
    iy = jy;
    path.push_back(grid.center(ix, iy));
  }
  return path;
}

}  // namespace patchwork
