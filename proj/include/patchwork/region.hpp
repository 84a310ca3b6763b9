#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "patchwork/family.hpp"
#include "patchwork/grid.hpp"

namespace patchwork {

// Cell labels: 1..r for region membership, 0 for a tie/boundary cell.
inline constexpr int kTie = 0;

struct max_field_result {
  double value;
  std::vector<int> argmax;  // all maximizing indices, 1-based
};

// phi(z) = max_i H_i(z) with the exact-comparison set of maximizers.
inline max_field_result max_field(const analytic_family& fam, cplx z) {
  max_field_result out{-std::numeric_limits<double>::infinity(), {}};
  for (int i = 1; i <= fam.size(); ++i) {
    double hi = fam.harmonic_part(i, z);
    if (hi > out.value) {
      out.value = hi;
      out.argmax.assign(1, i);
    } else if (hi == out.value) {
      out.argmax.push_back(i);
    }
  }
  return out;
}

struct region_labeling {
  grid_window grid;
  std::vector<int> label;  // per cell; kTie for ties
  double tie_tolerance = 0.0;

  int at(int ix, int iy) const { return label[static_cast<std::size_t>(grid.index(ix, iy))]; }
  int& at(int ix, int iy) { return label[static_cast<std::size_t>(grid.index(ix, iy))]; }
};

// Label every cell by the argmax of H at its center; cells whose top two
// values are within tie_tolerance become kTie.
inline region_labeling classify_grid(const analytic_family& fam, const grid_window& grid,
                                     double tie_tolerance = 0.0) {
  if (tie_tolerance < 0) throw error(errc::config_error, "tie_tolerance must be >= 0");
  region_labeling out{grid, std::vector<int>(static_cast<std::size_t>(grid.count()), kTie),
                      tie_tolerance};
  const int r = fam.size();
  std::vector<double> h(static_cast<std::size_t>(r));
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      cplx z = grid.center(ix, iy);
      int best = 1;
      for (int i = 1; i <= r; ++i) {
        h[static_cast<std::size_t>(i - 1)] = fam.harmonic_part(i, z);
        if (h[static_cast<std::size_t>(i - 1)] > h[static_cast<std::size_t>(best - 1)]) best = i;
      }
      bool tie = false;
      for (int i = 1; i <= r && !tie; ++i)
        if (i != best &&
            h[static_cast<std::size_t>(best - 1)] - h[static_cast<std::size_t>(i - 1)] <=
                tie_tolerance)
          tie = true;
      out.at(ix, iy) = tie ? kTie : best;
    }
  return out;
}

struct pa_field_t {
  analytic_family family;
  region_labeling labeling;
};

// Evaluate the piecewise field at z through the cell label.
inline cplx pa_field(const pa_field_t& field, cplx z) {
  if (!field.labeling.grid.contains(z))
    throw error(errc::index_out_of_range, "point outside the grid window");
  auto [ix, iy] = field.labeling.grid.locate(z);
  int lab = field.labeling.at(ix, iy);
  if (lab == kTie)
    throw error(errc::ambiguous_cell, "tie cell at (" + std::to_string(ix) + "," +
                                          std::to_string(iy) + "); refine the grid");
  return field.family.value(lab, z);
}

// Labeling of the modified field from the tangent-cusp family: inside the two
// upper sectors where member 1 is maximal, the label becomes 3 left of the
// H2 = H3 curve and 2 right of it. Sector membership is decided by sign tests
// on the H differences, not by coordinates.
inline region_labeling counterexample_labeling(const grid_window& grid) {
  if (!grid.contains(cplx{0.0, 0.0}))
    throw error(errc::config_error, "grid window must contain the origin");
  analytic_family fam = tangent_cusp_family(grid.rect());
  region_labeling out = classify_grid(fam, grid, 0.0);
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      if (out.at(ix, iy) != 1) continue;
      cplx z = grid.center(ix, iy);
      if (z.imag() <= 0) continue;
      double h23 = fam.harmonic_part(2, z) - fam.harmonic_part(3, z);
      out.at(ix, iy) = (h23 < 0) ? 3 : 2;
    }
  return out;
}

// The same sector rule as a pointwise labeling (used by the supersampled
// field builders).
inline int counterexample_label_at(const analytic_family& fam, cplx z) {
  auto mf = max_field(fam, z);
  int lab = mf.argmax.front();
  if (lab == 1 && z.imag() > 0) {
    double h23 = fam.harmonic_part(2, z) - fam.harmonic_part(3, z);
    return (h23 < 0) ? 3 : 2;
  }
  return lab;
}

using label_rule = std::function<int(cplx)>;

inline label_rule max_label_rule(const analytic_family& fam) {
  return [&fam](cplx z) { return max_field(fam, z).argmax.front(); };
}

// Split along the line through p with unit normal n: label 1 on the side the
// normal points into.
inline label_rule half_plane_label_rule(cplx p, cplx n) {
  return [p, n](cplx z) { return (((z - p) * std::conj(n)).real() >= 0.0) ? 1 : 2; };
}

// Per-cell samples of sum_i A_i chi_i under a pointwise label rule. With
// supersample > 1, cells adjacent to a label change are averaged over an
// s x s subgrid, which removes the staircase quantization noise from the
// smoothed derivative checks; uniform cells keep their center value.
inline field_samples<cplx> build_field_samples(const analytic_family& fam, const label_rule& rule,
                                               const grid_window& grid, int supersample = 1) {
  field_samples<cplx> out(grid);
  const double h = grid.cell();
  std::vector<int> lab(static_cast<std::size_t>(grid.count()));
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix)
      lab[static_cast<std::size_t>(grid.index(ix, iy))] = rule(grid.center(ix, iy));
  auto boundary = [&](int ix, int iy) {
    int l = lab[static_cast<std::size_t>(grid.index(ix, iy))];
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        int jx = ix + dx, jy = iy + dy;
        if (jx < 0 || jy < 0 || jx >= grid.nx || jy >= grid.ny) continue;
        if (lab[static_cast<std::size_t>(grid.index(jx, jy))] != l) return true;
      }
    return false;
  };
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      cplx c = grid.center(ix, iy);
      if (supersample <= 1 || !boundary(ix, iy)) {
        out.at(ix, iy) = fam.value(lab[static_cast<std::size_t>(grid.index(ix, iy))], c);
        continue;
      }
      cplx acc{0.0, 0.0};
      cplx corner = c - cplx{0.5 * h, 0.5 * h};
      for (int sy = 0; sy < supersample; ++sy)
        for (int sx = 0; sx < supersample; ++sx) {
          cplx zs = corner + cplx{(sx + 0.5) * h / supersample, (sy + 0.5) * h / supersample};
          acc += fam.value(rule(zs), zs);
        }
      out.at(ix, iy) = acc / static_cast<double>(supersample * supersample);
    }
  return out;
}

// Samples of the potential (real) field under a label rule, phi = H_label.
inline field_samples<double> build_potential_samples(const analytic_family& fam,
                                                     const label_rule& rule,
                                                     const grid_window& grid) {
  field_samples<double> out(grid);
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      cplx z = grid.center(ix, iy);
      out.at(ix, iy) = fam.harmonic_part(rule(z), z);
    }
  return out;
}

// Field samples straight from a labeling; tie cells take the smallest
// maximizing member so ties along an interface stay on one side.
inline field_samples<cplx> field_samples_from_labeling(const analytic_family& fam,
                                                       const region_labeling& labeling) {
  field_samples<cplx> out(labeling.grid);
  for (int iy = 0; iy < labeling.grid.ny; ++iy)
    for (int ix = 0; ix < labeling.grid.nx; ++ix) {
      cplx z = labeling.grid.center(ix, iy);
      int lab = labeling.at(ix, iy);
      if (lab == kTie) lab = max_field(fam, z).argmax.front();
      out.at(ix, iy) = fam.value(lab, z);
    }
  return out;
}

}  // namespace patchwork
