#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "patchwork/family.hpp"
#include "patchwork/grid.hpp"
#include "patchwork/level_curves.hpp"
#include "patchwork/mollifier.hpp"
#include "patchwork/region.hpp"

namespace patchwork {

// Interface measure density at z for the pair (i, j).
inline double measure_density(const analytic_family& fam, int i, int j, cplx z) {
  if (i == j) return 0.0;
  return 0.5 * std::abs(fam.value(i, z) - fam.value(j, z));
}

// Largest pairwise density over the window; the scale behind the default
// positivity tolerance.
inline double max_pair_density(const analytic_family& fam, const grid_window& grid) {
  double best = 0.0;
  int step = std::max(1, grid.nx / 32);
  for (int iy = 0; iy < grid.ny; iy += step)
    for (int ix = 0; ix < grid.nx; ix += step) {
      cplx z = grid.center(ix, iy);
      for (int i = 1; i <= fam.size(); ++i)
        for (int j = i + 1; j <= fam.size(); ++j)
          best = std::max(best, measure_density(fam, i, j, z));
    }
  return best;
}

inline double default_tol_pos(const analytic_family& fam, const grid_window& grid) {
  return 1e-3 * max_pair_density(fam, grid);
}

// dbar(Phi * phi_eps) = (1/2)(d_x + i d_y) of the mollified samples, by
// discrete convolution then central differences. Valid margin is eps + 2h.
inline field_samples<cplx> mollified_dbar(const field_samples<cplx>& phi, const mollifier& mol) {
  field_samples<cplx> s = mollify(phi, mol);
  const grid_window& g = s.grid;
  const double h = g.cell();
  field_samples<cplx> out(g);
  out.margin_cells = s.margin_cells + 2;
  for (int iy = out.margin_cells; iy < g.ny - out.margin_cells; ++iy)
    for (int ix = out.margin_cells; ix < g.nx - out.margin_cells; ++ix) {
      cplx dx = (s.at(ix + 1, iy) - s.at(ix - 1, iy)) / (2 * h);
      cplx dy = (s.at(ix, iy + 1) - s.at(ix, iy - 1)) / (2 * h);
      out.at(ix, iy) = 0.5 * (dx + cplx{0.0, 1.0} * dy);
    }
  return out;
}

// 2 dz(phi * phi_eps): the mollified derivative that converges to the
// assembled piecewise field.
inline field_samples<cplx> mollified_two_dz(const field_samples<double>& phi,
                                            const mollifier& mol) {
  field_samples<double> s = mollify(phi, mol);
  const grid_window& g = s.grid;
  const double h = g.cell();
  field_samples<cplx> out(g);
  out.margin_cells = s.margin_cells + 2;
  for (int iy = out.margin_cells; iy < g.ny - out.margin_cells; ++iy)
    for (int ix = out.margin_cells; ix < g.nx - out.margin_cells; ++ix) {
      double dx = (s.at(ix + 1, iy) - s.at(ix - 1, iy)) / (2 * h);
      double dy = (s.at(ix, iy + 1) - s.at(ix, iy - 1)) / (2 * h);
      out.at(ix, iy) = cplx{dx, -dy};  // 2 * (1/2)(d_x - i d_y)
    }
  return out;
}

// 5-point Laplacian of the mollified potential samples.
inline field_samples<double> mollified_laplacian(const field_samples<double>& phi,
                                                 const mollifier& mol) {
  field_samples<double> s = mollify(phi, mol);
  const grid_window& g = s.grid;
  const double h = g.cell();
  field_samples<double> out(g);
  out.margin_cells = s.margin_cells + 2;
  for (int iy = out.margin_cells; iy < g.ny - out.margin_cells; ++iy)
    for (int ix = out.margin_cells; ix < g.nx - out.margin_cells; ++ix)
      out.at(ix, iy) = (s.at(ix + 1, iy) + s.at(ix - 1, iy) + s.at(ix, iy + 1) +
                        s.at(ix, iy - 1) - 4.0 * s.at(ix, iy)) /
                       (h * h);
  return out;
}

struct positivity_result {
  bool verdict = false;
  cplx worst_cell{0.0, 0.0};
  double worst_value = 0.0;  // min over cells of min(Re + tol, tol - |Im|)
  double min_re = 0.0;
  double max_abs_im = 0.0;
  double tol_pos = 0.0;
};

// verdict = true iff every interior cell has Re(dbar) >= -tol_pos and
// |Im(dbar)| <= tol_pos. worst_value is the smallest slack against that box.
inline positivity_result positivity_verdict(const field_samples<cplx>& phi, const mollifier& mol,
                                            double tol_pos) {
  field_samples<cplx> d = mollified_dbar(phi, mol);
  positivity_result res;
  res.tol_pos = tol_pos;
  res.worst_value = std::numeric_limits<double>::infinity();
  res.min_re = std::numeric_limits<double>::infinity();
  res.max_abs_im = 0.0;
  const grid_window& g = d.grid;
  for (int iy = d.margin_cells; iy < g.ny - d.margin_cells; ++iy)
    for (int ix = d.margin_cells; ix < g.nx - d.margin_cells; ++ix) {
      cplx v = d.at(ix, iy);
      res.min_re = std::min(res.min_re, v.real());
      res.max_abs_im = std::max(res.max_abs_im, std::abs(v.imag()));
      double slack = std::min(v.real() + tol_pos, tol_pos - std::abs(v.imag()));
      if (slack < res.worst_value) {
        res.worst_value = slack;
        res.worst_cell = g.center(ix, iy);
      }
    }
  res.verdict = res.min_re >= -tol_pos && res.max_abs_im <= tol_pos;
  return res;
}

struct subharmonic_result {
  bool verdict = false;
  cplx worst_cell{0.0, 0.0};
  double min_laplacian = 0.0;
  double tol_pos = 0.0;
};

inline subharmonic_result subharmonic_verdict(const field_samples<double>& phi,
                                              const mollifier& mol, double tol_pos) {
  field_samples<double> lap = mollified_laplacian(phi, mol);
  subharmonic_result res;
  res.tol_pos = tol_pos;
  res.min_laplacian = std::numeric_limits<double>::infinity();
  const grid_window& g = lap.grid;
  for (int iy = lap.margin_cells; iy < g.ny - lap.margin_cells; ++iy)
    for (int ix = lap.margin_cells; ix < g.nx - lap.margin_cells; ++ix)
      if (lap.at(ix, iy) < res.min_laplacian) {
        res.min_laplacian = lap.at(ix, iy);
        res.worst_cell = g.center(ix, iy);
      }
  res.verdict = res.min_laplacian >= -tol_pos;
  return res;
}

// A weighted union of interface arcs: the boundary measure nu = dbar(Phi).
struct measure_arc {
  std::vector<cplx> vertices;
  std::vector<double> densities;

  double mass() const {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k)
      m += 0.5 * (densities[k] + densities[k + 1]) * std::abs(vertices[k + 1] - vertices[k]);
    return m;
  }
  double max_spacing() const {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k)
      s = std::max(s, std::abs(vertices[k + 1] - vertices[k]));
    return s;
  }
};

struct boundary_measure {
  std::vector<measure_arc> arcs;

  double total_mass() const {
    double m = 0.0;
    for (const auto& a : arcs) m += a.mass();
    return m;
  }
  double max_spacing() const {
    double s = 0.0;
    for (const auto& a : arcs) s = std::max(s, a.max_spacing());
    return s;
  }

  static boundary_measure from_curves(const std::vector<level_curve>& curves) {
    boundary_measure m;
    for (const auto& c : curves) {
      for (double d : c.densities)
        if (d < 0) throw error(errc::config_error, "negative density");
      m.arcs.push_back({c.vertices, c.densities});
    }
    return m;
  }
};

// Straight segment with constant density, n_panels trapezoid panels.
inline boundary_measure segment_measure(cplx a, cplx b, double density, int n_panels) {
  if (n_panels < 1) throw error(errc::config_error, "need at least one panel");
  measure_arc arc;
  for (int k = 0; k <= n_panels; ++k) {
    arc.vertices.push_back(a + (static_cast<double>(k) / n_panels) * (b - a));
    arc.densities.push_back(density);
  }
  return boundary_measure{{arc}};
}

// Chordal subdivision to a maximum vertex spacing, densities recomputed from
// the family pair when the arc carries one (interpolated otherwise).
inline boundary_measure refine_measure(const boundary_measure& m, double max_spacing,
                                       const analytic_family* fam = nullptr, int i = 0,
                                       int j = 0) {
  boundary_measure out;
  for (const auto& arc : m.arcs) {
    measure_arc r;
    for (std::size_t k = 0; k + 1 < arc.vertices.size(); ++k) {
      cplx a = arc.vertices[k], b = arc.vertices[k + 1];
      int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / max_spacing)));
      for (int t = 0; t < n; ++t) {
        double u = static_cast<double>(t) / n;
        cplx z = a + u * (b - a);
        double d = fam ? measure_density(*fam, i, j, z)
                       : (1 - u) * arc.densities[k] + u * arc.densities[k + 1];
        r.vertices.push_back(z);
        r.densities.push_back(d);
      }
    }
    r.vertices.push_back(arc.vertices.back());
    r.densities.push_back(fam ? measure_density(*fam, i, j, arc.vertices.back())
                              : arc.densities.back());
    out.arcs.push_back(std::move(r));
  }
  return out;
}

// C_nu(z) = (1/pi) int density(w)/(z - w) ds(w), trapezoid over the polylines.
inline cplx cauchy_transform(const boundary_measure& m, cplx z) {
  double spacing = m.max_spacing();
  cplx acc{0.0, 0.0};
  for (const auto& arc : m.arcs) {
    for (std::size_t k = 0; k + 1 < arc.vertices.size(); ++k) {
      cplx a = arc.vertices[k], b = arc.vertices[k + 1];
      if (std::abs(z - a) < 3 * spacing || std::abs(z - b) < 3 * spacing)
        throw error(errc::near_singularity,
                    "evaluation point within 3 panel lengths of the support");
      double ds = std::abs(b - a);
      acc += 0.5 * ds * (arc.densities[k] / (z - a) + arc.densities[k + 1] / (z - b));
    }
  }
  return acc / std::numbers::pi;
}

struct flux_result {
  double measured = 0.0;
  double predicted = 0.0;
};

namespace detail {

// distance of z to the polyline plus the projection parameter footing:
// interior = nearest point not an arc endpoint
struct tube_hit {
  double dist = std::numeric_limits<double>::infinity();
  bool interior = false;
  cplx foot{0, 0};
};

inline tube_hit project_polyline(cplx z, const std::vector<cplx>& v) {
  tube_hit best;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    cplx a = v[k], b = v[k + 1];
    cplx ab = b - a;
    double L2 = std::norm(ab);
    double t = L2 > 0 ? (std::conj(ab) * (z - a)).real() / L2 : 0.0;
    double tc = std::clamp(t, 0.0, 1.0);
    cplx q = a + tc * ab;
    double d = std::abs(z - q);
    if (d < best.dist) {
      best.dist = d;
      best.foot = q;
      bool clipped_start = (k == 0 && t < 0.0);
      bool clipped_end = (k + 2 == v.size() && t > 1.0);
      best.interior = !(clipped_start || clipped_end);
    }
  }
  return best;
}

}  // namespace detail

// Compare the mollified dbar mass in a perpendicular tube around the curve
// against the line integral of the density. Cells count when their nearest
// point on the polyline is not an endpoint (a tube, not a stadium), so mass
// flowing past the clip planes cancels for transversally cut interfaces.
inline flux_result flux_vs_density(const field_samples<cplx>& phi, const mollifier& mol,
                                   const level_curve& curve, double band) {
  const grid_window& g = phi.grid;
  const double h = g.cell();
  if (band < mol.radius + 2 * h)
    throw error(errc::under_coverage, "band must be at least eps + 2h");
  for (cplx v : curve.vertices) {
    double dx = std::min(v.real() - g.origin.real(), g.origin.real() + g.width - v.real());
    double dy = std::min(v.imag() - g.origin.imag(), g.origin.imag() + g.height - v.imag());
    if (std::min(dx, dy) < band + mol.radius)
      throw error(errc::under_coverage, "curve too close to the window edge for this band");
  }
  field_samples<cplx> d = mollified_dbar(phi, mol);

  flux_result res;
  for (std::size_t k = 0; k + 1 < curve.vertices.size(); ++k)
    res.predicted += 0.5 * (curve.densities[k] + curve.densities[k + 1]) *
                     std::abs(curve.vertices[k + 1] - curve.vertices[k]);

  // bounding box of the curve inflated by the band
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (cplx v : curve.vertices) {
    xlo = std::min(xlo, v.real());
    xhi = std::max(xhi, v.real());
    ylo = std::min(ylo, v.imag());
    yhi = std::max(yhi, v.imag());
  }
  auto [ix0, iy0] = g.locate(cplx{xlo - band, ylo - band});
  auto [ix1, iy1] = g.locate(cplx{xhi + band, yhi + band});
  for (int iy = iy0; iy <= iy1; ++iy)
    for (int ix = ix0; ix <= ix1; ++ix) {
      if (!d.interior(ix, iy)) continue;
      auto hit = detail::project_polyline(g.center(ix, iy), curve.vertices);
      if (hit.dist <= band && hit.interior) res.measured += d.at(ix, iy).real() * h * h;
    }
  return res;
}

// Aggregate variant for corner neighborhoods: mass of the union of tubes of
// several curve portions, counted once, against the summed line integrals.
inline flux_result flux_union(const field_samples<cplx>& phi, const mollifier& mol,
                              const std::vector<level_curve>& curves, double band, cplx center,
                              double radius) {
  const grid_window& g = phi.grid;
  const double h = g.cell();
  if (band < mol.radius + 2 * h)
    throw error(errc::under_coverage, "band must be at least eps + 2h");
  field_samples<cplx> d = mollified_dbar(phi, mol);
  flux_result res;
  for (const auto& c : curves)
    for (std::size_t k = 0; k + 1 < c.vertices.size(); ++k) {
      cplx mid = 0.5 * (c.vertices[k] + c.vertices[k + 1]);
      if (std::abs(mid - center) <= radius)
        res.predicted += 0.5 * (c.densities[k] + c.densities[k + 1]) *
                         std::abs(c.vertices[k + 1] - c.vertices[k]);
    }
  for (int iy = d.margin_cells; iy < g.ny - d.margin_cells; ++iy)
    for (int ix = d.margin_cells; ix < g.nx - d.margin_cells; ++ix) {
      cplx z = g.center(ix, iy);
      bool in = false;
      for (const auto& c : curves) {
        auto hit = detail::project_polyline(z, c.vertices);
        if (hit.dist <= band && hit.interior && std::abs(hit.foot - center) <= radius) {
          in = true;
          break;
        }
      }
      if (in) res.measured += d.at(ix, iy).real() * h * h;
    }
  return res;
}

// Max residual of a least-squares polynomial fit to Phi - C_nu over the test
// points; a small value certifies that the difference is analytic there.
inline double reconstruction_residual(const analytic_family& fam, const pa_field_t& field,
                                      const boundary_measure& measure,
                                      const std::vector<cplx>& test_points, int fit_degree) {
  (void)fam;
  const int ncoef = fit_degree + 1;
  if (static_cast<int>(test_points.size()) < ncoef)
    throw error(errc::underdetermined, "need at least fit_degree + 1 test points");

  std::vector<cplx> rhs(test_points.size());
  for (std::size_t t = 0; t < test_points.size(); ++t)
    rhs[t] = pa_field(field, test_points[t]) - cauchy_transform(measure, test_points[t]);

  // centered, scaled basis keeps the Vandermonde well conditioned
  cplx mean{0, 0};
  for (cplx z : test_points) mean += z;
  mean /= static_cast<double>(test_points.size());
  double spread = 0.0;
  for (cplx z : test_points) spread = std::max(spread, std::abs(z - mean));
  if (spread == 0) spread = 1.0;

  std::vector<std::vector<cplx>> V(test_points.size(), std::vector<cplx>(ncoef));
  for (std::size_t t = 0; t < test_points.size(); ++t) {
    cplx w = (test_points[t] - mean) / spread;
    cplx p{1.0, 0.0};
    for (int c = 0; c < ncoef; ++c) {
      V[t][static_cast<std::size_t>(c)] = p;
      p *= w;
    }
  }

  // normal equations, Gaussian elimination with partial pivoting
  std::vector<std::vector<cplx>> G(ncoef, std::vector<cplx>(ncoef, cplx{0, 0}));
  std::vector<cplx> b(ncoef, cplx{0, 0});
  for (std::size_t t = 0; t < test_points.size(); ++t)
    for (int r = 0; r < ncoef; ++r) {
      for (int c = 0; c < ncoef; ++c)
        G[r][static_cast<std::size_t>(c)] +=
            std::conj(V[t][static_cast<std::size_t>(r)]) * V[t][static_cast<std::size_t>(c)];
      b[static_cast<std::size_t>(r)] += std::conj(V[t][static_cast<std::size_t>(r)]) * rhs[t];
    }
  for (int col = 0; col < ncoef; ++col) {
    int piv = col;
    for (int r = col + 1; r < ncoef; ++r)
      if (std::abs(G[r][static_cast<std::size_t>(col)]) >
          std::abs(G[piv][static_cast<std::size_t>(col)]))
        piv = r;
    std::swap(G[col], G[piv]);
    std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(piv)]);
    cplx d = G[col][static_cast<std::size_t>(col)];
    if (std::abs(d) == 0.0) throw error(errc::underdetermined, "singular normal equations");
    for (int r = col + 1; r < ncoef; ++r) {
      cplx f = G[r][static_cast<std::size_t>(col)] / d;
      for (int c = col; c < ncoef; ++c)
        G[r][static_cast<std::size_t>(c)] -= f * G[col][static_cast<std::size_t>(c)];
      b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
    }
  }
  std::vector<cplx> coef(ncoef);
  for (int r = ncoef - 1; r >= 0; --r) {
    cplx s = b[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < ncoef; ++c)
      s -= G[r][static_cast<std::size_t>(c)] * coef[static_cast<std::size_t>(c)];
    coef[static_cast<std::size_t>(r)] = s / G[r][static_cast<std::size_t>(r)];
  }

  double worst = 0.0;
  for (std::size_t t = 0; t < test_points.size(); ++t) {
    cplx fit{0, 0};
    for (int c = ncoef - 1; c >= 0; --c)
      fit = fit * ((test_points[t] - mean) / spread) + coef[static_cast<std::size_t>(c)];
    worst = std::max(worst, std::abs(rhs[t] - fit));
  }
  return worst;
}

}  // namespace patchwork
