#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patchwork/family.hpp"
#include "patchwork/region.hpp"

namespace patchwork {

// Arc-length-parametrized polyline on {H_i - H_j = level} with the interface
// measure density |A_i - A_j|/2 at every vertex.
struct level_curve {
  int i = 0, j = 0;
  double level = 0.0;
  std::vector<cplx> vertices;
  std::vector<double> arclength;
  std::vector<double> densities;
  bool closed = false;

  double length() const { return arclength.empty() ? 0.0 : arclength.back(); }
};

struct trace_options {
  double curve_tol = 0.0;   // 0: derive from window and gradient scale
  double grad_floor = 0.0;  // 0: derive from gradient scale
  std::size_t max_vertices = 200000;
};

namespace detail {

struct trace_scales {
  double curve_tol;
  double grad_floor;
};

inline trace_scales derive_scales(const analytic_family& fam, const window_rect& win,
                                  const trace_options& opt) {
  double gb = std::max(fam.gradient_bound(), 1e-300);
  trace_scales s;
  s.curve_tol = opt.curve_tol > 0 ? opt.curve_tol : 1e-10 * win.diagonal() * gb;
  s.grad_floor = opt.grad_floor > 0 ? opt.grad_floor : 1e-6 * gb;
  return s;
}

// Newton steps along the gradient of g = H_i - H_j - level.
inline cplx newton_project(const analytic_family& fam, int i, int j, double level, cplx z,
                           double curve_tol, double grad_floor, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    double g = fam.harmonic_part(i, z) - fam.harmonic_part(j, z) - level;
    if (std::abs(g) <= curve_tol) return z;
    cplx da = fam.value(i, z) - fam.value(j, z);
    double n = std::norm(da);
    if (std::sqrt(n) < grad_floor)
      throw error(errc::singular_point, "gradient of H_i - H_j below floor near (" +
                                            std::to_string(z.real()) + "," +
                                            std::to_string(z.imag()) + ")");
    z -= g * std::conj(da) / n;  // grad g as complex = conj(da)
  }
  double g = fam.harmonic_part(i, z) - fam.harmonic_part(j, z) - level;
  if (std::abs(g) <= curve_tol) return z;
  throw error(errc::step_too_large, "corrector failed to converge");
}

}  // namespace detail

// Predictor-corrector continuation of the level set in both directions from
// the seed, until the trace leaves the window or closes a loop. Predictor
// steps have length `step` along the unit tangent i conj(A_i - A_j)/|.|;
// each is followed by at most 5 Newton corrections.
inline level_curve trace_level_curve(const analytic_family& fam, int i, int j, cplx seed,
                                     double level, double step, const window_rect& win,
                                     trace_options opt = {}) {
  if (step <= 0) throw error(errc::config_error, "step must be positive");
  if (!win.contains(seed)) throw error(errc::config_error, "seed outside the window");
  auto sc = detail::derive_scales(fam, win, opt);

  cplx start = detail::newton_project(fam, i, j, level, seed, sc.curve_tol, sc.grad_floor, 50);
  if (!win.contains(start)) throw error(errc::config_error, "projected seed left the window");

  auto tangent = [&](cplx z) {
    cplx da = fam.value(i, z) - fam.value(j, z);
    double m = std::abs(da);
    if (m < sc.grad_floor)
      throw error(errc::singular_point, "singular point of H_i - H_j at (" +
                                            std::to_string(z.real()) + "," +
                                            std::to_string(z.imag()) + ")");
    return cplx{0.0, 1.0} * std::conj(da) / m;
  };

  bool closed = false;
  auto march = [&](double dir) {
    std::vector<cplx> out;
    cplx z = start;
    cplx t_prev = dir * tangent(start);
    while (out.size() < opt.max_vertices) {
      cplx t = tangent(z);
      if ((t * std::conj(t_prev)).real() < 0) t = -t;  // keep orientation along the branch
      cplx zp = z + step * t;
      if (!win.contains(zp)) break;
      cplx zc = detail::newton_project(fam, i, j, level, zp, sc.curve_tol, sc.grad_floor, 5);
      if (!win.contains(zc)) break;
      if (out.size() >= 3 && std::abs(zc - start) < 0.5 * step &&
          (tangent(zc) * std::conj(dir * tangent(start))).real() > 0) {
        closed = true;
        break;
      }
      out.push_back(zc);
      t_prev = t;
      z = zc;
    }
    if (out.size() >= opt.max_vertices)
      throw error(errc::step_too_large, "trace exceeded the vertex budget");
    return out;
  };

  std::vector<cplx> fwd = march(+1.0);
  std::vector<cplx> verts;
  if (!closed) {
    std::vector<cplx> bwd = march(-1.0);
    verts.assign(bwd.rbegin(), bwd.rend());
  }
  verts.push_back(start);
  verts.insert(verts.end(), fwd.begin(), fwd.end());

  level_curve c;
  c.i = i;
  c.j = j;
  c.level = level;
  c.closed = closed;
  c.vertices = std::move(verts);
  c.arclength.resize(c.vertices.size());
  c.densities.resize(c.vertices.size());
  double s = 0.0;
  for (std::size_t k = 0; k < c.vertices.size(); ++k) {
    if (k > 0) s += std::abs(c.vertices[k] - c.vertices[k - 1]);
    c.arclength[k] = s;
    c.densities[k] = 0.5 * std::abs(fam.value(i, c.vertices[k]) - fam.value(j, c.vertices[k]));
  }
  return c;
}

struct corner_point {
  cplx location;
  bool tangency = false;  // curve directions aligned at the closest approach
};

struct boundary_graph_t {
  std::vector<level_curve> curves;
  std::vector<corner_point> corners;
};

namespace detail {

// connected components of a point cloud under a distance threshold
inline std::vector<int> cluster_points(const std::vector<cplx>& pts, double radius) {
  std::vector<int> comp(pts.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < pts.size(); ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < pts.size(); ++b)
        if (comp[b] < 0 && std::abs(pts[a] - pts[b]) <= radius) {
          comp[b] = next;
          stack.push_back(b);
        }
    }
    ++next;
  }
  return comp;
}

inline double min_vertex_distance(const level_curve& a, const level_curve& b, std::size_t* ia,
                                  std::size_t* ib) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t stride_a = std::max<std::size_t>(1, a.vertices.size() / 512);
  std::size_t stride_b = std::max<std::size_t>(1, b.vertices.size() / 512);
  for (std::size_t s = 0; s < a.vertices.size(); s += stride_a)
    for (std::size_t t = 0; t < b.vertices.size(); t += stride_b) {
      double d = std::abs(a.vertices[s] - b.vertices[t]);
      if (d < best) {
        best = d;
        *ia = s;
        *ib = t;
      }
    }
  return best;
}

}  // namespace detail

// Extract the interface graph of a max-derived labeling: label-change edges
// grouped by member pair, one trace per connected component, plus corner
// candidates. Corners come from grid vertices touching >= 3 labels and from
// close approaches between curves of different pairs (the latter catch
// tangential meetings that cell labels cannot localize).
inline boundary_graph_t boundary_graph(const analytic_family& fam,
                                       const region_labeling& labeling) {
  const grid_window& g = labeling.grid;
  const double h = g.cell();
  boundary_graph_t out;

  // resolve tie cells to their smallest maximizer so an exact tie diagonal
  // does not hide the interface from the edge scan
  region_labeling lab = labeling;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      if (lab.at(ix, iy) == kTie)
        lab.at(ix, iy) = max_field(fam, g.center(ix, iy)).argmax.front();

  std::map<std::pair<int, int>, std::vector<cplx>> edge_mids;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      int a = lab.at(ix, iy);
      if (ix + 1 < g.nx) {
        int b = lab.at(ix + 1, iy);
        if (b != a)
          edge_mids[{std::min(a, b), std::max(a, b)}].push_back(
              0.5 * (g.center(ix, iy) + g.center(ix + 1, iy)));
      }
      if (iy + 1 < g.ny) {
        int b = lab.at(ix, iy + 1);
        if (b != a)
          edge_mids[{std::min(a, b), std::max(a, b)}].push_back(
              0.5 * (g.center(ix, iy) + g.center(ix, iy + 1)));
      }
    }

  // a traced curve is kept only if it separates its two labels along most of
  // its run; stray seeds from corner clusters trace level curves that run
  // through foreign regions and are dropped here
  auto separates = [&](const level_curve& c) {
    int ok = 0, checked = 0;
    std::size_t stride = std::max<std::size_t>(1, c.vertices.size() / 200);
    for (std::size_t k = 0; k < c.vertices.size(); k += stride) {
      cplx v = c.vertices[k];
      cplx da = fam.value(c.i, v) - fam.value(c.j, v);
      cplx n = std::conj(da) / std::abs(da);
      cplx za = v + 1.5 * h * n, zb = v - 1.5 * h * n;
      if (!g.contains(za) || !g.contains(zb)) continue;
      auto [ax, ay] = g.locate(za);
      auto [bx, by] = g.locate(zb);
      int la = lab.at(ax, ay), lb = lab.at(bx, by);
      ++checked;
      if ((la == c.i && lb == c.j) || (la == c.j && lb == c.i)) ++ok;
    }
    return checked > 0 && ok >= (2 * checked) / 3;
  };

  for (auto& [pair, mids] : edge_mids) {
    auto comp = detail::cluster_points(mids, 1.5 * h);
    int ncomp = 1 + *std::max_element(comp.begin(), comp.end());
    for (int c = 0; c < ncomp; ++c) {
      cplx seed{0, 0};
      int cnt = 0;
      for (std::size_t t = 0; t < mids.size(); ++t)
        if (comp[t] == c) {
          seed = mids[t];
          ++cnt;
        }
      if (cnt < 2) continue;  // single stray edge, not a traceable germ
      level_curve cur =
          trace_level_curve(fam, pair.first, pair.second, seed, 0.0, 0.5 * h, g.rect());
      if (!separates(cur)) continue;
      bool dup = false;
      for (const level_curve& prev : out.curves) {
        if (prev.i != cur.i || prev.j != cur.j) continue;
        std::size_t ia = 0, ib = 0;
        if (detail::min_vertex_distance(prev, cur, &ia, &ib) < 2 * h &&
            std::abs(prev.length() - cur.length()) < 4 * h)
          dup = true;
      }
      if (!dup) out.curves.push_back(std::move(cur));
    }
  }

  // label-based corner candidates
  std::vector<cplx> cand;
  for (int iy = 1; iy < g.ny; ++iy)
    for (int ix = 1; ix < g.nx; ++ix) {
      std::vector<int> ls{lab.at(ix - 1, iy - 1), lab.at(ix, iy - 1), lab.at(ix - 1, iy),
                          lab.at(ix, iy)};
      std::sort(ls.begin(), ls.end());
      ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
      if (ls.size() >= 3) cand.push_back(g.origin + cplx{ix * h, iy * h});
    }
  auto comp = detail::cluster_points(cand, 2 * h);
  if (!cand.empty()) {
    int ncomp = 1 + *std::max_element(comp.begin(), comp.end());
    for (int c = 0; c < ncomp; ++c) {
      cplx acc{0, 0};
      int cnt = 0;
      for (std::size_t t = 0; t < cand.size(); ++t)
        if (comp[t] == c) {
          acc += cand[t];
          ++cnt;
        }
      out.corners.push_back({acc / static_cast<double>(cnt), false});
    }
  }

  // close approaches between curves of different pairs
  for (std::size_t a = 0; a < out.curves.size(); ++a)
    for (std::size_t b = a + 1; b < out.curves.size(); ++b) {
      const level_curve &ca = out.curves[a], &cb = out.curves[b];
      if (ca.i == cb.i && ca.j == cb.j) continue;
      std::size_t ia = 0, ib = 0;
      if (detail::min_vertex_distance(ca, cb, &ia, &ib) > 2 * h) continue;
      cplx loc = 0.5 * (ca.vertices[ia] + cb.vertices[ib]);
      auto tang = [&](const level_curve& c, std::size_t t) {
        cplx da = fam.value(c.i, c.vertices[t]) - fam.value(c.j, c.vertices[t]);
        return cplx{0.0, 1.0} * std::conj(da) / std::abs(da);
      };
      double align = std::abs((tang(ca, ia) * std::conj(tang(cb, ib))).real());
      bool tangency = align > std::cos(0.1);
      bool merged = false;
      for (auto& cp : out.corners)
        if (std::abs(cp.location - loc) <= 2 * h) {
          cp.tangency = cp.tangency || tangency;
          merged = true;
        }
      if (!merged) out.corners.push_back({loc, tangency});
    }

  return out;
}

// Directional derivative of Re(f_j - f_k) at the first escape of the path
// from the j-region into the k-region (unit direction of travel). The escape
// parameter is refined by bisection on H_j - H_k along the crossing segment.
inline double escape_monotonicity_check(const analytic_family& fam,
                                        const region_labeling& labeling,
                                        const std::vector<cplx>& path, int j, int k,
                                        cplx* escape_point = nullptr) {
  if (path.size() < 2) throw error(errc::degenerate_input, "path needs at least two vertices");
  const grid_window& g = labeling.grid;
  const double h = g.cell();

  auto label_of = [&](cplx z) {
    if (!g.contains(z)) throw error(errc::invalid_path, "path leaves the grid window");
    auto [ix, iy] = g.locate(z);
    return labeling.at(ix, iy);
  };

  // densified samples along the path
  std::vector<cplx> samples;
  std::vector<std::size_t> seg_of;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    double len = std::abs(path[s + 1] - path[s]);
    int n = std::max(1, static_cast<int>(std::ceil(len / (0.5 * h))));
    for (int t = 0; t < n; ++t) {
      samples.push_back(path[s] + (static_cast<double>(t) / n) * (path[s + 1] - path[s]));
      seg_of.push_back(s);
    }
  }
  samples.push_back(path.back());
  seg_of.push_back(path.size() - 2);

  if (label_of(samples.front()) != j)
    throw error(errc::invalid_path, "path does not start in a j-labeled cell");

  std::size_t first_k = samples.size();
  for (std::size_t s = 0; s < samples.size(); ++s)
    if (label_of(samples[s]) == k) {
      first_k = s;
      break;
    }
  if (first_k == samples.size())
    throw error(errc::no_escape, "path never enters a k-labeled cell");

  std::size_t last_j = 0;
  for (std::size_t s = first_k; s-- > 0;)
    if (label_of(samples[s]) == j) {
      last_j = s;
      break;
    }

  auto gdiff = [&](cplx z) { return fam.harmonic_part(j, z) - fam.harmonic_part(k, z); };
  cplx a = samples[last_j], b = samples[first_k];
  double ga = gdiff(a), gb = gdiff(b);
  cplx cross = 0.5 * (a + b);
  if ((ga > 0) != (gb > 0)) {
    for (int it = 0; it < 80; ++it) {
      cross = 0.5 * (a + b);
      double gm = gdiff(cross);
      if ((gm > 0) == (ga > 0)) {
        a = cross;
        ga = gm;
      } else {
        b = cross;
        gb = gm;
      }
    }
    cross = 0.5 * (a + b);
  }
  if (escape_point) *escape_point = cross;

  cplx seg = path[seg_of[first_k] + 1] - path[seg_of[first_k]];
  cplx dir = seg / std::abs(seg);
  return ((fam.value(j, cross) - fam.value(k, cross)) * dir).real();
}

}  // namespace patchwork
