#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "patchwork/family.hpp"

namespace patchwork {

// Scale-relative tolerance for the collinearity / distinctness tests at a
// point. Exact zeros always count as zero.
inline double point_tolerance(const analytic_family& fam, cplx p) {
  double scale = 0.0;
  for (int i = 1; i <= fam.size(); ++i) scale = std::max(scale, std::abs(fam.value(i, p)));
  return 1e-9 * scale * scale;
}

// Im[(A_i - A_k) conj(A_j - A_k)] at z; zero iff the three values are
// collinear. |residual| is twice the area of the value triangle.
inline double critical_residual(const analytic_family& fam, cplx z, int i, int j, int k) {
  if (i == j || j == k || i == k)
    throw error(errc::degenerate_input, "triple indices must be pairwise distinct");
  cplx ak = fam.value(k, z);
  return std::imag((fam.value(i, z) - ak) * std::conj(fam.value(j, z) - ak));
}

struct cone2d {
  enum class kind_t { point, ray, line, half_plane, pointed, full };
  kind_t kind = kind_t::point;
  // pointed: the two edge directions (CCW order); ray/line: the direction;
  // half_plane: the interior boundary normal.
  std::vector<cplx> boundary_directions;

  double opening_angle() const {
    switch (kind) {
      case kind_t::point: return 0.0;
      case kind_t::ray: return 0.0;
      case kind_t::line: return 0.0;
      case kind_t::half_plane: return std::numbers::pi;
      case kind_t::full: return 2.0 * std::numbers::pi;
      case kind_t::pointed: {
        double a = std::arg(boundary_directions[1] / boundary_directions[0]);
        if (a < 0) a += 2.0 * std::numbers::pi;
        return a;
      }
    }
    return 0.0;
  }
};

inline const char* cone_kind_name(cone2d::kind_t k) {
  switch (k) {
    case cone2d::kind_t::point: return "point";
    case cone2d::kind_t::ray: return "ray";
    case cone2d::kind_t::line: return "line";
    case cone2d::kind_t::half_plane: return "half_plane";
    case cone2d::kind_t::pointed: return "pointed";
    case cone2d::kind_t::full: return "full";
  }
  return "?";
}

namespace detail {

inline double wrap_2pi(double a) {
  const double tau = 2.0 * std::numbers::pi;
  a = std::fmod(a, tau);
  if (a < 0) a += tau;
  return a;
}

}  // namespace detail

// sigma_i(p): intersection of the half-planes {v : Re[v (A_j(p)-A_i(p))] <= 0}.
// Directions feasible for one constraint form a closed half-circle; the
// intersection is found by unrolling all arcs around one feasible direction.
inline cone2d dual_cone(const analytic_family& fam, cplx p, int i,
                        std::optional<std::vector<int>> active = std::nullopt) {
  std::vector<int> idx;
  if (active) idx = *active;
  else
    for (int j = 1; j <= fam.size(); ++j) idx.push_back(j);
  double tol = point_tolerance(fam, p);
  cplx ai = fam.value(i, p);
  std::vector<cplx> d;
  for (int j : idx) {
    if (j == i) continue;
    cplx dj = fam.value(j, p) - ai;
    if (std::abs(dj) * std::abs(dj) <= tol)
      throw error(errc::duplicate_value, "members " + std::to_string(i) + " and " +
                                             std::to_string(j) + " share the value at p");
    d.push_back(dj);
  }
  if (d.empty()) return cone2d{cone2d::kind_t::full, {}};

  auto feasible = [&](double theta) {
    cplx v = std::polar(1.0, theta);
    for (cplx dj : d)
      if ((v * dj).real() > 1e-12 * std::abs(dj)) return false;
    return true;
  };

  // candidate directions: arc endpoints of every constraint
  const double pi = std::numbers::pi;
  std::optional<double> theta0;
  for (cplx dj : d) {
    for (double cand : {pi / 2 - std::arg(dj), 3 * pi / 2 - std::arg(dj)}) {
      if (feasible(cand)) {
        theta0 = cand;
        break;
      }
    }
    if (theta0) break;
  }
  if (!theta0) return cone2d{cone2d::kind_t::point, {}};

  // each feasible arc is [l_j, l_j + pi]; unroll around theta0
  double lo = -4 * pi, hi = 4 * pi;
  for (cplx dj : d) {
    double l = pi / 2 - std::arg(dj);
    double a = detail::wrap_2pi(*theta0 - l);  // in [0, 2pi); feasibility puts it near [0, pi]
    if (a > 1.5 * pi) a -= 2 * pi;             // theta0 a hair below the arc start
    double L = *theta0 - a;
    lo = std::max(lo, L);
    hi = std::min(hi, L + pi);
  }
  double w = hi - lo;
  const double ang_tol = 1e-9;
  if (w < -ang_tol) return cone2d{cone2d::kind_t::point, {}};
  if (w <= ang_tol) {
    double t = 0.5 * (lo + hi);
    if (feasible(t + pi))
      return cone2d{cone2d::kind_t::line, {std::polar(1.0, t)}};
    return cone2d{cone2d::kind_t::ray, {std::polar(1.0, t)}};
  }
  if (w >= pi - ang_tol)
    return cone2d{cone2d::kind_t::half_plane, {std::polar(1.0, 0.5 * (lo + hi))}};
  return cone2d{cone2d::kind_t::pointed, {std::polar(1.0, lo), std::polar(1.0, hi)}};
}

// true iff 0 is not a nonnegative nontrivial combination of the generators
// {A_k(p) - A_j(p)}. A zero generator puts 0 in the cone outright; otherwise
// 0 stays outside iff all generators fit in an open half-plane, i.e. the
// largest circular gap between generator directions exceeds pi.
inline bool vk_cone_test(const analytic_family& fam, cplx p, int k, const std::vector<int>& active,
                         bool* duplicate_warning = nullptr) {
  if (duplicate_warning) *duplicate_warning = false;
  if (active.size() < 2) throw error(errc::degenerate_input, "active set needs >= 2 members");
  if (std::find(active.begin(), active.end(), k) == active.end())
    throw error(errc::degenerate_input, "k must belong to the active set");
  double tol = point_tolerance(fam, p);
  cplx akv = fam.value(k, p);
  std::vector<double> ang;
  for (int j : active) {
    if (j == k) continue;
    cplx g = akv - fam.value(j, p);
    if (std::abs(g) * std::abs(g) <= tol) {
      if (duplicate_warning) *duplicate_warning = true;
      return false;
    }
    ang.push_back(detail::wrap_2pi(std::arg(g)));
  }
  std::sort(ang.begin(), ang.end());
  double gap = 2.0 * std::numbers::pi - (ang.back() - ang.front());
  for (std::size_t t = 1; t < ang.size(); ++t) gap = std::max(gap, ang[t] - ang[t - 1]);
  return gap > std::numbers::pi + 1e-9;
}

struct point_flags {
  bool active_all = false;          // every member active at p
  bool transversal_triples = true;  // no active triple of values collinear
  bool distinct_values = true;      // active values pairwise distinct
  bool boundary_extreme_only = true;  // no active value on the hull boundary
                                      // without being a vertex
  bool cone_condition = true;         // vk test holds for every active k
};

struct point_profile {
  cplx point;
  std::vector<cplx> values;  // A_i(p) for all members, 1-based order
  std::vector<int> active;
  std::vector<cplx> hull_vertices;            // CCW
  std::vector<int> extreme_set;               // S(p)
  std::vector<int> on_boundary_non_extreme;   // boundary but not vertex
  std::vector<int> interior_set;
  std::vector<cone2d> cones;  // parallel to active; empty if values collide
  point_flags flags;
  bool duplicate_warning = false;
};

namespace detail {

// hull of a small point set via monotone chain; near-collinear turns (within
// tol, same scale as the critical residual) are flattened.
inline std::vector<cplx> hull_ccw(std::vector<cplx> pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;
  auto cross = [](cplx o, cplx a, cplx b) { return std::imag(std::conj(a - o) * (b - o)); };
  std::vector<cplx> lo, up;
  for (cplx p : pts) {
    while (lo.size() >= 2 && cross(lo[lo.size() - 2], lo.back(), p) <= tol) lo.pop_back();
    lo.push_back(p);
  }
  for (std::size_t t = pts.size(); t-- > 0;) {
    cplx p = pts[t];
    while (up.size() >= 2 && cross(up[up.size() - 2], up.back(), p) <= tol) up.pop_back();
    up.push_back(p);
  }
  lo.pop_back();
  up.pop_back();
  lo.insert(lo.end(), up.begin(), up.end());
  return lo;
}

inline double dist_point_segment(cplx z, cplx a, cplx b) {
  cplx ab = b - a;
  double L2 = std::norm(ab);
  if (L2 == 0.0) return std::abs(z - a);
  double t = std::clamp((std::conj(ab) * (z - a)).real() / L2, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

}  // namespace detail

// Convex hull of the active values with the extreme / boundary / interior
// classification. Handles the degenerate segment hull: endpoints are extreme,
// interior-of-segment values sit on the boundary without being extreme.
inline point_profile convex_hull_profile(const analytic_family& fam, cplx p,
                                         std::optional<std::vector<int>> active_in = std::nullopt) {
  point_profile out;
  out.point = p;
  for (int i = 1; i <= fam.size(); ++i) out.values.push_back(fam.value(i, p));
  if (active_in) out.active = *active_in;
  else
    for (int i = 1; i <= fam.size(); ++i) out.active.push_back(i);
  std::sort(out.active.begin(), out.active.end());
  double tol = point_tolerance(fam, p);
  double dist_tol = std::sqrt(tol);  // residuals ~ scale^2, distances ~ scale

  std::vector<cplx> pts;
  for (int i : out.active) pts.push_back(out.values[static_cast<std::size_t>(i - 1)]);
  out.hull_vertices = detail::hull_ccw(pts, tol);

  if (out.hull_vertices.size() <= 1) {
    // all values coincide: the single point is its own extreme set
    out.extreme_set = out.active;
    out.flags.boundary_extreme_only = true;
    return out;
  }

  const auto& H = out.hull_vertices;
  for (std::size_t t = 0; t < out.active.size(); ++t) {
    cplx v = pts[t];
    int idx = out.active[t];
    bool vertex = false;
    for (cplx hv : H)
      if (std::abs(v - hv) <= dist_tol) vertex = true;
    if (vertex) {
      out.extreme_set.push_back(idx);
      continue;
    }
    bool on_edge = false;
    for (std::size_t e = 0; e < H.size(); ++e) {
      cplx a = H[e], b = H[(e + 1) % H.size()];
      if (H.size() == 2 && e == 1) break;
      if (detail::dist_point_segment(v, a, b) <= dist_tol) on_edge = true;
    }
    if (on_edge) out.on_boundary_non_extreme.push_back(idx);
    else out.interior_set.push_back(idx);
  }
  out.flags.boundary_extreme_only = out.on_boundary_non_extreme.empty();
  return out;
}

// Full pointwise report: hull classification plus the collinearity,
// distinctness and cone conditions over the active set. active_evidence
// states whether the caller certified that every member is active at p; by
// default it is inferred from the active set covering 1..r.
inline point_profile genericity_report(const analytic_family& fam, cplx p, std::vector<int> active,
                                       std::optional<bool> active_evidence = std::nullopt) {
  if (active.empty()) throw error(errc::degenerate_input, "active set must be nonempty");
  std::sort(active.begin(), active.end());
  point_profile out = convex_hull_profile(fam, p, active);
  double tol = point_tolerance(fam, p);
  double dist_tol = std::sqrt(tol);

  out.flags.active_all =
      active_evidence ? *active_evidence : static_cast<int>(active.size()) == fam.size();

  for (std::size_t a = 0; a < active.size() && out.flags.distinct_values; ++a)
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      cplx diff = out.values[static_cast<std::size_t>(active[a] - 1)] -
                  out.values[static_cast<std::size_t>(active[b] - 1)];
      if (std::abs(diff) <= dist_tol) {
        out.flags.distinct_values = false;
        break;
      }
    }

  if (active.size() >= 3) {
    for (std::size_t a = 0; a < active.size() && out.flags.transversal_triples; ++a)
      for (std::size_t b = a + 1; b < active.size() && out.flags.transversal_triples; ++b)
        for (std::size_t c = b + 1; c < active.size(); ++c) {
          double res = critical_residual(fam, p, active[a], active[b], active[c]);
          if (std::abs(res) <= tol) {
            out.flags.transversal_triples = false;
            break;
          }
        }
  }

  if (active.size() >= 2) {
    for (int k : active) {
      bool warn = false;
      if (!vk_cone_test(fam, p, k, active, &warn)) out.flags.cone_condition = false;
      out.duplicate_warning = out.duplicate_warning || warn;
    }
  }

  if (out.flags.distinct_values) {
    for (int i : active) out.cones.push_back(dual_cone(fam, p, i, active));
  }
  return out;
}

}  // namespace patchwork
