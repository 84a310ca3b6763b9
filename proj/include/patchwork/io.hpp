#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "patchwork/grid.hpp"
#include "patchwork/level_curves.hpp"
#include "patchwork/measures.hpp"
#include "patchwork/point_analysis.hpp"
#include "patchwork/reachability.hpp"
#include "patchwork/region.hpp"

namespace patchwork {

using json = nlohmann::json;

namespace detail {

// shortest round-trip decimal form, locale-independent
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::io_error, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw error(errc::io_error, "short write to " + path);
}

}  // namespace detail

inline std::string labeling_csv(const region_labeling& lab) {
  std::string s = "x,y,label\n";
  for (int iy = 0; iy < lab.grid.ny; ++iy)
    for (int ix = 0; ix < lab.grid.nx; ++ix) {
      cplx z = lab.grid.center(ix, iy);
      s += detail::num(z.real()) + "," + detail::num(z.imag()) + "," +
           std::to_string(lab.at(ix, iy)) + "\n";
    }
  return s;
}

inline std::string samples_csv(const field_samples<cplx>& f) {
  std::string s = "x,y,re,im\n";
  for (int iy = 0; iy < f.grid.ny; ++iy)
    for (int ix = 0; ix < f.grid.nx; ++ix) {
      cplx z = f.grid.center(ix, iy);
      cplx v = f.at(ix, iy);
      s += detail::num(z.real()) + "," + detail::num(z.imag()) + "," + detail::num(v.real()) +
           "," + detail::num(v.imag()) + "\n";
    }
  return s;
}

inline std::string samples_csv(const field_samples<double>& f) {
  std::string s = "x,y,value\n";
  for (int iy = 0; iy < f.grid.ny; ++iy)
    for (int ix = 0; ix < f.grid.nx; ++ix) {
      cplx z = f.grid.center(ix, iy);
      s += detail::num(z.real()) + "," + detail::num(z.imag()) + "," +
           detail::num(f.at(ix, iy)) + "\n";
    }
  return s;
}

inline std::string curve_csv(const level_curve& c) {
  std::string s = "x,y,s,density\n";
  for (std::size_t k = 0; k < c.vertices.size(); ++k)
    s += detail::num(c.vertices[k].real()) + "," + detail::num(c.vertices[k].imag()) + "," +
         detail::num(c.arclength[k]) + "," + detail::num(c.densities[k]) + "\n";
  return s;
}

inline std::string reach_csv(const reach_set& r) {
  std::string s = "x,y,reachable\n";
  for (int iy = 0; iy < r.grid.ny; ++iy)
    for (int ix = 0; ix < r.grid.nx; ++ix) {
      cplx z = r.grid.center(ix, iy);
      s += detail::num(z.real()) + "," + detail::num(z.imag()) + "," +
           (r.at(ix, iy) ? "1" : "0") + "\n";
    }
  return s;
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json cone_json(const cone2d& c) {
  json dirs = json::array();
  for (cplx d : c.boundary_directions) dirs.push_back(std::arg(d));
  return json{{"kind", cone_kind_name(c.kind)},
              {"edge_angles", dirs},
              {"opening_angle", c.opening_angle()}};
}

inline json profile_json(const point_profile& p) {
  json values = json::array();
  for (cplx v : p.values) values.push_back(to_json(v));
  json hull = json::array();
  for (cplx v : p.hull_vertices) hull.push_back(to_json(v));
  json cones = json::array();
  for (const auto& c : p.cones) cones.push_back(cone_json(c));
  return json{{"point", to_json(p.point)},
              {"values", values},
              {"active", p.active},
              {"hull_vertices", hull},
              {"extreme_set", p.extreme_set},
              {"on_boundary_non_extreme", p.on_boundary_non_extreme},
              {"interior_set", p.interior_set},
              {"cones", cones},
              {"flags",
               {{"active_all", p.flags.active_all},
                {"transversal_triples", p.flags.transversal_triples},
                {"distinct_values", p.flags.distinct_values},
                {"boundary_extreme_only", p.flags.boundary_extreme_only},
                {"cone_condition", p.flags.cone_condition}}},
              {"duplicate_warning", p.duplicate_warning}};
}

inline json graph_manifest_json(const boundary_graph_t& g,
                                const std::vector<std::string>& curve_files) {
  json curves = json::array();
  for (std::size_t k = 0; k < g.curves.size(); ++k) {
    const level_curve& c = g.curves[k];
    json e{{"pair", {c.i, c.j}},
           {"level", c.level},
           {"vertices", c.vertices.size()},
           {"length", c.length()},
           {"closed", c.closed}};
    if (k < curve_files.size()) e["file"] = curve_files[k];
    curves.push_back(e);
  }
  json corners = json::array();
  for (const auto& cp : g.corners)
    corners.push_back(json{{"location", to_json(cp.location)}, {"tangency", cp.tangency}});
  return json{{"curves", curves}, {"corners", corners}};
}

}  // namespace patchwork
