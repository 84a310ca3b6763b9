#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "patchwork/io.hpp"
#include "patchwork/level_curves.hpp"
#include "patchwork/measures.hpp"
#include "patchwork/point_analysis.hpp"
#include "patchwork/reachability.hpp"
#include "patchwork/region.hpp"
#include "patchwork/version.hpp"

namespace patchwork {

struct scenario_command {
  std::string op;
  json params;
};

struct scenario_t {
  analytic_family family;
  grid_window grid;
  std::vector<scenario_command> commands;
  std::string raw;
};

namespace detail {

inline std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline void require_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& ptr) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw error(errc::config_error, "unknown key '" + it.key() + "' at " + ptr);
}

inline cplx parse_complex(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw error(errc::config_error, "expected [re, im] at " + ptr);
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

inline const std::set<std::string> kScenarioOps = {
    "analyze-point",    "classify",          "trace-boundary", "verify-positivity",
    "verify-subharmonic", "flux-check",      "reconstruct-cauchy", "reachability",
    "coverage",         "counterexample",    "monotonicity"};

// Parse and validate a scenario config. Unknown keys are rejected; defaults
// (epsilon = 6h, tie_tolerance = 0, fit_degree = 4) are applied at run time.
inline scenario_t validate_config(const std::string& raw) {
  json root;
  try {
    root = json::parse(raw);
  } catch (const json::parse_error& e) {
    auto [line, col] = detail::line_col(raw, e.byte > 0 ? e.byte - 1 : 0);
    throw error(errc::config_error, "parse error at line " + std::to_string(line) + ", column " +
                                        std::to_string(col) + ": " + e.what());
  }
  if (!root.is_object()) throw error(errc::config_error, "top level must be an object");
  detail::require_keys(root, {"family", "commands"}, "/");
  if (!root.contains("family")) throw error(errc::config_error, "missing /family");

  const json& fam_j = root["family"];
  detail::require_keys(fam_j, {"members", "base_point", "window", "grid"}, "/family");
  if (!fam_j.contains("members") || !fam_j["members"].is_array())
    throw error(errc::config_error, "missing or invalid /family/members");

  std::vector<complex_poly> members;
  for (std::size_t m = 0; m < fam_j["members"].size(); ++m) {
    const json& mj = fam_j["members"][m];
    std::string ptr = "/family/members/" + std::to_string(m);
    if (!mj.is_array()) throw error(errc::config_error, "expected coefficient list at " + ptr);
    std::vector<cplx> coeffs;
    for (std::size_t c = 0; c < mj.size(); ++c)
      coeffs.push_back(detail::parse_complex(mj[c], ptr + "/" + std::to_string(c)));
    members.push_back(complex_poly(std::move(coeffs)));
  }
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b)
      if (members[a] == members[b])
        throw error(errc::config_error, "duplicate members at /family/members/" +
                                            std::to_string(a) + " and /family/members/" +
                                            std::to_string(b));
  if (members.size() < 2)
    throw error(errc::config_error, "need at least two members at /family/members");

  cplx base = fam_j.contains("base_point")
                  ? detail::parse_complex(fam_j["base_point"], "/family/base_point")
                  : cplx{0, 0};

  window_rect win{-1, -1, 2, 2};
  if (fam_j.contains("window")) {
    const json& w = fam_j["window"];
    detail::require_keys(w, {"x0", "y0", "width", "height"}, "/family/window");
    for (const char* key : {"x0", "y0", "width", "height"})
      if (!w.contains(key) || !w[key].is_number())
        throw error(errc::config_error, std::string("missing numeric /family/window/") + key);
    win = {w["x0"].get<double>(), w["y0"].get<double>(), w["width"].get<double>(),
           w["height"].get<double>()};
  }

  int nx = 128, ny = 128;
  if (fam_j.contains("grid")) {
    const json& g = fam_j["grid"];
    detail::require_keys(g, {"nx", "ny"}, "/family/grid");
    if (g.contains("nx")) nx = g["nx"].get<int>();
    if (g.contains("ny")) ny = g["ny"].get<int>();
  }

  analytic_family family = [&] {
    try {
      return analytic_family(std::move(members), base, win);
    } catch (const error& e) {
      throw error(errc::config_error, std::string("/family: ") + e.what());
    }
  }();
  grid_window grid = [&] {
    try {
      return grid_window::over(win, nx, ny);
    } catch (const error& e) {
      throw error(errc::config_error, std::string("/family/grid: ") + e.what());
    }
  }();

  scenario_t out{std::move(family), grid, {}, raw};

  std::set<std::string> out_paths;
  if (root.contains("commands")) {
    if (!root["commands"].is_array())
      throw error(errc::config_error, "/commands must be an array");
    for (std::size_t c = 0; c < root["commands"].size(); ++c) {
      const json& cj = root["commands"][c];
      std::string ptr = "/commands/" + std::to_string(c);
      if (!cj.is_object() || !cj.contains("op"))
        throw error(errc::config_error, "missing op at " + ptr);
      std::string op = cj["op"].get<std::string>();
      if (!kScenarioOps.count(op))
        throw error(errc::config_error, "unknown op '" + op + "' at " + ptr + "/op");
      json params = cj;
      params.erase("op");
      // member index references must be declared
      for (const char* key : {"baseline", "member"})
        if (params.contains(key)) {
          int i = params[key].get<int>();
          if (i < 1 || i > out.family.size())
            throw error(errc::config_error,
                        "member index out of range at " + ptr + "/" + key);
        }
      if (params.contains("pair")) {
        for (const auto& e : params["pair"]) {
          int i = e.get<int>();
          if (i < 1 || i > out.family.size())
            throw error(errc::config_error, "member index out of range at " + ptr + "/pair");
        }
      }
      for (const char* key : {"out", "out_manifest"})
        if (params.contains(key)) {
          std::string path = params[key].get<std::string>();
          if (!out_paths.insert(path).second)
            throw error(errc::config_error,
                        "duplicate output path '" + path + "' at " + ptr + "/" + key);
        }
      out.commands.push_back({op, params});
    }
  }
  return out;
}

struct report_t {
  json body;
  bool any_error = false;
  bool any_false_verdict = false;

  int exit_code() const { return any_error ? 3 : (any_false_verdict ? 1 : 0); }
};

namespace detail {

inline label_rule rule_from_params(const analytic_family& fam, const json& params) {
  std::string kind = params.value("labeling", "max");
  if (kind == "max") return max_label_rule(fam);
  if (kind == "counterexample") {
    if (fam.size() != 3)
      throw error(errc::config_error, "counterexample labeling needs the 3-member family");
    return [&fam](cplx z) { return counterexample_label_at(fam, z); };
  }
  if (kind == "half-plane") {
    double angle = params.value("half_plane_angle", 0.0);
    return half_plane_label_rule(fam.base_point(), std::polar(1.0, angle));
  }
  throw error(errc::config_error, "unknown labeling '" + kind + "'");
}

inline std::vector<cplx> spiral_points(cplx center, double radius, int wanted,
                                       const std::function<bool(cplx)>& keep) {
  // sunflower spiral: deterministic, roughly uniform over the disk
  std::vector<cplx> pts;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 1; pts.size() < static_cast<std::size_t>(wanted) && k < 100000; ++k) {
    double r = radius * std::sqrt(static_cast<double>(k) / (wanted * 8.0));
    if (r > radius) break;
    cplx z = center + std::polar(r, golden * k);
    if (keep(z)) pts.push_back(z);
  }
  return pts;
}

}  // namespace detail

// Execute the commands in order, writing artifacts under out_dir. Dependent
// commands (flux-check, reconstruct-cauchy) consume the most recent
// trace-boundary result and fail cleanly when it is missing.
inline report_t run_scenario(const scenario_t& sc, const std::string& out_dir,
                             std::uint64_t seed = 0) {
  namespace fs = std::filesystem;
  if (!out_dir.empty()) fs::create_directories(out_dir);
  auto resolve = [&](const std::string& rel) {
    return out_dir.empty() ? rel : (fs::path(out_dir) / rel).string();
  };

  report_t rep;
  const analytic_family& fam = sc.family;
  const grid_window& grid = sc.grid;
  const double h = grid.cell();

  json commands = json::array();
  json timings = json::array();

  std::optional<region_labeling> traced_labeling;
  std::optional<boundary_graph_t> graph;

  for (std::size_t ci = 0; ci < sc.commands.size(); ++ci) {
    const scenario_command& cmd = sc.commands[ci];
    const json& p = cmd.params;
    json entry{{"index", ci}, {"op", cmd.op}, {"status", "ok"}};
    auto t0 = std::chrono::steady_clock::now();
    try {
      double eps = p.value("epsilon_cells", 6.0) * h;
      if (cmd.op == "classify") {
        region_labeling lab = classify_grid(fam, grid, p.value("tie_tolerance", 0.0));
        std::map<int, int> counts;
        for (int c : lab.label) ++counts[c];
        json jc;
        for (auto [k, v] : counts) jc[std::to_string(k)] = v;
        entry["cell_counts"] = jc;
        if (p.contains("out")) {
          detail::write_text(resolve(p["out"].get<std::string>()), labeling_csv(lab));
          entry["files"] = {p["out"].get<std::string>()};
        }
      } else if (cmd.op == "analyze-point") {
        cplx z = detail::parse_complex(p.at("point"), "point");
        std::vector<int> active;
        if (p.contains("active")) active = p["active"].get<std::vector<int>>();
        else
          for (int i = 1; i <= fam.size(); ++i) active.push_back(i);
        point_profile prof = genericity_report(fam, z, active);
        entry["profile"] = profile_json(prof);
        if (p.contains("out"))
          detail::write_text(resolve(p["out"].get<std::string>()),
                             profile_json(prof).dump(2) + "\n");
      } else if (cmd.op == "trace-boundary") {
        region_labeling lab = classify_grid(fam, grid, p.value("tie_tolerance", 0.0));
        boundary_graph_t g = boundary_graph(fam, lab);
        std::vector<std::string> files;
        std::string prefix = p.value("out_prefix", std::string{});
        if (!prefix.empty()) {
          for (std::size_t k = 0; k < g.curves.size(); ++k) {
            std::string name = prefix + "_" + std::to_string(k) + ".csv";
            detail::write_text(resolve(name), curve_csv(g.curves[k]));
            files.push_back(name);
          }
        }
        entry["manifest"] = graph_manifest_json(g, files);
        if (p.contains("out_manifest"))
          detail::write_text(resolve(p["out_manifest"].get<std::string>()),
                             entry["manifest"].dump(2) + "\n");
        traced_labeling = std::move(lab);
        graph = std::move(g);
      } else if (cmd.op == "verify-positivity") {
        label_rule rule = detail::rule_from_params(fam, p);
        int ss = p.value("supersample", 8);
        field_samples<cplx> phi = build_field_samples(fam, rule, grid, ss);
        mollifier mol(eps);
        double tol = p.contains("tol_pos") ? p["tol_pos"].get<double>()
                                           : default_tol_pos(fam, grid);
        positivity_result res = positivity_verdict(phi, mol, tol);
        entry["verdict"] = res.verdict;
        entry["worst_value"] = res.worst_value;
        entry["worst_cell"] = to_json(res.worst_cell);
        entry["min_re"] = res.min_re;
        entry["max_abs_im"] = res.max_abs_im;
        entry["tolerances"] = {{"tol_pos", tol}, {"epsilon", eps}, {"h", h}};
        if (!res.verdict) rep.any_false_verdict = true;
        if (p.contains("out")) {
          detail::write_text(resolve(p["out"].get<std::string>()),
                             samples_csv(mollified_dbar(phi, mol)));
          entry["files"] = {p["out"].get<std::string>()};
        }
      } else if (cmd.op == "verify-subharmonic") {
        label_rule rule = detail::rule_from_params(fam, p);
        field_samples<double> phi = build_potential_samples(fam, rule, grid);
        mollifier mol(eps);
        double tol = p.contains("tol_pos") ? p["tol_pos"].get<double>()
                                           : 2.0 * default_tol_pos(fam, grid);
        subharmonic_result res = subharmonic_verdict(phi, mol, tol);
        entry["verdict"] = res.verdict;
        entry["min_laplacian"] = res.min_laplacian;
        entry["worst_cell"] = to_json(res.worst_cell);
        entry["tolerances"] = {{"tol_pos", tol}, {"epsilon", eps}, {"h", h}};
        if (!res.verdict) rep.any_false_verdict = true;
      } else if (cmd.op == "flux-check") {
        if (!graph) throw error(errc::config_error, "flux-check requires trace-boundary first");
        auto pr = p.at("pair");
        int pi = pr[0].get<int>(), pj = pr[1].get<int>();
        if (pi > pj) std::swap(pi, pj);
        mollifier mol(eps);
        double band = p.value("band_cells", p.value("epsilon_cells", 6.0) + 2.0) * h;
        double rel_tol = p.value("rel_tol", 0.02);
        field_samples<cplx> phi =
            build_field_samples(fam, max_label_rule(fam), grid, p.value("supersample", 8));
        json checks = json::array();
        bool all_ok = true;
        for (const level_curve& c : graph->curves) {
          if (c.i != pi || c.j != pj) continue;
          level_curve clip = c;
          if (p.contains("clip_y")) {
            double lo = p["clip_y"][0].get<double>(), hi = p["clip_y"][1].get<double>();
            level_curve cc;
            cc.i = c.i;
            cc.j = c.j;
            cc.level = c.level;
            for (std::size_t k = 0; k < c.vertices.size(); ++k) {
              double y = c.vertices[k].imag();
              if (y < lo || y > hi) {
                if (!cc.vertices.empty()) break;  // keep the first contiguous run
                continue;
              }
              cc.vertices.push_back(c.vertices[k]);
              cc.densities.push_back(c.densities[k]);
              cc.arclength.push_back(cc.vertices.size() == 1
                                         ? 0.0
                                         : cc.arclength.back() +
                                               std::abs(cc.vertices.back() -
                                                        cc.vertices[cc.vertices.size() - 2]));
            }
            clip = std::move(cc);
          }
          if (clip.vertices.size() < 2) continue;
          flux_result fr = flux_vs_density(phi, mol, clip, band);
          double ratio = fr.predicted != 0 ? fr.measured / fr.predicted : 0.0;
          bool ok = std::abs(ratio - 1.0) <= rel_tol;
          all_ok = all_ok && ok;
          checks.push_back({{"measured", fr.measured},
                            {"predicted", fr.predicted},
                            {"ratio", ratio},
                            {"ok", ok}});
        }
        if (checks.empty())
          throw error(errc::config_error, "no traced curve matches the requested pair");
        entry["checks"] = checks;
        entry["verdict"] = all_ok;
        entry["tolerances"] = {{"rel_tol", rel_tol}, {"band", band}, {"epsilon", eps}, {"h", h}};
        if (!all_ok) rep.any_false_verdict = true;
      } else if (cmd.op == "reconstruct-cauchy") {
        if (!graph || !traced_labeling)
          throw error(errc::config_error, "reconstruct-cauchy requires trace-boundary first");
        int fit_degree = p.value("fit_degree", 4);
        int n_points = p.value("n_points", 200);
        double radius = p.value("test_radius", 0.45);
        double band = p.value("avoid_band", 0.1);
        double spacing = p.value("refine_spacing", h / 4.0);
        boundary_measure measure;
        for (const level_curve& c : graph->curves) {
          boundary_measure one = boundary_measure::from_curves({c});
          boundary_measure fine = refine_measure(one, spacing, &fam, c.i, c.j);
          measure.arcs.push_back(fine.arcs[0]);
        }
        cplx p0 = fam.base_point();
        auto clear = [&](cplx z) {
          if (std::abs(z - p0) > radius) return false;
          for (const auto& arc : measure.arcs)
            for (std::size_t k = 0; k + 1 < arc.vertices.size(); k += 8)
              if (std::abs(z - arc.vertices[k]) < band) return false;
          for (const auto& arc : measure.arcs)
            if (std::abs(z - arc.vertices.back()) < band) return false;
          return true;
        };
        std::vector<cplx> pts = detail::spiral_points(p0, radius, n_points, clear);
        if (static_cast<int>(pts.size()) < std::max(fit_degree + 1, n_points / 2))
          throw error(errc::degenerate_input, "not enough clear test points in the disk");
        pa_field_t field{fam, *traced_labeling};
        double scale = 0.0;
        for (int i = 1; i <= fam.size(); ++i)
          scale = std::max(scale, std::abs(fam.value(i, p0 + radius)));
        double residual = reconstruction_residual(fam, field, measure, pts, fit_degree);
        double threshold = p.value("threshold_rel", 1e-2) * std::max(scale, 1e-300);
        entry["residual"] = residual;
        entry["scale"] = scale;
        entry["n_points"] = pts.size();
        entry["verdict"] = residual <= threshold;
        entry["tolerances"] = {{"threshold", threshold}, {"fit_degree", fit_degree}};
        if (residual > threshold) rep.any_false_verdict = true;
      } else if (cmd.op == "reachability") {
        cplx src = detail::parse_complex(p.at("source"), "source");
        int baseline = p.value("baseline", 1);
        reach_set r = descent_reachable(fam, src, grid, baseline);
        int count = 0;
        for (std::uint8_t b : r.reachable) count += b;
        entry["reachable_cells"] = count;
        if (p.contains("out")) {
          detail::write_text(resolve(p["out"].get<std::string>()), reach_csv(r));
          entry["files"] = {p["out"].get<std::string>()};
        }
      } else if (cmd.op == "coverage") {
        int baseline = p.value("baseline", 1);
        auto bx = p.at("target_box");
        double x0 = bx[0].get<double>(), y0 = bx[1].get<double>(), x1 = bx[2].get<double>(),
               y1 = bx[3].get<double>();
        std::vector<std::pair<int, int>> target;
        for (int iy = 0; iy < grid.ny; ++iy)
          for (int ix = 0; ix < grid.nx; ++ix) {
            cplx z = grid.center(ix, iy);
            if (z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1)
              target.push_back({ix, iy});
          }
        std::vector<cplx> seq;
        if (p.contains("sequence_start")) {
          cplx s0 = detail::parse_complex(p["sequence_start"], "sequence_start");
          int count = p.value("sequence_count", 8);
          for (int n = 1; n <= count; ++n) seq.push_back(s0 / static_cast<double>(n));
        } else {
          for (const auto& e : p.at("sequence")) seq.push_back(detail::parse_complex(e, "sequence"));
        }
        coverage_result res = limit_coverage_test(fam, fam.base_point(), target, seq, grid, baseline);
        entry["verdict"] = res.ok;
        if (res.ok) entry["n0"] = res.n0;
        else
          entry["uncovered_cell"] = {res.uncovered_cell.first, res.uncovered_cell.second};
        if (!res.ok) rep.any_false_verdict = true;
      } else if (cmd.op == "counterexample") {
        region_labeling maxlab = classify_grid(fam, grid, 0.0);
        region_labeling psi = counterexample_labeling(grid);
        int differ = 0;
        for (int c = 0; c < grid.count(); ++c)
          if (maxlab.label[static_cast<std::size_t>(c)] != psi.label[static_cast<std::size_t>(c)])
            ++differ;
        double fraction = static_cast<double>(differ) / grid.count();
        entry["differing_fraction"] = fraction;
        entry["verdict"] = fraction > 0.0;
        if (fraction <= 0.0) rep.any_false_verdict = true;
        if (p.contains("out")) {
          detail::write_text(resolve(p["out"].get<std::string>()), labeling_csv(psi));
          entry["files"] = {p["out"].get<std::string>()};
        }
      } else if (cmd.op == "monotonicity") {
        int baseline = p.value("baseline", 1);
        label_rule rule = detail::rule_from_params(fam, p);
        region_labeling lab{grid, std::vector<int>(static_cast<std::size_t>(grid.count()), 0),
                            0.0};
        for (int iy = 0; iy < grid.ny; ++iy)
          for (int ix = 0; ix < grid.nx; ++ix) lab.at(ix, iy) = rule(grid.center(ix, iy));
        pa_field_t field{fam, lab};
        mollifier mol(eps);
        bool all_hold = true;
        double worst = 0.0;
        int ran = 0;
        if (p.contains("paths")) {
          for (const auto& pj : p["paths"]) {
            std::vector<cplx> path;
            for (const auto& e : pj) path.push_back(detail::parse_complex(e, "paths"));
            monotonicity_result r = convolution_monotonicity_check(field, baseline, mol, path);
            all_hold = all_hold && r.holds;
            worst = std::min(worst, r.worst_violation);
            ++ran;
          }
        } else {
          int n_random = p.value("n_random", 20);
          int steps = p.value("steps", 50);
          std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
          int margin = static_cast<int>(std::ceil(mol.radius / h)) + 2;
          std::uniform_int_distribution<int> cell_x(margin, grid.nx - margin - 1);
          std::uniform_int_distribution<int> cell_y(margin, grid.ny - margin - 1);
          for (int t = 0; t < n_random; ++t) {
            std::vector<cplx> path = random_descent_path(
                fam, grid, baseline, {cell_x(rng), cell_y(rng)}, steps, rng);
            if (path.size() < 2) continue;
            bool clear = true;
            for (cplx v : path) {
              double dx = std::min(v.real() - grid.origin.real(),
                                   grid.origin.real() + grid.width - v.real());
              double dy = std::min(v.imag() - grid.origin.imag(),
                                   grid.origin.imag() + grid.height - v.imag());
              if (std::min(dx, dy) < mol.radius + h) clear = false;
            }
            if (!clear) continue;
            monotonicity_result r = convolution_monotonicity_check(field, baseline, mol, path);
            all_hold = all_hold && r.holds;
            worst = std::min(worst, r.worst_violation);
            ++ran;
          }
        }
        entry["paths_checked"] = ran;
        entry["worst_violation"] = worst;
        entry["verdict"] = all_hold;
        if (!all_hold) rep.any_false_verdict = true;
      }
    } catch (const error& e) {
      entry["status"] = "error";
      entry["error"] = e.what();
      rep.any_error = true;
    } catch (const json::exception& e) {
      entry["status"] = "error";
      entry["error"] = std::string("parameter error: ") + e.what();
      rep.any_error = true;
    }
    auto t1 = std::chrono::steady_clock::now();
    timings.push_back(
        {{"index", ci},
         {"op", cmd.op},
         {"ms", std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()}});
    commands.push_back(std::move(entry));
  }

  rep.body = json{{"version", kVersion},
                  {"config_hash", detail::hex64(detail::fnv1a(sc.raw))},
                  {"seed", seed},
                  {"grid",
                   {{"nx", grid.nx},
                    {"ny", grid.ny},
                    {"cell", grid.cell()},
                    {"origin", to_json(grid.origin)}}},
                  {"commands", commands},
                  {"timings", timings}};
  return rep;
}

}  // namespace patchwork
