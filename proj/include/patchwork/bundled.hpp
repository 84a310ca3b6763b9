#pragma once

#include <map>
#include <string>

namespace patchwork {

// The two bundled demonstration scenarios, also shipped under scenarios/.

inline const char* kScenarioDiagonalPair = R"json({
  "family": {
    "members": [[[1, 0]], [[0, 1]]],
    "base_point": [0, 0],
    "window": {"x0": -1, "y0": -1, "width": 2, "height": 2},
    "grid": {"nx": 256, "ny": 256}
  },
  "commands": [
    {"op": "classify", "out": "labels.csv"},
    {"op": "analyze-point", "point": [0, 0], "out": "profile.json"},
    {"op": "trace-boundary", "out_prefix": "curve", "out_manifest": "boundary.json"},
    {"op": "verify-positivity", "labeling": "max", "out": "dbar.csv"},
    {"op": "flux-check", "pair": [1, 2], "clip_y": [-0.5, 0.5], "rel_tol": 0.02},
    {"op": "reconstruct-cauchy", "test_radius": 0.45, "avoid_band": 0.1,
     "threshold_rel": 0.001},
    {"op": "monotonicity", "baseline": 1, "n_random": 20, "steps": 50}
  ]
})json";

inline const char* kScenarioTangentCusp = R"json({
  "family": {
    "members": [[], [[4, 0], [2, 0]], [[-1, 0]]],
    "base_point": [0, 0],
    "window": {"x0": -1, "y0": -1, "width": 2, "height": 2},
    "grid": {"nx": 256, "ny": 256}
  },
  "commands": [
    {"op": "analyze-point", "point": [0, 0], "out": "profile.json"},
    {"op": "classify", "out": "labels.csv"},
    {"op": "counterexample", "out": "labels_modified.csv"},
    {"op": "verify-subharmonic", "labeling": "max"},
    {"op": "verify-subharmonic", "labeling": "counterexample"},
    {"op": "trace-boundary", "out_prefix": "curve", "out_manifest": "boundary.json"},
    {"op": "flux-check", "pair": [1, 3], "clip_y": [0.72, 0.88], "rel_tol": 0.02},
    {"op": "verify-positivity", "labeling": "counterexample", "epsilon_cells": 48}
  ]
})json";

inline const std::map<std::string, const char*>& bundled_scenarios() {
  static const std::map<std::string, const char*> m = {
      {"example_1_9", kScenarioDiagonalPair},
      {"example_7_1", kScenarioTangentCusp},
  };
  return m;
}

}  // namespace patchwork
