#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "patchwork/errors.hpp"
#include "patchwork/grid.hpp"

namespace patchwork {

// Radial bump c (1 - (|z|/eps)^2)^4 with unit mass. Compactly supported and
// C^3 across the support boundary, which keeps the finite-difference stencils
// of the mollified fields stable.
struct mollifier {
  double radius;

  explicit mollifier(double eps) : radius(eps) {
    if (eps <= 0) throw error(errc::config_error, "mollifier radius must be positive");
  }

  double weight(cplx w) const {
    double t = std::norm(w) / (radius * radius);
    if (t >= 1.0) return 0.0;
    double u = 1.0 - t;
    double u2 = u * u;
    return 5.0 / (std::numbers::pi * radius * radius) * u2 * u2;
  }
};

// Sampled kernel on the cell lattice, renormalized so the discrete mass
// h^2 * sum(w) is exactly 1.
struct sampled_kernel {
  int half_width;               // taps span [-half_width, half_width]^2
  std::vector<double> weights;  // (2*half_width+1)^2, row-major over dy

  double at(int dx, int dy) const {
    int n = 2 * half_width + 1;
    return weights[static_cast<std::size_t>((dy + half_width) * n + (dx + half_width))];
  }
};

inline sampled_kernel sample_kernel(const mollifier& mol, double h) {
  if (mol.radius < 3.0 * h)
    throw error(errc::under_resolved, "mollifier radius below 3 cells; refine the grid");
  int m = static_cast<int>(std::floor(mol.radius / h));
  int n = 2 * m + 1;
  sampled_kernel k{m, std::vector<double>(static_cast<std::size_t>(n * n), 0.0)};
  double mass = 0.0;
  for (int dy = -m; dy <= m; ++dy)
    for (int dx = -m; dx <= m; ++dx) {
      double w = mol.weight(cplx{dx * h, dy * h});
      k.weights[static_cast<std::size_t>((dy + m) * n + (dx + m))] = w;
      mass += w;
    }
  double scale = 1.0 / (mass * h * h);
  for (double& w : k.weights) w *= scale;
  return k;
}

// Discrete convolution with the sampled kernel, evaluated on cells whose
// kernel support stays inside the grid. margin_cells of the result marks the
// unusable frame.
template <class T>
field_samples<T> mollify(const field_samples<T>& f, const mollifier& mol) {
  const grid_window& g = f.grid;
  const double h = g.cell();
  sampled_kernel k = sample_kernel(mol, h);
  const int m = k.half_width;
  field_samples<T> out(g);
  out.margin_cells = m;
  for (int iy = m; iy < g.ny - m; ++iy)
    for (int ix = m; ix < g.nx - m; ++ix) {
      T acc{};
      for (int dy = -m; dy <= m; ++dy) {
        const T* row = &f.values[static_cast<std::size_t>(g.index(ix - m, iy + dy))];
        const double* wr = &k.weights[static_cast<std::size_t>((dy + m) * (2 * m + 1))];
        for (int dx = 0; dx <= 2 * m; ++dx) acc += wr[dx] * row[dx];
      }
      out.at(ix, iy) = acc * (h * h);
    }
  return out;
}

}  // namespace patchwork
