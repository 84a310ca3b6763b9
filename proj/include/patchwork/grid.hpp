#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "patchwork/complex_poly.hpp"
#include "patchwork/errors.hpp"
#include "patchwork/family.hpp"

namespace patchwork {

// Uniform cell grid over a window. Cells are square; values live at centers.
struct grid_window {
  cplx origin{-1.0, -1.0};  // lower-left corner of the window
  double width = 2.0;
  double height = 2.0;
  int nx = 64;
  int ny = 64;

  grid_window() = default;
  grid_window(cplx o, double w, double h, int nx_, int ny_)
      : origin(o), width(w), height(h), nx(nx_), ny(ny_) {
    if (nx < 8 || ny < 8) throw error(errc::config_error, "grid needs nx, ny >= 8");
    double hx = width / nx, hy = height / ny;
    if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy))
      throw error(errc::config_error, "cells must be square: width/nx != height/ny");
  }
  static grid_window over(const window_rect& w, int nx, int ny) {
    return grid_window({w.x0, w.y0}, w.width, w.height, nx, ny);
  }

  double cell() const { return width / nx; }
  int count() const { return nx * ny; }
  int index(int ix, int iy) const { return iy * nx + ix; }
  cplx center(int ix, int iy) const {
    double h = cell();
    return origin + cplx{(ix + 0.5) * h, (iy + 0.5) * h};
  }
  bool contains(cplx z) const {
    return z.real() >= origin.real() && z.real() <= origin.real() + width &&
           z.imag() >= origin.imag() && z.imag() <= origin.imag() + height;
  }
  // cell indices of the cell containing z (clamped to the grid)
  std::pair<int, int> locate(cplx z) const {
    double h = cell();
    int ix = static_cast<int>(std::floor((z.real() - origin.real()) / h));
    int iy = static_cast<int>(std::floor((z.imag() - origin.imag()) / h));
    ix = std::min(std::max(ix, 0), nx - 1);
    iy = std::min(std::max(iy, 0), ny - 1);
    return {ix, iy};
  }
  window_rect rect() const { return {origin.real(), origin.imag(), width, height}; }

  bool operator==(const grid_window& o) const {
    return origin == o.origin && width == o.width && height == o.height && nx == o.nx &&
           ny == o.ny;
  }
};

// Per-cell values on a grid. margin_cells marks how many cells along each edge
// carry no meaningful value (set by the mollified operators).
template <class T>
struct field_samples {
  grid_window grid;
  std::vector<T> values;
  int margin_cells = 0;

  field_samples() = default;
  explicit field_samples(const grid_window& g, T fill = T{})
      : grid(g), values(static_cast<std::size_t>(g.count()), fill) {}

  T& at(int ix, int iy) { return values[static_cast<std::size_t>(grid.index(ix, iy))]; }
  const T& at(int ix, int iy) const {
    return values[static_cast<std::size_t>(grid.index(ix, iy))];
  }
  bool interior(int ix, int iy) const {
    return ix >= margin_cells && ix < grid.nx - margin_cells && iy >= margin_cells &&
           iy < grid.ny - margin_cells;
  }
};

}  // namespace patchwork
