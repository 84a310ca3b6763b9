#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "patchwork/complex_poly.hpp"
#include "patchwork/errors.hpp"

namespace patchwork {

// Axis-aligned rectangle in the plane.
struct window_rect {
  double x0 = -1.0;
  double y0 = -1.0;
  double width = 2.0;
  double height = 2.0;

  bool contains(cplx z) const {
    return z.real() >= x0 && z.real() <= x0 + width && z.imag() >= y0 && z.imag() <= y0 + height;
  }
  double diagonal() const { return std::hypot(width, height); }
  cplx center() const { return {x0 + 0.5 * width, y0 + 0.5 * height}; }
};

// The members A_1..A_r, the base point, and the working window. Antiderivatives
// anchored at the base point are precomputed, so each harmonic part vanishes at
// the base point exactly. Member indices are 1-based throughout.
class analytic_family {
 public:
  analytic_family(std::vector<complex_poly> members, cplx base_point, window_rect window)
      : members_(std::move(members)), base_(base_point), window_(window) {
    if (members_.size() < 2)
      throw error(errc::config_error, "family needs at least two members, got " +
                                          std::to_string(members_.size()));
    for (std::size_t i = 0; i < members_.size(); ++i)
      for (std::size_t j = i + 1; j < members_.size(); ++j)
        if (members_[i] == members_[j])
          throw error(errc::duplicate_value, "members " + std::to_string(i + 1) + " and " +
                                                 std::to_string(j + 1) + " are identical");
    if (!window_.contains(base_))
      throw error(errc::config_error, "base point lies outside the window");
    prims_.reserve(members_.size());
    for (const auto& a : members_) prims_.push_back(a.antiderivative(base_));
  }

  int size() const { return static_cast<int>(members_.size()); }
  cplx base_point() const { return base_; }
  const window_rect& window() const { return window_; }
  const complex_poly& member(int i) const { return members_[check(i)]; }
  const complex_poly& primitive(int i) const { return prims_[check(i)]; }

  // A_i(z)
  cplx value(int i, cplx z) const { return members_[check(i)](z); }
  // H_i(z) = Re f_i(z), f_i' = A_i, f_i(base) = 0
  double harmonic_part(int i, cplx z) const { return prims_[check(i)](z).real(); }
  // planar gradient of H_i encoded as dH/dx + i dH/dy = conj(A_i(z))
  cplx gradient(int i, cplx z) const { return std::conj(members_[check(i)](z)); }

  // Coarse upper bound for max_i sup_window |A_i|, via coefficient norms.
  double gradient_bound() const {
    double rmax = 0.0;
    for (cplx corner : {cplx{window_.x0, window_.y0}, cplx{window_.x0 + window_.width, window_.y0},
                        cplx{window_.x0, window_.y0 + window_.height},
                        cplx{window_.x0 + window_.width, window_.y0 + window_.height}})
      rmax = std::max(rmax, std::abs(corner));
    double bound = 0.0;
    for (const auto& a : members_) {
      double s = 0.0, p = 1.0;
      for (const auto& c : a.coeffs()) {
        s += std::abs(c) * p;
        p *= rmax;
      }
      bound = std::max(bound, s);
    }
    return bound;
  }

 private:
  std::size_t check(int i) const {
    if (i < 1 || i > size())
      throw error(errc::index_out_of_range,
                  "member index " + std::to_string(i) + " not in 1.." + std::to_string(size()));
    return static_cast<std::size_t>(i - 1);
  }

  std::vector<complex_poly> members_;
  cplx base_;
  window_rect window_;
  std::vector<complex_poly> prims_;
};

// The two bundled demonstration families.

// Two constants {1, i}: the max field is max(x, -y), split along x + y = 0.
inline analytic_family diagonal_pair_family(window_rect w = {-1, -1, 2, 2}) {
  return analytic_family({complex_poly{{1.0, 0.0}}, complex_poly{{0.0, 1.0}}}, {0.0, 0.0}, w);
}

// {0, 4 + 2z, -1}: three level curves through the origin, two of them tangent.
// The transversality condition fails at 0, which makes this the canonical
// degenerate test instance.
inline analytic_family tangent_cusp_family(window_rect w = {-1, -1, 2, 2}) {
  return analytic_family(
      {complex_poly{}, complex_poly{{4.0, 0.0}, {2.0, 0.0}}, complex_poly{{-1.0, 0.0}}},
      {0.0, 0.0}, w);
}

}  // namespace patchwork
