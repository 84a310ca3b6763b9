#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace patchwork {

using cplx = std::complex<double>;

// Polynomial with complex coefficients, ascending degree. The zero polynomial
// is an empty (or all-zero) coefficient list; equality is coefficient-wise
// after trailing-zero stripping.
class complex_poly {
 public:
  complex_poly() = default;
  explicit complex_poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { strip(); }
  complex_poly(std::initializer_list<cplx> coeffs) : c_(coeffs) { strip(); }

  const std::vector<cplx>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  // degree of the zero polynomial is -1 by convention
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  // Horner evaluation; exact 0 for the zero polynomial.
  cplx operator()(cplx z) const {
    if (c_.empty()) return {0.0, 0.0};
    cplx acc = c_.back();
    for (std::size_t k = c_.size() - 1; k-- > 0;) acc = c_[k] + z * acc;
    return acc;
  }

  complex_poly derivative() const {
    if (c_.size() <= 1) return complex_poly{};
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return complex_poly(std::move(d));
  }

  // Antiderivative F with F' = *this and F(base) = 0. The constant term is
  // -(raw antiderivative at base), so Horner evaluation at base cancels to
  // exactly zero in floating point.
  complex_poly antiderivative(cplx base) const {
    if (c_.empty()) return complex_poly{};
    std::vector<cplx> f(c_.size() + 1);
    f[0] = {0.0, 0.0};
    for (std::size_t k = 0; k < c_.size(); ++k) f[k + 1] = c_[k] / static_cast<double>(k + 1);
    complex_poly raw(std::move(f));
    std::vector<cplx> out = raw.coeffs();
    if (out.empty()) return complex_poly{};
    out[0] = -raw(base);
    return complex_poly(std::move(out));
  }

  friend bool operator==(const complex_poly& a, const complex_poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const complex_poly& a, const complex_poly& b) { return !(a == b); }

 private:
  void strip() {
    while (!c_.empty() && c_.back() == cplx{0.0, 0.0}) c_.pop_back();
  }

  std::vector<cplx> c_;
};

}  // namespace patchwork
