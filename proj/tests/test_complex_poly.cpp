#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "patchwork/complex_poly.hpp"
#include "patchwork/family.hpp"

using namespace patchwork;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("polynomial evaluation") {
  complex_poly p{{4.0, 0.0}, {2.0, 0.0}};
  CHECK(p(cplx{0, 0}) == cplx{4.0, 0.0});

  complex_poly zero;
  CHECK(zero(cplx{3, 4}) == cplx{0.0, 0.0});

  complex_poly sq{{0, 0}, {0, 0}, {1, 0}};
  CHECK_THAT(std::abs(sq(cplx{1, 1}) - cplx{0, 2}), WithinAbs(0.0, 1e-15));
}

TEST_CASE("antiderivative anchoring") {
  complex_poly p{{4.0, 0.0}, {2.0, 0.0}};
  complex_poly f = p.antiderivative({0, 0});
  REQUIRE(f.coeffs() == std::vector<cplx>{{0, 0}, {4, 0}, {1, 0}});

  CHECK(complex_poly{}.antiderivative({2, 5}).is_zero());

  complex_poly one{{1.0, 0.0}};
  complex_poly g = one.antiderivative({1, 1});
  REQUIRE(g.degree() == 1);
  CHECK(g.coeffs()[0] == cplx{-1, -1});
  CHECK(g.coeffs()[1] == cplx{1, 0});

  // anchoring is exact in floating point, not just approximate
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 200; ++t) {
    std::vector<cplx> c;
    int deg = 1 + static_cast<int>(rng() % 5);
    for (int k = 0; k <= deg; ++k) c.push_back({gauss(rng), gauss(rng)});
    complex_poly q(c);
    cplx base{gauss(rng), gauss(rng)};
    CHECK(q.antiderivative(base)(base) == cplx{0.0, 0.0});
  }
}

TEST_CASE("derivative undoes antiderivative on representative coefficients") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 500; ++t) {
    std::vector<cplx> c;
    int deg = static_cast<int>(rng() % 6);
    for (int k = 0; k <= deg; ++k) {
      // dyadic random coefficients: the division by k+1 then multiplication
      // round-trips exactly
      double re = static_cast<double>(static_cast<int>(rng() % 4097) - 2048) / 256.0;
      double im = static_cast<double>(static_cast<int>(rng() % 4097) - 2048) / 256.0;
      c.push_back({re, im});
    }
    complex_poly p(c);
    CHECK(p.antiderivative({0.25, -0.5}).derivative() == p);
  }
}

TEST_CASE("equality after trailing-zero stripping") {
  CHECK(complex_poly{{1, 0}, {0, 0}} == complex_poly{{1, 0}});
  CHECK(complex_poly{{0, 0}, {0, 0}} == complex_poly{});
  CHECK(complex_poly{{1, 0}} != complex_poly{{1, 0}, {2, 0}});
  CHECK(complex_poly{{0, 0}, {1, 0}}.degree() == 1);
}

TEST_CASE("family harmonic parts and gradients") {
  analytic_family fam = tangent_cusp_family();

  SECTION("harmonic part matches the closed forms") {
    auto H2 = [](cplx z) { return 4 * z.real() + z.real() * z.real() - z.imag() * z.imag(); };
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
      cplx z{u(rng), u(rng)};
      CHECK_THAT(fam.harmonic_part(2, z), WithinAbs(H2(z), 1e-13));
      CHECK_THAT(fam.harmonic_part(3, z), WithinAbs(-z.real(), 1e-13));
      CHECK(fam.harmonic_part(1, z) == 0.0);
    }
    for (int i = 1; i <= 3; ++i) CHECK(fam.harmonic_part(i, fam.base_point()) == 0.0);
  }

  SECTION("gradient is conj(A_i) and matches finite differences") {
    CHECK(fam.gradient(2, cplx{0, 0}) == cplx{4, 0});
    CHECK_THAT(std::abs(fam.gradient(2, cplx{0, 1}) - cplx{4, -2}), WithinAbs(0.0, 1e-14));

    analytic_family ifam =
        analytic_family({complex_poly{{0, 1}}, complex_poly{{1, 0}}}, {0, 0}, {-1, -1, 2, 2});
    CHECK(ifam.gradient(1, cplx{0.3, -0.7}) == cplx{0, -1});

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    double h = 1e-5 * fam.window().diagonal();
    for (int t = 0; t < 1000; ++t) {
      cplx z{u(rng), u(rng)};
      int i = 1 + static_cast<int>(rng() % 3);
      cplx g = fam.gradient(i, z);
      cplx fd = oracles::fd_gradient([&](cplx w) { return fam.harmonic_part(i, w); }, z, h);
      CHECK_THAT(std::abs(g - fd), WithinAbs(0.0, 1e-6 * std::max(1.0, std::abs(g))));
    }
  }

  SECTION("mean value property over circles") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int t = 0; t < 25; ++t) {
      cplx z{u(rng), u(rng)};
      double rho = 0.3;
      for (int i = 1; i <= 3; ++i) {
        double acc = 0.0;
        for (int k = 0; k < 720; ++k)
          acc += fam.harmonic_part(i, z + std::polar(rho, 2 * std::numbers::pi * k / 720.0));
        double avg = acc / 720.0;
        double ref = fam.harmonic_part(i, z);
        CHECK_THAT(avg - ref, WithinAbs(0.0, 1e-8 * std::max(1.0, std::abs(ref))));
      }
    }
  }
}

TEST_CASE("family invariants are enforced") {
  CHECK_THROWS_AS(analytic_family({complex_poly{{1, 0}}}, {0, 0}, {-1, -1, 2, 2}), error);
  CHECK_THROWS_AS(
      analytic_family({complex_poly{{1, 0}}, complex_poly{{1, 0}, {0, 0}}}, {0, 0}, {-1, -1, 2, 2}),
      error);
  CHECK_THROWS_AS(
      analytic_family({complex_poly{{1, 0}}, complex_poly{{0, 1}}}, {5, 5}, {-1, -1, 2, 2}),
      error);
  analytic_family fam = diagonal_pair_family();
  CHECK_THROWS_AS(fam.value(0, cplx{0, 0}), error);
  CHECK_THROWS_AS(fam.value(3, cplx{0, 0}), error);
}
