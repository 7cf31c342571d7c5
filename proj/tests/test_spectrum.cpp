// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "jspec/spectrum.hpp"

using namespace jspec;

namespace {

std::mt19937 rng(1618);

CoefficientModel free_jacobi() {
  return CoefficientModel(AsymptoticallyPeriodic{PeriodicPair({1.0}, {0.0}), {}, {}});
}

CoefficientModel random_real_table(size_t len) {
  std::uniform_real_distribution<double> da(0.5, 1.5), db(-1.0, 1.0);
  std::vector<cplx> a(len), b(len);
  for (size_t k = 0; k < len; ++k) {
    a[k] = da(rng);
    b[k] = db(rng);
  }
  return CoefficientModel(ExplicitTable{std::move(a), std::move(b), cplx(1.0)});
}

// eigenvalues of the dim x dim free truncation: 2 cos(k pi / (dim+1))
std::vector<double> free_eigs(int dim) {
  std::vector<double> v;
  for (int k = 1; k <= dim; ++k)
    v.push_back(2.0 * std::cos(double(k) * detail::kPi / double(dim + 1)));
  std::sort(v.begin(), v.end());
  return v;
}

cplx scaled_value(const Scaled& s) { return ldexp_c(s.mantissa, int(s.exp2)); }

}  // namespace

TEST_CASE("characteristic polynomial recurrence") {
  CoefficientModel m = free_jacobi();
  SUBCASE("dim 1: z - b_0") {
    CHECK(std::abs(scaled_value(charpoly(m, 1, cplx(0.7, 0.2))) - cplx(0.7, 0.2)) <= 1e-15);
  }
  SUBCASE("dim 2: z^2 - 1") {
    for (cplx z : {cplx(0.3), cplx(1.0, 0.5), cplx(-2.0, -1.0)}) {
      cplx expect = z * z - 1.0;
      CHECK(std::abs(scaled_value(charpoly(m, 2, z)) - expect) <= 1e-14 * (1.0 + std::abs(expect)));
    }
  }
  SUBCASE("mantissa is normalized or zero") {
    for (int dim : {1, 7, 64, 300}) {
      Scaled p = charpoly(m, dim, cplx(0.37, 0.11));
      double am = std::abs(p.mantissa);
      CHECK(((am >= 0.5 && am < 2.0) || am == 0.0));
    }
  }
  SUBCASE("vanishes at the closed-form truncation eigenvalues") {
    // relative to neighbouring grid values the root evaluation is tiny
    int dim = 100;
    double root = 2.0 * std::cos(detail::kPi / 101.0);
    double at_root = charpoly(m, dim, root).log2_abs();
    double nearby = charpoly(m, dim, root + 1e-2).log2_abs();
    CHECK(at_root < nearby + std::log2(1e-6));
  }
  SUBCASE("the ledger keeps large dimensions finite") {
    // raw three-term values overflow binary64 long before dim 2000
    CoefficientModel grow(
        PeriodicallyModulated{PeriodicPair({1.0}, {0.0}), SeqExpr::power(1.5)});
    Scaled p = charpoly(grow, 2000, cplx(3.0, 1.0));
    CHECK(std::isfinite(p.mantissa.real()));
    CHECK(p.exp2 > 1024);  // beyond what a plain double could carry
  }
}

TEST_CASE("winding counts by the argument principle") {
  CoefficientModel m = free_jacobi();
  SUBCASE("dim 4 whole-band box counts every root") {
    CHECK(winding_count(m, 4, {-3.0, 3.0, -1.0, 1.0}) == 4);
  }
  SUBCASE("a far-away box is empty") {
    CHECK(winding_count(m, 4, {10.0, 11.0, 0.0, 1.0}) == 0);
  }
  SUBCASE("the positive half counts two of the four") {
    // roots are +-0.618, +-1.618
    CHECK(winding_count(m, 4, {0.0 + 0.01, 3.0, -1.0, 1.0}) == 2);
  }
  SUBCASE("additive over a partition") {
    Box whole{-3.0, 3.0, -1.0, 1.0};
    double mx = 0.1, my = 0.13;
    int total = winding_count(m, 12, whole);
    int sum = winding_count(m, 12, {whole.x0, mx, whole.y0, my}) +
              winding_count(m, 12, {mx, whole.x1, whole.y0, my}) +
              winding_count(m, 12, {whole.x0, mx, my, whole.y1}) +
              winding_count(m, 12, {mx, whole.x1, my, whole.y1});
    CHECK(total == 12);
    CHECK(sum == total);
  }
  SUBCASE("a root on the contour is rejected") {
    // dim 2 roots at +-1: the boundary passes through z = 1
    CHECK_THROWS_AS(winding_count(m, 2, {1.0, 2.0, -0.5, 0.5}), RootOnBoundary);
  }
}

TEST_CASE("finite sections recover the free spectrum") {
  CoefficientModel m = free_jacobi();
  int dim = 100;
  SpectrumEstimate est = finite_section(m, dim, {-2.5, 2.5, -0.5, 0.5}, 1e-8);
  CHECK(!est.partial);
  REQUIRE(est.total_multiplicity() == dim);
  REQUIRE(est.roots.size() == size_t(dim));
  auto expect = free_eigs(dim);
  for (int k = 0; k < dim; ++k) {
    CHECK(std::abs(est.roots[size_t(k)].value.real() - expect[size_t(k)]) <= 1e-8);
    CHECK(std::abs(est.roots[size_t(k)].value.imag()) <= 1e-8);
    CHECK(est.roots[size_t(k)].residual <= 1e-8);
    CHECK(est.box.contains(est.roots[size_t(k)].value, 1e-8));
  }
}

TEST_CASE("finite-section edge cases") {
  SUBCASE("dim 1 returns the single diagonal entry") {
    CoefficientModel m(ExplicitTable{{1.0}, {cplx(0.25, 0.1)}, {}});
    auto est = finite_section(m, 1, {-1.0, 1.0, -1.0, 1.0}, 1e-10);
    REQUIRE(est.roots.size() == 1);
    CHECK(std::abs(est.roots[0].value - cplx(0.25, 0.1)) <= 1e-9);
  }
  SUBCASE("dim limits are enforced") {
    CoefficientModel m = free_jacobi();
    CHECK_THROWS_AS(finite_section(m, 0, {-1, 1, -1, 1}, 1e-8), PreconditionError);
    CHECK_THROWS_AS(finite_section(m, 2001, {-1, 1, -1, 1}, 1e-8), PreconditionError);
  }
  SUBCASE("an exhausted budget flags a partial result") {
    CoefficientModel m = free_jacobi();
    auto est = finite_section(m, 40, {-2.5, 2.5, -0.5, 0.5}, 1e-8, 2000);
    CHECK(est.partial);
    CHECK(est.total_multiplicity() < 40);
  }
}

TEST_CASE("real-coefficient spectra are conjugation-symmetric and interlace") {
  CoefficientModel m = random_real_table(16);
  auto est16 = finite_section(m, 16, {-4.0, 4.0, -1.0, 1.0}, 1e-9);
  auto est15 = finite_section(m, 15, {-4.0, 4.0, -1.0, 1.0}, 1e-9);
  REQUIRE(est16.total_multiplicity() == 16);
  REQUIRE(est15.total_multiplicity() == 15);

  // conjugate symmetry: every root pairs with a conjugate partner
  for (const auto& r : est16.roots) {
    bool paired = false;
    for (const auto& s : est16.roots)
      if (std::abs(s.value - std::conj(r.value)) <= 1e-7) paired = true;
    CHECK(paired);
  }

  // tridiagonal interlacing on the real line
  std::vector<double> e16, e15;
  for (const auto& r : est16.roots) {
    CHECK(std::abs(r.value.imag()) <= 1e-7);
    e16.push_back(r.value.real());
  }
  for (const auto& r : est15.roots) e15.push_back(r.value.real());
  std::sort(e16.begin(), e16.end());
  std::sort(e15.begin(), e15.end());
  for (size_t k = 0; k < e15.size(); ++k) {
    CHECK(e16[k] <= e15[k] + 1e-7);
    CHECK(e15[k] <= e16[k + 1] + 1e-7);
  }
}

TEST_CASE("drifting complex model densifies toward the limit band") {
  // a_n = 1 + 1/(n+1), b_n = i(-1)^n/(n+1): truncation eigenvalues approach
  // the real band (-2,2) as dim grows
  CoefficientModel m(AsymptoticallyPeriodic{
      PeriodicPair({1.0}, {0.0}), SeqExpr::recip(SeqExpr::power(1.0)),
      SeqExpr::imag_unit(SeqExpr::prod({SeqExpr::alt(), SeqExpr::recip(SeqExpr::power(1.0))}))});
  auto est200 = finite_section(m, 200, {-3.5, 3.5, -1.0, 1.0}, 1e-7);
  auto est400 = finite_section(m, 400, {-3.5, 3.5, -1.0, 1.0}, 1e-7);
  REQUIRE(est200.total_multiplicity() == 200);
  REQUIRE(est400.total_multiplicity() == 400);

  auto max_imag = [](const SpectrumEstimate& e) {
    double m2 = 0.0;
    for (const auto& r : e.roots) m2 = std::max(m2, std::abs(r.value.imag()));
    return m2;
  };
  auto max_gap_in_band = [](const SpectrumEstimate& e) {
    std::vector<double> xs;
    for (const auto& r : e.roots) xs.push_back(r.value.real());
    std::sort(xs.begin(), xs.end());
    double gap = 0.0;
    for (size_t k = 0; k + 1 < xs.size(); ++k)
      if (xs[k] > -2.0 && xs[k + 1] < 2.0) gap = std::max(gap, xs[k + 1] - xs[k]);
    return gap;
  };
  CHECK(max_imag(est400) < max_imag(est200));
  CHECK(max_gap_in_band(est400) < max_gap_in_band(est200));
  CHECK(max_gap_in_band(est400) <= 10.0 * (4.0 / 400.0));  // spacing O(1/dim)
  // real parts fill out the band
  CHECK(est400.roots.front().value.real() <= -1.9);
  CHECK(est400.roots.back().value.real() >= 1.9);
}
