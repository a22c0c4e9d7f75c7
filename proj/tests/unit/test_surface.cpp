#include <doctest.h>

#include <cmath>

#include "gapflow/error.hpp"
#include "gapflow/surface.hpp"

using namespace gapflow;

namespace {

const HyperellipticSurface kGenus0({-1.0, 1.0});
const HyperellipticSurface kGenus1({-2.0, -1.0, 1.0, 2.0});

}  // namespace

TEST_CASE("sqrt_P branch values") {
  CHECK(kGenus0.sqrt_P(cplx(2.0, 0.0)).real() == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-15));
  const cplx mid = kGenus0.sqrt_P(SurfacePoint::upper(cplx(0.0, 0.0), BoundarySide::kAbove));
  CHECK(std::abs(mid - cplx(0.0, -1.0)) < 1e-15);
  CHECK(std::abs(kGenus1.sqrt_P(cplx(0.0, 0.0)) - cplx(2.0, 0.0)) < 1e-15);
}

TEST_CASE("sqrt_P below the cut is the conjugate, lower sheet the negative") {
  for (double x : {-1.7, -1.2, 1.1, 1.9}) {
    const cplx above = kGenus1.sqrt_P(SurfacePoint::upper(cplx(x, 0.0), BoundarySide::kAbove));
    const cplx below = kGenus1.sqrt_P(SurfacePoint::upper(cplx(x, 0.0), BoundarySide::kBelow));
    CHECK(std::abs(below - std::conj(above)) < 1e-14);
    const cplx lower = kGenus1.sqrt_P(SurfacePoint::lower(cplx(x, 0.0), BoundarySide::kAbove));
    CHECK(std::abs(lower + above) < 1e-14);
  }
}

TEST_CASE("branch points give zero") {
  for (double e : kGenus1.edges()) CHECK(kGenus1.sqrt_P(cplx(e, 0.0)) == cplx(0.0, 0.0));
}

TEST_CASE("sqrt_P squared is P, real off the bands, imaginary on them") {
  for (cplx z : {cplx(0.3, 0.4), cplx(-3.0, 0.0), cplx(1.5, -2.0), cplx(5.0, 1e-3)}) {
    const SurfacePoint p = SurfacePoint::upper(z);
    const cplx prod = kGenus1.sqrt_P(p) * kGenus1.sqrt_P(p.star());
    CHECK(std::abs(prod + kGenus1.poly(z)) <= 1e-12 * std::abs(kGenus1.poly(z)));
  }
  for (double x : {-3.0, -0.5, 0.7, 2.5}) {
    const cplx v = kGenus1.sqrt_P(cplx(x, 0.0));
    CHECK(std::abs(v.imag()) <= 1e-12 * std::abs(v));
  }
  for (double x : {-1.5, 1.25, 1.99}) {
    const cplx v = kGenus1.sqrt_P(SurfacePoint::upper(cplx(x, 0.0), BoundarySide::kAbove));
    CHECK(std::abs(v.real()) <= 1e-12 * std::abs(v));
  }
}

TEST_CASE("sqrt_P grows like -x^(g+1)") {
  for (const auto* s : {&kGenus0, &kGenus1}) {
    const double x = 1e6 * 2.0;
    const cplx v = s->sqrt_P(cplx(x, 0.0));
    CHECK(std::abs(v / (-std::pow(x, s->genus() + 1)) - 1.0) < 1e-4);
  }
}

TEST_CASE("surface geometry") {
  CHECK(kGenus1.genus() == 1);
  CHECK(kGenus1.gap(1) == Interval{-1.0, 1.0});
  CHECK(kGenus1.on_bands(1.5));
  CHECK_FALSE(kGenus1.on_bands(0.0));
  CHECK_THROWS_AS(HyperellipticSurface({1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(HyperellipticSurface({0.0, 1.0, 2.0}), DomainError);
}

TEST_CASE("decompose_spectra examples") {
  SUBCASE("disjoint") {
    const auto d = decompose_spectra(BandSet({{-1, 1}}), BandSet({{2, 4}}));
    CHECK(d.sigma.intervals() == std::vector<Interval>{{-1, 1}, {2, 4}});
    CHECK(d.sigma2.empty());
    CHECK(d.sigma_minus1.intervals() == std::vector<Interval>{{-1, 1}});
    CHECK(d.sigma_plus1.intervals() == std::vector<Interval>{{2, 4}});
  }
  SUBCASE("overlap") {
    const auto d = decompose_spectra(BandSet({{-1, 1}}), BandSet({{0.5, 3.5}}));
    CHECK(d.sigma.intervals() == std::vector<Interval>{{-1, 3.5}});
    CHECK(d.sigma2.intervals() == std::vector<Interval>{{0.5, 1}});
    CHECK(d.sigma_minus1.intervals() == std::vector<Interval>{{-1, 0.5}});
    CHECK(d.sigma_plus1.intervals() == std::vector<Interval>{{1, 3.5}});
  }
  SUBCASE("identical") {
    const auto d = decompose_spectra(BandSet({{-1, 1}}), BandSet({{-1, 1}}));
    CHECK(d.sigma2.intervals() == std::vector<Interval>{{-1, 1}});
    CHECK(d.sigma_minus1.empty());
    CHECK(d.sigma_plus1.empty());
  }
}

TEST_CASE("decompose_spectra partitions the union") {
  const BandSet sm({{-3, -1}, {0, 2}}), sp({{-2, 0.5}, {1.5, 4}});
  const auto d = decompose_spectra(sm, sp);
  CHECK(std::abs(d.sigma2.measure() + d.sigma_minus1.measure() + d.sigma_plus1.measure() -
                 d.sigma.measure()) < 1e-12);
  // grid offset from all edges, which sit on multiples of 0.5
  for (int k = 0; k < 800; ++k) {
    const double x = -3.5 + 0.01 * k + 0.005;
    const int hits = (d.sigma2.contains(x) ? 1 : 0) + (d.sigma_minus1.contains(x) ? 1 : 0) +
                     (d.sigma_plus1.contains(x) ? 1 : 0);
    CHECK(hits == (d.sigma.contains(x) ? 1 : 0));
  }
}

TEST_CASE("rho examples") {
  const double mu[1] = {0.0};
  CHECK(std::abs(rho(kGenus0, {}, SurfacePoint::upper(cplx(2.0, 0.0))) + 1.0 / std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(rho(kGenus0, {}, SurfacePoint::upper(cplx(0.0, 0.0), BoundarySide::kAbove)) -
                 cplx(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(rho(kGenus1, mu, SurfacePoint::upper(cplx(3.0, 0.0))) + 3.0 / std::sqrt(40.0)) < 1e-15);
  CHECK_THROWS_AS(rho(kGenus1, {}, SurfacePoint::upper(cplx(3.0, 0.0))), DomainError);
}
