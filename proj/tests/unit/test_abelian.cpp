#include <doctest.h>

#include <cmath>
#include <random>

#include "gapflow/abelian.hpp"
#include "gapflow/error.hpp"
#include "oracles.hpp"

using namespace gapflow;

namespace {

const HyperellipticSurface kGenus0({-1.0, 1.0});
const HyperellipticSurface kGenus1({-2.0, -1.0, 1.0, 2.0});
const HyperellipticSurface kGenus2({-3.0, -2.0, -1.0, 0.5, 1.5, 3.0});

}  // namespace

TEST_CASE("periods") {
  CHECK(compute_periods(kGenus0).C.empty());
  const PeriodData pd = compute_periods(kGenus1);
  CHECK(std::abs(pd.C(0, 0) - 2.0 * oracle::elliptic_k(0.5)) < 1e-9);
  const PeriodData p2 = compute_periods(kGenus2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double s = 0.0;
      for (int k = 0; k < 2; ++k) s += p2.c(i, k) * p2.C(k, j);
      CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("holomorphic differentials are a-normalized") {
  for (const auto* s : {&kGenus1, &kGenus2}) {
    const PeriodData pd = compute_periods(*s);
    for (int j = 1; j <= s->genus(); ++j)
      for (int k = 1; k <= s->genus(); ++k)
        CHECK(std::abs(oracle::holomorphic_a_period(*s, pd, j, k) - (j == k ? 1.0 : 0.0)) < 1e-8);
  }
}

TEST_CASE("third-kind kernel examples") {
  const ThirdKindKernel k0(kGenus0, SurfacePoint::upper(cplx(1.25, 0.0)));
  const cplx d = omega_density(k0, SurfacePoint::upper(cplx(2.0, 0.0)));
  CHECK(std::abs(d - 1.0 / std::sqrt(3.0)) < 1e-14);
  for (double x : {0.0, 3.0}) {
    const ThirdKindKernel k(kGenus1, SurfacePoint::upper(cplx(x, 0.0)));
    CHECK(std::abs(oracle::a_period(k, 1)) < 1e-8);
  }
}

TEST_CASE("kernel density flips sign with the sheet") {
  const ThirdKindKernel k(kGenus2, SurfacePoint::upper(cplx(0.1, 0.7)));
  for (cplx z : {cplx(-2.5, 0.3), cplx(0.0, -1.0), cplx(4.0, 0.0)}) {
    const cplx up = k.density(SurfacePoint::upper(z)), down = k.density(SurfacePoint::lower(z));
    CHECK(std::abs(up + down) < 1e-13 * std::abs(up));
  }
}

TEST_CASE("a-period residuals for random poles") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto* s : {&kGenus1, &kGenus2}) {
    const PeriodData pd = compute_periods(*s);
    for (int i = 0; i < 12; ++i) {
      cplx p;
      switch (i % 3) {
        case 0: {
          const Interval g = s->gap(1 + static_cast<int>(u(gen) * s->genus()));
          p = g.lo + (0.05 + 0.9 * u(gen)) * g.length();
          break;
        }
        case 1:
          p = u(gen) < 0.5 ? s->first_edge() - 0.1 - 3 * u(gen) : s->last_edge() + 0.1 + 3 * u(gen);
          break;
        default:
          p = cplx(s->first_edge() + u(gen) * (s->last_edge() - s->first_edge()), 0.05 + u(gen));
      }
      const ThirdKindKernel k(*s, SurfacePoint::upper(p), {}, &pd);
      for (int l = 1; l <= s->genus(); ++l) CHECK(std::abs(oracle::a_period(k, l)) < 1e-8);
    }
  }
}

TEST_CASE("two-pole kernel is a-normalized") {
  const ThirdKindKernel k(kGenus2, SurfacePoint::upper(cplx(0.3, 0.4)),
                          SurfacePoint::lower(cplx(0.3, -0.4)));
  for (int l = 1; l <= 2; ++l) CHECK(std::abs(oracle::a_period(k, l)) < 1e-8);
}

TEST_CASE("kernel refuses evaluation at its pole") {
  const ThirdKindKernel k(kGenus1, SurfacePoint::upper(cplx(0.0, 0.0)));
  CHECK_THROWS_AS(k.density(SurfacePoint::upper(cplx(0.0, 0.0))), SingularEvaluation);
}

TEST_CASE("b-period phases: band accumulation against the b-cycle contour") {
  CHECK(delta_b_period(kGenus1, 0.0, 0) == 0.0);
  CHECK(delta_b_period(kGenus1, 0.0, 2) == 0.0);
  for (double rho : {0.0, 0.5, -0.5, 3.0, -3.0}) {
    const ThirdKindKernel k(kGenus1, SurfacePoint::upper(cplx(rho, 0.0)));
    CHECK(std::abs(delta_b_period(k, 1) - oracle::b_cycle_phase(k, 1)) < 1e-6);
  }
  for (double rho : {0.0, -1.5 - 0.2, 1.0, 4.0}) {
    if (kGenus2.on_bands(rho)) continue;
    const ThirdKindKernel k(kGenus2, SurfacePoint::upper(cplx(rho, 0.0)));
    for (int j = 1; j <= 2; ++j) CHECK(std::abs(delta_b_period(k, j) - oracle::b_cycle_phase(k, j)) < 1e-6);
  }
  CHECK_THROWS_AS(delta_b_period(kGenus1, 1.5, 1), DomainError);
}

TEST_CASE("gap pole period is a principal value inside the gap") {
  const cplx v = gap_pole_period(kGenus1, 1, cplx(0.3, 0.0));
  const cplx ref = 2.0 * oracle::edge_weighted_pv(
                             [&](double x) -> cplx { return 1.0 / kGenus1.sqrt_P(cplx(x, 0.0)); }, 0.3, -1, 1);
  CHECK(std::abs(v - ref) < 1e-7);
}
