#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gapflow/error.hpp"
#include "gapflow/quadrature.hpp"
#include "oracles.hpp"

using namespace gapflow;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const GaussRule& r = gauss_legendre(8);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 14);
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("endpoint-singular examples") {
  const auto r1 = integrate_endpoint_singular([](double x) -> cplx { return 1.0 / std::sqrt(1 - x * x); },
                                              {-1, 1}, {true, true});
  CHECK(std::abs(r1.value - kPi) < 1e-10);
  const auto r2 = integrate_endpoint_singular(
      [](double x) -> cplx { return x * x / std::sqrt(1 - x * x); }, {-1, 1}, {true, true});
  CHECK(std::abs(r2.value - kPi / 2) < 1e-10);
  const auto r3 = integrate_endpoint_singular([](double x) -> cplx { return 1.0 / std::sqrt(x - 0.5); },
                                              {0.5, 3.0}, {true, false});
  CHECK(std::abs(r3.value - 2.0 * std::sqrt(2.5)) < 1e-12);
}

TEST_CASE("period integral matches the AGM value") {
  const HyperellipticSurface s({-2, -1, 1, 2});
  const auto r = integrate_endpoint_singular(
      [&](double x) -> cplx { return 2.0 / s.sqrt_P(cplx(x, 0.0)); }, {-1, 1}, {true, true});
  CHECK(std::abs(r.value - 2.0 * oracle::elliptic_k(0.5)) < 1e-9);
}

TEST_CASE("additivity") {
  const auto f = [](double x) -> cplx { return std::exp(x) * std::cos(3 * x); };
  const auto whole = integrate(f, {-1, 2});
  const auto a = integrate(f, {-1, 0.3}), b = integrate(f, {0.3, 2});
  CHECK(std::abs(whole.value - a.value - b.value) <= whole.error + a.error + b.error + 1e-14);
}

TEST_CASE("log endpoint singularity converges with an honest error") {
  const double exact = -2.0 * kPi * std::log(2.0);
  const auto r = integrate_endpoint_singular(
      [](double x) -> cplx { return std::log((1 + x) * (1 - x)) / std::sqrt((1 + x) * (1 - x)); },
      {-1, 1}, {true, true});
  CHECK(std::abs(r.value - exact) <= r.error);
  CHECK(std::abs(r.value - exact) < 1e-6);
}

TEST_CASE("principal value examples") {
  const auto one = [](double) -> cplx { return 1.0; };
  CHECK(std::abs(integrate_principal_value(one, 0.0, one, {-1, 1}, {false, false}).value) < 1e-13);
  const auto r = integrate_principal_value(one, 0.5, one, {-1, 1}, {false, false});
  CHECK(std::abs(r.value - std::log(1.0 / 3.0)) < 1e-12);
  CHECK_THROWS_AS(integrate_principal_value(one, 1.0 - 1e-12, one, {-1, 1}, {false, false}), DomainError);
}

TEST_CASE("principal value on a gap matches the excision limit") {
  const HyperellipticSurface s({-2, -1, 1, 2});
  const auto w = [&](double x) -> cplx { return 1.0 / s.sqrt_P(cplx(x, 0.0)); };
  const auto lib = integrate_principal_value([](double) -> cplx { return 1.0; }, 0.3, w, {-1, 1});
  const cplx ref = oracle::edge_weighted_pv(w, 0.3, -1, 1);
  CHECK(std::abs(lib.value - ref) < 1e-7);
}

TEST_CASE("principal value is odd under pole reflection for even weights") {
  const auto w = [](double x) -> cplx { return 1.0 / std::sqrt(1 - x * x); };
  const auto one = [](double) -> cplx { return 1.0; };
  const auto a = integrate_principal_value(one, 0.37, w, {-1, 1});
  const auto b = integrate_principal_value(one, -0.37, w, {-1, 1});
  CHECK(std::abs(a.value + b.value) < 1e-10);
  const auto two = [](double) -> cplx { return 2.0; };
  const auto c = integrate_principal_value(two, 0.37, w, {-1, 1});
  CHECK(std::abs(c.value - 2.0 * a.value) < 1e-10);
}

TEST_CASE("path integrals") {
  const Polyline p({cplx(1, 0), cplx(1, 1), cplx(-1, 1)});
  const auto r = integrate_path([](cplx z) { return 1.0 / z; }, p);
  CHECK(std::abs(r.value - cplx(0.5 * std::log(2.0), 3 * kPi / 4)) < 1e-12);
  const auto c = integrate_path([](cplx) { return cplx(1.0, 0.0); }, p);
  CHECK(std::abs(c.value - cplx(-2, 1)) < 1e-13);
  CHECK(p.distance_to(cplx(0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("invalid specs are rejected") {
  QuadratureSpec s;
  s.rel_tol = 0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = {};
  s.max_subdivisions = 0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  CHECK_THROWS_AS(integrate([](double) -> cplx { return 1.0; }, {1, 1}), DomainError);
}

TEST_CASE("non-convergence raises QuadratureError with the best estimate") {
  QuadratureSpec s;
  s.rel_tol = 1e-15;
  s.abs_tol = 1e-300;
  s.max_subdivisions = 2;
  try {
    integrate([](double x) -> cplx { return std::sqrt(std::abs(x)); }, {-1, 2}, s);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(std::abs(e.estimate() - (2.0 / 3.0) * (1.0 + std::pow(2.0, 1.5))) < 1e-3);
  }
}
