#include <doctest.h>

#include <cmath>

#include "gapflow/error.hpp"
#include "gapflow/reconstruct.hpp"
#include "oracles.hpp"

using namespace gapflow;

namespace {

SteplikeOperator single_site(double beta) { return SteplikeOperator({}, {}, {{0, std::nullopt, beta}}); }

SteplikeOperator disjoint() {
  return SteplikeOperator({0.5, 0.0}, {0.5, 3.0}, {{-1, std::nullopt, 0.1}, {0, std::nullopt, 2.9}});
}

double rel(cplx a, cplx b) { return std::abs(a / b - 1.0); }

}  // namespace

TEST_CASE("sampled functions") {
  std::vector<double> x, y;
  for (int i = 0; i <= 40; ++i) {
    x.push_back(i / 40.0);
    y.push_back(std::sin(3 * x.back()));
  }
  const SampledFunction f(x, y);
  CHECK(std::abs(f(0.123) - std::sin(0.369)) < 1e-6);
  CHECK(f(-1.0) == y.front());
  CHECK_THROWS_AS(SampledFunction({0, 1, 2}, {0, 1, 2}), DomainError);
  CHECK_THROWS_AS(SampledFunction({0, 2, 1, 3}, {0, 1, 2, 3}), DomainError);

  // log edge model: p log(x - lo) with p = 1/2 is recovered past the samples
  std::vector<double> u, v;
  for (int i = 0; i < 60; ++i) {
    const double t = 0.5 * (1 - std::cos(3.141592653589793 * (i + 0.5) / 60));
    u.push_back(t);
    v.push_back(0.5 * std::log(t) + 0.5 * std::log(1 - t) + t);
  }
  const SampledFunction g(u, v, Interval{0, 1});
  CHECK(g.left_exponent() == 0.5);
  CHECK(g.right_exponent() == 0.5);
  const double t = 1e-6;
  CHECK(std::abs(g(t) - (0.5 * std::log(t) + 0.5 * std::log(1 - t) + t)) < 1e-6);
}

TEST_CASE("Q and delta tables") {
  const ReconstructionProblem pb(scattering_data(disjoint()));
  CHECK(pb.q_edges() == std::vector<double>{2.0, 4.0});
  CHECK(std::abs(q_eval(pb, 5.0) - std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(q_eval(pb, 3.0, BoundarySide::kAbove) - cplx(0, 1)) < 1e-15);
  CHECK(delta_minus_table(pb).empty());
  const ReconstructionProblem cl(scattering_data(single_site(0.25)));
  CHECK(cl.q_edges().empty());
  CHECK(q_eval(cl, 0.3) == cplx(1.0, 0.0));
}

TEST_CASE("delta table on a genus-1 left background") {
  // hand-built data: sigma_- = [-2,-1] u [1,2], sigma_+ = [-2,2], eigenvalue 0
  ScatteringData d;
  d.sigma_minus_edges = {-2, -1, 1, 2};
  d.sigma_plus_edges = {-2, 2};
  d.mu_minus = {0.5};
  d.eigenvalues = {-3.0};
  ScatteringGrids g;
  g.samples_per_band = 16;
  for (double x : band_samples({-2, -1}, g)) d.R_plus.push_back({x, 0.0});
  for (double x : band_samples({1, 2}, g)) d.R_plus.push_back({x, 0.0});
  for (double x : band_samples({-1, 1}, g)) d.R_plus.push_back({x, -1.0});
  const ReconstructionProblem pb(d);
  const auto t = delta_minus_table(pb);
  REQUIRE(t.size() == 1);
  CHECK(std::abs(t[0] - delta_b_period(pb.sigma_minus_surface(), -3.0, 1)) < 1e-12);
  CHECK(pb.delta_minus_at(0.0) == t[0]);
  CHECK(pb.delta_minus_at(1.5) == 0.0);
}

TEST_CASE("identity problem reconstructs one") {
  const ReconstructionProblem pb(scattering_data(SteplikeOperator({}, {})));
  std::vector<cplx> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(i < 5 ? -1.5 - 0.3 * i : 1.2 + 0.4 * i);
  const auto out = reconstruct_on_grid(pb, grid);
  REQUIRE(out.size() == grid.size());
  for (const auto& p : out) {
    REQUIRE(p.ok);
    CHECK(std::abs(p.T - 1.0) < 1e-8);
  }
  CHECK(reconstruct_on_grid(pb, {}).empty());
}

TEST_CASE("single site at z = 5/4") {
  const ReconstructionProblem pb(scattering_data(single_site(0.25)));
  const Reconstruction r = reconstruct_T(pb, 1.25);
  CHECK(rel(r.value, 1.5) < 1e-4);
}

TEST_CASE("disjoint steplike backgrounds") {
  const SteplikeOperator op = disjoint();
  const ReconstructionProblem pb(scattering_data(op));
  for (double x : {1.5, -2.0}) CHECK(rel(reconstruct_T(pb, x).value, transmission_plus(op, x)) < 1e-3);
}

TEST_CASE("reconstruction properties") {
  const SteplikeOperator op = disjoint();
  const ScatteringData d = scattering_data(op);
  const ReconstructionProblem pb(d);
  SUBCASE("real left of the spectrum") {
    for (double x : {-1.5, -3.0}) {
      const cplx v = reconstruct_T(pb, x).value;
      CHECK(std::abs(v.imag()) < 1e-6 * std::abs(v));
    }
  }
  SUBCASE("path height independence") {
    ReconstructionOptions o;
    o.path_height_scale = 2.0;
    const ReconstructionProblem pb2(d, o);
    for (cplx z : {cplx(1.5, 0.0), cplx(0.2, 0.3)})
      CHECK(std::abs(reconstruct_T(pb, z).value - reconstruct_T(pb2, z).value) < 1e-7);
  }
  SUBCASE("boundary modulus") {
    for (const auto& s : d.T_plus_sq) {
      if (s.lambda < -0.8 || s.lambda > 0.8) continue;
      const double m = std::norm(reconstruct_T(pb, cplx(s.lambda, 1e-5)).value);
      CHECK(std::abs(m / s.value - 1.0) < 1e-2);
      break;
    }
  }
}

TEST_CASE("simple poles at eigenvalues") {
  const ReconstructionProblem pb(scattering_data(single_site(0.75)));
  const double d = 1e-3;
  const double a = std::abs(reconstruct_T(pb, 1.25 + d).value);
  const double b = std::abs(reconstruct_T(pb, 1.25 + d / 2).value);
  CHECK(std::abs(std::log(b / a) / std::log(2.0) - 1.0) < 0.1);
}

TEST_CASE("reconstruction errors") {
  const ScatteringData d = scattering_data(disjoint());
  const ReconstructionProblem pb(d);
  CHECK_THROWS_AS(reconstruct_T(pb, cplx(0.5, 1e-8)), DomainError);
  ScatteringData missing = d;
  missing.T_plus_sq.resize(2);
  CHECK_THROWS_AS(ReconstructionProblem{missing}, DomainError);
  ScatteringData on_sigma = d;
  on_sigma.eigenvalues = {0.5};
  CHECK_THROWS_AS(ReconstructionProblem{on_sigma}, DomainError);
  const auto grid = std::vector<cplx>{cplx(0.5, 0.0), cplx(-2.0, 0.0)};
  const auto out = reconstruct_on_grid(pb, grid, 2);
  CHECK_FALSE(out[0].ok);
  CHECK_FALSE(out[0].message.empty());
  CHECK(out[1].ok);
}

TEST_CASE("eigenvalue next to sigma_+^(1): normalization and winding") {
  const SteplikeOperator op({0.5, 0.0}, {0.5, 3.0}, {{-1, std::nullopt, 0.1}, {0, std::nullopt, 4.5}});
  const ScatteringData d = scattering_data(op);
  REQUIRE(d.eigenvalues.size() == 1);
  const ReconstructionProblem pb(d);
  // T_+ B_- winds once around each component of sigma
  REQUIRE(pb.winding_factors().size() == 2);
  for (cplx x : {cplx(1.5), cplx(-2.0), cplx(6.0), cplx(3.0, 0.5)})
    CHECK(rel(reconstruct_T(pb, x).value, transmission_plus(op, x)) < 1e-6);
}

TEST_CASE("perturbed off-diagonal coefficients need T_+ at infinity") {
  const SteplikeOperator op({0.5, 0.0}, {0.5, 3.0}, {{-1, 0.7, 0.1}, {0, std::nullopt, 4.5}});
  ReconstructionOptions o;
  // T_+ tends to the product of a(n) / a_background over the perturbed sites
  o.transmission_at_infinity = transmission_at_infinity(op);
  CHECK(o.transmission_at_infinity == cplx(0.7 / 0.5));
  CHECK(std::abs(transmission_plus(op, cplx(0.0, 1e4)) - 1.4) < 1e-3);
  const ReconstructionProblem pb(scattering_data(op), o);
  for (cplx x : {cplx(1.5), cplx(-2.0), cplx(3.0, 0.5)})
    CHECK(rel(reconstruct_T(pb, x).value, transmission_plus(op, x)) < 1e-6);
}
