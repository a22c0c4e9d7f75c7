#pragma once

// Adaptive Gauss-Legendre panels for the integrals that show up on
// hyperelliptic surfaces: 1/sqrt endpoint blow-up, an interior simple pole
// (principal value), and straight-segment paths in the complex plane.

#include <complex>
#include <functional>
#include <vector>

#include "gapflow/surface.hpp"

namespace gapflow {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  // Maximum bisection depth of a single panel.
  int max_subdivisions = 60;
  // Gauss-Legendre nodes per panel.
  int base_nodes = 32;

  void validate() const;
};

struct QuadratureResult {
  cplx value;
  double error = 0.0;
  int panels = 0;
};

struct SingularEnds {
  bool left = true;
  bool right = true;
};

using RealIntegrand = std::function<cplx(double)>;
using ComplexIntegrand = std::function<cplx(cplx)>;

/// Gauss-Legendre rule on [-1, 1]; cached and shared between threads.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Plain adaptive integral of a smooth integrand over [a, b].
QuadratureResult integrate(const RealIntegrand& f, Interval iv, const QuadratureSpec& spec = {});

/// Integral over [a, b] of f with at worst (x-a)^(-1/2) / (b-x)^(-1/2) or
/// logarithmic behaviour at the flagged ends. Flagged ends go through
/// x = a + s^2 (resp. b - s^2); f is never evaluated at a flagged end.
QuadratureResult integrate_endpoint_singular(const RealIntegrand& f, Interval iv,
                                             SingularEnds ends,
                                             const QuadratureSpec& spec = {});

/// PV integral over [a, b] of f(x) w(x) / (x - x0). The pole term
/// f(x0) w(x0)/(x - x0) is removed and added back in closed form.
QuadratureResult integrate_principal_value(const RealIntegrand& f_regular, double pole,
                                           const RealIntegrand& weight, Interval iv,
                                           SingularEnds ends = {},
                                           const QuadratureSpec& spec = {});

class Polyline {
 public:
  explicit Polyline(std::vector<cplx> vertices);
  const std::vector<cplx>& vertices() const { return vertices_; }
  cplx front() const { return vertices_.front(); }
  cplx back() const { return vertices_.back(); }
  /// Distance from w to the nearest point of the polyline.
  double distance_to(cplx w) const;

 private:
  std::vector<cplx> vertices_;
};

struct PathEnds {
  bool start_singular = false;
  bool end_singular = false;
};

/// Sum of the segment integrals of f(z) dz along the polyline.
QuadratureResult integrate_path(const ComplexIntegrand& f, const Polyline& path,
                                const QuadratureSpec& spec = {}, PathEnds ends = {});

}  // namespace gapflow
