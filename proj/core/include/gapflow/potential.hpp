#pragma once

// Blaschke factors B(p, rho) = exp(int_{E_0}^p omega_{rho rho*}) and the
// Green function of the upper sheet.
//
// Integration path from E_0: vertical to height +-h, horizontal to Re p,
// vertical down (or up) to p. Upward when Im p > 0 or p is real and not
// explicitly taken from below.

#include <optional>

#include "gapflow/abelian.hpp"

namespace gapflow {

class BlaschkeEvaluator {
 public:
  /// height_scale multiplies the default path height (scale/4).
  BlaschkeEvaluator(HyperellipticSurface surface, double rho, const QuadratureSpec& spec = {},
                    double height_scale = 1.0, const PeriodData* periods = nullptr);

  double rho() const { return rho_; }
  const HyperellipticSurface& surface() const { return kernel_.surface(); }
  const ThirdKindKernel& kernel() const { return kernel_; }
  double path_height() const { return height_; }

  cplx operator()(const SurfacePoint& p) const { return evaluate(p).value; }
  /// Value with the quadrature error estimate of the exponent.
  QuadratureResult evaluate(const SurfacePoint& p) const;
  /// B at the infinite point of the upper sheet.
  QuadratureResult at_infinity() const;
  /// delta_j(rho); 0 for j in {0, g+1}.
  double gap_phase(int j) const;

  Polyline path_to(cplx z, BoundarySide side, double height) const;

 private:
  QuadratureResult upper_exponent(cplx z, BoundarySide side) const;

  double rho_;
  QuadratureSpec spec_;
  double height_;
  ThirdKindKernel kernel_;
};

cplx blaschke(const BlaschkeEvaluator& evaluator, const SurfacePoint& p);
double blaschke_gap_phase(const BlaschkeEvaluator& evaluator, int j);

/// Green function of the upper sheet with pole z0, evaluated at z.
double green(const HyperellipticSurface& surface, cplx z, cplx z0,
             const QuadratureSpec& spec = {});

}  // namespace gapflow
