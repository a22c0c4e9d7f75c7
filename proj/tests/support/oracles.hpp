#pragma once

// Test-side reference values. Nothing here calls into the quadrature module
// of the library: integrals go through Boost.Math, closed forms are coded
// from scratch.

#include <complex>
#include <functional>

#include "gapflow/abelian.hpp"

namespace oracle {

using cplx = std::complex<double>;

double agm(double a, double b);
/// K(k) = pi / (2 agm(1, sqrt(1 - k^2))).
double elliptic_k(double k);

/// |w| < 1 root of (w + 1/w)/2 = z; on [-1, 1] the limit from above.
cplx joukowski_inverse(cplx z);
/// Genus-0 Blaschke factor of [-1, 1] with pole rho.
cplx blaschke_genus0(cplx z, double rho);
/// Transmission coefficient for a single site b(0) = beta on a = 1/2, b = 0.
cplx single_site_transmission(cplx z, double beta);
double single_site_eigenvalue(double beta);

/// int_a^b f with tanh-sinh; f may blow up like an inverse square root at
/// either end.
cplx tanh_sinh(const std::function<cplx(double)>& f, double a, double b, double tol = 1e-12);

/// PV int_lo^hi f(x)/(x - x0) dx for f with inverse square-root behaviour at
/// both ends, by Gauss-Chebyshev after removing the pole.
cplx edge_weighted_pv(const std::function<cplx(double)>& f, double x0, double lo, double hi);

/// int over the a-cycle around gap l; a gap pole is handled by subtracting
/// the pole and taking a principal value.
cplx a_period(const gapflow::ThirdKindKernel& kernel, int l);

/// int_{a_j} zeta_k.
double holomorphic_a_period(const gapflow::HyperellipticSurface& s, const gapflow::PeriodData& pd,
                            int j, int k);

/// b-period phase of a real-pole kernel from a counterclockwise rectangle
/// around bands 0..j-1 on the upper sheet:
///   delta_j = -(Im oint - 2 pi n) / 2, n = 1 when the pole is enclosed.
double b_cycle_phase(const gapflow::ThirdKindKernel& kernel, int j);

}  // namespace oracle
