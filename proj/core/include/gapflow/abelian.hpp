#pragma once

// Period constants and normalized Abelian differentials on a
// HyperellipticSurface. a-cycle integrals are twice the upper-sheet gap
// integral; a pole sitting in the gap is handled as a principal value.

#include <memory>
#include <vector>

#include "gapflow/quadrature.hpp"
#include "gapflow/surface.hpp"

namespace gapflow {

/// Small dense row-major matrix, 0-based.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  double& operator()(int i, int j) { return data_[i * cols_ + j]; }
  double operator()(int i, int j) const { return data_[i * cols_ + j]; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct PeriodData {
  int genus = 0;
  // C(j-1, k-1) = 2 * int_{gap k} z^(j-1) / R(z) dz
  RealMatrix C;
  // inverse of C; row j holds the coefficients of zeta_j
  RealMatrix c;
  double condition = 1.0;
};

/// Throws NumericalError when C is too ill-conditioned (cond > 1e12).
PeriodData compute_periods(const HyperellipticSurface& surface, const QuadratureSpec& spec = {});

/// Density (coefficient of dz) of zeta_j, j = 1..g, at an upper-sheet point.
cplx holomorphic_density(const HyperellipticSurface& surface, const PeriodData& periods, int j,
                         const SurfacePoint& q);

/// 2 * int_{gap l} 1 / ((x - x0) R(x)) dx, a principal value when x0 is real
/// and inside the gap. l is 1-based.
cplx gap_pole_period(const HyperellipticSurface& surface, int l, cplx x0,
                     const QuadratureSpec& spec = {});

/// Normalized third-kind differential omega_pq (residue +1 at p, -1 at q,
/// vanishing a-periods). With q = star(p) this is omega_pp*.
class ThirdKindKernel {
 public:
  ThirdKindKernel(HyperellipticSurface surface, const SurfacePoint& p,
                  const QuadratureSpec& spec = {}, const PeriodData* periods = nullptr);
  ThirdKindKernel(HyperellipticSurface surface, const SurfacePoint& p, const SurfacePoint& q,
                  const QuadratureSpec& spec = {}, const PeriodData* periods = nullptr);

  const HyperellipticSurface& surface() const { return surface_; }
  const SurfacePoint& pole() const { return p_; }
  const SurfacePoint& second_pole() const { return q_; }
  bool star_pair() const { return star_pair_; }
  /// Coefficients of the normalization polynomial, lowest degree first.
  const std::vector<cplx>& poly() const { return poly_; }
  cplx poly_at(cplx z) const;

  cplx density(const SurfacePoint& q) const;
  /// Same, with R at the evaluation point supplied by the caller.
  cplx density(cplx z, cplx sqrt_at_z) const;

 private:
  void normalize(const QuadratureSpec& spec, const PeriodData* periods);

  HyperellipticSurface surface_;
  SurfacePoint p_;
  SurfacePoint q_;
  bool star_pair_ = true;
  cplx rp_;
  cplx rq_;
  std::vector<cplx> poly_;
};

ThirdKindKernel third_kind_kernel(const HyperellipticSurface& surface, const SurfacePoint& p,
                                  const QuadratureSpec& spec = {});

cplx omega_density(const ThirdKindKernel& kernel, const SurfacePoint& q);

/// Imaginary part of int omega_{rho rho*} accumulated over bands 0..j-1
/// (limits from above) for any j in 0..g+1, no convention applied.
double accumulated_band_phase(const ThirdKindKernel& kernel, int j,
                              const QuadratureSpec& spec = {});

/// delta_j(rho) for j = 0..g+1, with delta_0 = delta_{g+1} = 0.
double delta_b_period(const HyperellipticSurface& surface, double rho, int j,
                      const QuadratureSpec& spec = {});
double delta_b_period(const ThirdKindKernel& kernel, int j, const QuadratureSpec& spec = {});

}  // namespace gapflow
