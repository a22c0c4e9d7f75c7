#pragma once

// T_+(z) from one-sided scattering data: R_+ on sigma_+, |T_+|^2 on
// sigma_-^(1), eigenvalues and the divisor lists M^-, M^+.
//
//   T_+(z) = prod B_-(z, mu^-) prod B_-(z, mu^+)^-1 prod B_-(z, lambda_k)^-1
//            * exp( Q(z)^-1 [ 1/(pi i)  int_{sigma_-^(1)} Q log|T_+| w
//                           + 1/(2pi i) int_{sigma^(2)} Q (log(rho_-/rho_+) + log(1-|R_+|^2)) w
//                           + 1/(2pi)   int_{sigma_+^(1)} Q (arg R_+ + c delta^-) w ] )
//
// with w = omega_{z z*} on the sigma surface, Q(z) = prod sqrt(z - e_j) over
// the edges of sigma_+^(1), and B_- the Blaschke factor of the sigma_-
// surface. c is 1 or 2, see DeltaVariant.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gapflow/abelian.hpp"
#include "gapflow/potential.hpp"
#include "gapflow/quadrature.hpp"
#include "gapflow/scatter.hpp"

namespace gapflow {

/// kTheorem weighs delta^- with 1, kProof with 2 (arg R_+ = 2 arg T_+).
enum class DeltaVariant { kTheorem, kProof };

struct ReconstructionOptions {
  DeltaVariant variant = DeltaVariant::kProof;
  QuadratureSpec spec{};
  // Components of sigma_+^(1) at the ends of sigma get their 2 pi multiple
  // from the behaviour at infinity. With this flag the others pick one of
  // k - 1, k, k + 1 by edge regularity of the result.
  bool select_arg_branch = false;
  // T_+ at the infinite point; 1 when the off-diagonal coefficients equal
  // the background ones. The pole-free part is divided by its limit there.
  cplx transmission_at_infinity{1.0, 0.0};
  double min_distance = 1e-6;
  // Multiplies the Blaschke path height.
  double path_height_scale = 1.0;
};

/// C2 cubic spline through the samples, end slopes from the cubic through
/// the four outermost ones; constant outside the sampled range. With a
/// support interval the data are taken to behave like
/// p log(x - lo) + q log(hi - x) + smooth; p and q are read off the outermost
/// samples, only the smooth part is interpolated, and it is continued
/// linearly up to the support edges.
class SampledFunction {
 public:
  SampledFunction() = default;
  SampledFunction(std::vector<double> x, std::vector<double> y);
  SampledFunction(std::vector<double> x, std::vector<double> y, Interval support);
  double operator()(double t) const;
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  /// Edge exponents (0 without a support interval).
  double left_exponent() const { return p_lo_; }
  double right_exponent() const { return p_hi_; }

 private:
  double singular_part(double t) const;
  double smooth(double t) const;
  void build_spline();

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> r_;  // y minus the singular part
  std::vector<double> m2_;  // spline second derivatives of r_
  double slope_lo_ = 0.0;
  double slope_hi_ = 0.0;
  std::optional<Interval> support_;
  double p_lo_ = 0.0;
  double p_hi_ = 0.0;
};

class ReconstructionProblem {
 public:
  explicit ReconstructionProblem(ScatteringData data, ReconstructionOptions options = {});

  const ScatteringData& data() const { return data_; }
  const ReconstructionOptions& options() const { return options_; }
  const HyperellipticSurface& sigma_minus_surface() const { return sigma_minus_; }
  const HyperellipticSurface& sigma_plus_surface() const { return sigma_plus_; }
  const HyperellipticSurface& sigma_surface() const { return sigma_; }
  const SpectralDecomposition& decomposition() const { return decomposition_; }
  const PeriodData& sigma_periods() const { return periods_; }
  const std::vector<double>& q_edges() const { return q_edges_; }
  const std::vector<double>& delta_table() const { return delta_table_; }
  /// 2 pi multiples added to the unwrapped arg R_+ per sigma_+^(1) component.
  const std::vector<int>& arg_branches() const { return arg_branches_; }

  /// delta^- as a step function on the real line (0 outside the finite gaps
  /// of sigma_-).
  double delta_minus_at(double lambda) const;

  struct Piece {
    Interval iv;
    SampledFunction f;  // log|T|, log(1-|R|^2) or unwrapped arg R
  };
  const std::vector<Piece>& minus1_pieces() const { return minus1_; }
  const std::vector<Piece>& sigma2_pieces() const { return sigma2_; }
  const std::vector<Piece>& plus1_pieces() const { return plus1_; }

  struct Factors {
    std::vector<BlaschkeEvaluator> mu_minus;
    std::vector<BlaschkeEvaluator> mu_plus;
    std::vector<BlaschkeEvaluator> eigen;
  };
  const Factors& blaschke_factors() const { return factors_; }

  /// Limit at infinity of the pole-free part.
  cplx infinity_normalization() const { return t_infinity_; }

  /// The pole-free part may wind around the components of sigma; it is
  /// multiplied by prod (z - c)^order so that its logarithm is single valued.
  struct WindingFactor {
    double c;
    int order;
  };
  const std::vector<WindingFactor>& winding_factors() const { return winding_; }

 private:
  double plus1_data(std::size_t piece, double x) const;
  void anchor_arg_branches();
  void choose_arg_branches();
  void balance_windings();

  ScatteringData data_;
  ReconstructionOptions options_;
  HyperellipticSurface sigma_minus_;
  HyperellipticSurface sigma_plus_;
  SpectralDecomposition decomposition_;
  HyperellipticSurface sigma_;
  PeriodData periods_;
  std::vector<double> q_edges_;
  std::vector<Piece> minus1_;
  std::vector<Piece> sigma2_;
  std::vector<Piece> plus1_;
  std::vector<int> arg_branches_;
  std::vector<std::size_t> anchored_;
  Factors factors_;
  std::vector<double> delta_table_;
  cplx t_infinity_{1.0, 0.0};
  std::vector<WindingFactor> winding_;
};

/// prod_j sqrt(z - e_j) over the edges of sigma_+^(1).
cplx q_eval(const ReconstructionProblem& problem, cplx z,
            BoundarySide side = BoundarySide::kNone);

/// Signed sum of b-period phases per finite gap of sigma_-.
std::vector<double> delta_minus_table(const ReconstructionProblem& problem);

struct Reconstruction {
  cplx value;
  double err_est = 0.0;
};

Reconstruction reconstruct_T(const ReconstructionProblem& problem, cplx z);

struct GridPoint {
  cplx z;
  cplx T;
  double err_est = 0.0;
  bool ok = false;
  std::string message;
};

/// Parallel map of reconstruct_T; per-point failures are recorded, not thrown.
std::vector<GridPoint> reconstruct_on_grid(const ReconstructionProblem& problem,
                                           std::span<const cplx> grid, unsigned threads = 0);

}  // namespace gapflow
