#pragma once

// Direct scattering for Jacobi operators
//   (H f)(n) = a(n-1) f(n-1) + b(n) f(n) + a(n) f(n+1)
// that equal one constant background for n < N_- and another for n > N_+.

#include <functional>
#include <optional>
#include <vector>

#include "gapflow/surface.hpp"

namespace gapflow {

struct Background {
  double a = 0.5;
  double b = 0.0;

  Interval band() const { return {b - 2.0 * a, b + 2.0 * a}; }
  HyperellipticSurface surface() const { return HyperellipticSurface({b - 2.0 * a, b + 2.0 * a}); }
};

/// psi_+ lives on the right half-axis, psi_- on the left.
enum class Side { kPlus, kMinus };

/// Absolute coefficient values at site n; an absent value keeps the
/// background one.
struct PerturbationEntry {
  long n = 0;
  std::optional<double> a;
  std::optional<double> b;
};

class SteplikeOperator {
 public:
  SteplikeOperator(Background left, Background right, std::vector<PerturbationEntry> table = {});

  const Background& left() const { return left_; }
  const Background& right() const { return right_; }
  const Background& background(Side s) const { return s == Side::kPlus ? right_ : left_; }
  const std::vector<PerturbationEntry>& perturbation() const { return table_; }

  // Background for n < 0 is the left one, for n >= 0 the right one.
  double a(long n) const;
  double b(long n) const;

  long window_lo() const { return n_lo_; }
  long window_hi() const { return n_hi_; }

  BandSet sigma_minus() const { return BandSet({left_.band()}); }
  BandSet sigma_plus() const { return BandSet({right_.band()}); }
  /// Gershgorin enclosure of the whole spectrum.
  Interval gershgorin() const;

 private:
  Background left_;
  Background right_;
  std::vector<PerturbationEntry> table_;
  long n_lo_ = -1;
  long n_hi_ = 0;
};

/// Root w of a(w + 1/w) + b = z with |w| <= 1; band points use the limit
/// from `side` (kNone = above).
cplx floquet_multiplier(const Background& bg, cplx z, BoundarySide side = BoundarySide::kNone);

/// w^n for the right side, w^-n for the left side.
cplx floquet(const Background& bg, cplx z, long n, Side side,
             BoundarySide boundary = BoundarySide::kNone);

/// Values of a Jost solution on the sites [lo, hi].
class JostSolution {
 public:
  JostSolution(long lo, std::vector<cplx> values) : lo_(lo), values_(std::move(values)) {}
  long lo() const { return lo_; }
  long hi() const { return lo_ + static_cast<long>(values_.size()) - 1; }
  cplx operator()(long n) const;
  JostSolution conj() const;

 private:
  long lo_;
  std::vector<cplx> values_;
};

JostSolution jost_solution(const SteplikeOperator& op, cplx z, Side side, long lo, long hi,
                           BoundarySide boundary = BoundarySide::kNone);
cplx jost(const SteplikeOperator& op, cplx z, long n, Side side,
          BoundarySide boundary = BoundarySide::kNone);

/// a(n) (f(n) g(n+1) - f(n+1) g(n)).
cplx wronskian(const SteplikeOperator& op, const JostSolution& f, const JostSolution& g, long n);

struct WronskianCheck {
  cplx value;       // at n = 0 when available
  double variance;  // max_n |W(n) - value|
  bool consistent;  // variance <= 1e-8 * max(|value|, typical term size)
};
WronskianCheck wronskian_checked(const SteplikeOperator& op, const JostSolution& f,
                                 const JostSolution& g);

/// W(psi_-, psi_+) at z.
cplx jost_wronskian(const SteplikeOperator& op, cplx z, BoundarySide boundary = BoundarySide::kNone);

/// Analytic transmission coefficients T_+(z), T_-(z); on the bands the
/// boundary value from `boundary`.
cplx transmission_plus(const SteplikeOperator& op, cplx z,
                       BoundarySide boundary = BoundarySide::kNone);
cplx transmission_minus(const SteplikeOperator& op, cplx z,
                        BoundarySide boundary = BoundarySide::kNone);
/// lim T_+(z) as z -> infinity: prod a(n) / a_background(n) over the
/// perturbed sites.
double transmission_at_infinity(const SteplikeOperator& op);
/// R_+ on sigma_+ and R_- on sigma_- (real lambda, limits from above).
cplx reflection_plus(const SteplikeOperator& op, double lambda);
cplx reflection_minus(const SteplikeOperator& op, double lambda);

struct ScatteringGrids {
  int samples_per_band = 400;
  double edge_margin = 1e-6;
  bool chebyshev = true;
  int scan_points = 2000;
  double eigen_tol = 1e-12;

  void validate() const;
};

/// Sample points on [lo + margin, hi - margin], increasing.
std::vector<double> band_samples(Interval iv, const ScatteringGrids& grids);

struct ReflectionSample {
  double lambda;
  cplx value;
  friend bool operator==(const ReflectionSample&, const ReflectionSample&) = default;
};
struct ModulusSample {
  double lambda;
  double value;
  friend bool operator==(const ModulusSample&, const ModulusSample&) = default;
};

struct ScatteringData {
  std::vector<double> sigma_minus_edges;
  std::vector<double> sigma_plus_edges;
  std::vector<ReflectionSample> R_plus;  // on sigma_+
  std::vector<ModulusSample> T_plus_sq;  // |T_+|^2 on sigma_-^(1)
  std::vector<double> eigenvalues;
  std::vector<double> norming_plus;
  std::vector<double> M_minus;
  std::vector<double> M_plus;
  // Dirichlet data of the background surfaces, one value per gap; empty for
  // constant backgrounds.
  std::vector<double> mu_minus;
  std::vector<double> mu_plus;

  friend bool operator==(const ScatteringData&, const ScatteringData&) = default;
};

std::vector<double> find_eigenvalues(const SteplikeOperator& op, const ScatteringGrids& grids = {});

/// gamma_{side}(lambda)^-1 = sum_n |psi_side(lambda, n)|^2, tails summed as
/// geometric series.
double norming_constant(const SteplikeOperator& op, double lambda, Side side);

ScatteringData scattering_data(const SteplikeOperator& op, const ScatteringGrids& grids = {});

/// rho_+(lambda) / rho_-(lambda) from the background data in `data`,
/// boundary values from above.
cplx rho_ratio(const ScatteringData& data, const SurfacePoint& p);

struct TranslatedSample {
  double lambda;
  bool in_sigma2;  // otherwise on sigma_-^(1)
  cplx T_minus;
  cplx R_minus;
  bool flagged;  // |T_+| < 1e-12, R_- undefined
};

/// Opposite-side data from T_+ values: T_- = (rho_+/rho_-) T_+ on sigma^(2)
/// and sigma_-^(1); R_- = -conj(R_+) T_+ / conj(T_+) on sigma^(2) and
/// T_-/conj(T_-) on sigma_-^(1). Evaluated on the sample points of `data`.
std::vector<TranslatedSample> translate_data(const ScatteringData& data,
                                             const std::function<cplx(double)>& t_plus);

}  // namespace gapflow
