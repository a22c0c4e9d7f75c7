#include "gapflow/abelian.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "gapflow/error.hpp"

namespace gapflow {

namespace {

constexpr double kPoleEdgeDistance = 1e-10;
constexpr double kMaxCondition = 1e12;

cplx powi(cplx z, int k) {
  cplx v(1.0, 0.0);
  for (int i = 0; i < k; ++i) v *= z;
  return v;
}

void check_pole(const HyperellipticSurface& s, const SurfacePoint& p, const char* what) {
  if (!std::isfinite(p.z.real()) || !std::isfinite(p.z.imag()))
    throw DomainError(std::string(what) + ": pole must be finite");
  if (p.z.imag() == 0.0 && s.near_branch_point(p.z.real(), kPoleEdgeDistance)) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": pole " << p.z.real() << " lies within " << kPoleEdgeDistance
       << " of a band edge";
    throw SingularEvaluation(os.str());
  }
}

}  // namespace

PeriodData compute_periods(const HyperellipticSurface& surface, const QuadratureSpec& spec) {
  PeriodData pd;
  const int g = surface.genus();
  pd.genus = g;
  if (g == 0) return pd;
  pd.C = RealMatrix(g, g);
  for (int k = 1; k <= g; ++k) {
    const Interval gap = surface.gap(k);
    for (int j = 1; j <= g; ++j) {
      const RealIntegrand f = [&](double x) -> cplx {
        return powi(x, j - 1) / surface.sqrt_P(cplx(x, 0.0));
      };
      const QuadratureResult r = integrate_endpoint_singular(f, gap, {true, true}, spec);
      pd.C(j - 1, k - 1) = 2.0 * r.value.real();
    }
  }
  Eigen::MatrixXd C(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) C(i, j) = pd.C(i, j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
  const auto& sv = svd.singularValues();
  const double smin = sv(g - 1);
  pd.condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (!(pd.condition <= kMaxCondition)) {
    std::ostringstream os;
    os << "compute_periods: period matrix condition number " << pd.condition
       << " exceeds 1e12; reduce the genus or separate the bands further";
    throw NumericalError(os.str());
  }
  const Eigen::MatrixXd inv = C.fullPivLu().inverse();
  pd.c = RealMatrix(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) pd.c(i, j) = inv(i, j);
  return pd;
}

cplx holomorphic_density(const HyperellipticSurface& surface, const PeriodData& periods, int j,
                         const SurfacePoint& q) {
  if (j < 1 || j > periods.genus) throw DomainError("holomorphic_density: index out of range");
  const cplx root = surface.sqrt_P(q);
  if (root == cplx(0.0, 0.0)) throw SingularEvaluation("holomorphic_density: branch point");
  cplx num(0.0, 0.0);
  for (int k = periods.genus - 1; k >= 0; --k) num = num * q.z + periods.c(j - 1, k);
  return num / root;
}

cplx gap_pole_period(const HyperellipticSurface& surface, int l, cplx x0,
                     const QuadratureSpec& spec) {
  const Interval gap = surface.gap(l);
  const RealIntegrand w = [&](double x) -> cplx { return 1.0 / surface.sqrt_P(cplx(x, 0.0)); };
  if (x0.imag() == 0.0 && x0.real() >= gap.lo - kPoleEdgeDistance &&
      x0.real() <= gap.hi + kPoleEdgeDistance) {
    const double x = x0.real();
    if (x - gap.lo <= kPoleEdgeDistance || gap.hi - x <= kPoleEdgeDistance)
      throw SingularEvaluation("gap_pole_period: pole too close to a gap edge");
    const RealIntegrand one = [](double) -> cplx { return 1.0; };
    return 2.0 * integrate_principal_value(one, x, w, gap, {true, true}, spec).value;
  }
  const RealIntegrand f = [&](double x) -> cplx { return w(x) / (x - x0); };
  return 2.0 * integrate_endpoint_singular(f, gap, {true, true}, spec).value;
}

ThirdKindKernel::ThirdKindKernel(HyperellipticSurface surface, const SurfacePoint& p,
                                 const QuadratureSpec& spec, const PeriodData* periods)
    : surface_(std::move(surface)), p_(p), q_(p.star()), star_pair_(true) {
  check_pole(surface_, p_, "ThirdKindKernel");
  rp_ = surface_.sqrt_P(p_);
  rq_ = -rp_;
  normalize(spec, periods);
}

ThirdKindKernel::ThirdKindKernel(HyperellipticSurface surface, const SurfacePoint& p,
                                 const SurfacePoint& q, const QuadratureSpec& spec,
                                 const PeriodData* periods)
    : surface_(std::move(surface)), p_(p), q_(q) {
  check_pole(surface_, p_, "ThirdKindKernel");
  check_pole(surface_, q_, "ThirdKindKernel");
  rp_ = surface_.sqrt_P(p_);
  rq_ = surface_.sqrt_P(q_);
  if (p.z == q.z) {
    if (rp_ == rq_) throw DomainError("ThirdKindKernel: the two poles coincide");
    star_pair_ = true;
  } else {
    star_pair_ = false;
  }
  normalize(spec, periods);
}

void ThirdKindKernel::normalize(const QuadratureSpec& spec, const PeriodData* periods) {
  const int g = surface_.genus();
  if (g == 0) return;
  PeriodData local;
  if (periods == nullptr || periods->genus != g) {
    local = compute_periods(surface_, spec);
    periods = &local;
  }
  Eigen::MatrixXd A(g, g);
  Eigen::VectorXd r_re(g), r_im(g);
  for (int l = 0; l < g; ++l) {
    for (int m = 0; m < g; ++m) A(l, m) = periods->C(m, l);
    cplx r;
    const cplx gp = gap_pole_period(surface_, l + 1, p_.z, spec);
    if (star_pair_) {
      r = -rp_ * gp;
    } else {
      const cplx gq = gap_pole_period(surface_, l + 1, q_.z, spec);
      r = -(0.5 * rp_ * gp - 0.5 * rq_ * gq);
    }
    r_re(l) = r.real();
    r_im(l) = r.imag();
  }
  const auto lu = A.fullPivLu();
  if (!lu.isInvertible()) throw NumericalError("ThirdKindKernel: normalization system is singular");
  const Eigen::VectorXd x_re = lu.solve(r_re);
  const Eigen::VectorXd x_im = lu.solve(r_im);
  poly_.resize(g);
  for (int m = 0; m < g; ++m) {
    poly_[m] = cplx(x_re(m), x_im(m));
    if (!std::isfinite(poly_[m].real()) || !std::isfinite(poly_[m].imag()))
      throw NumericalError("ThirdKindKernel: normalization solve produced non-finite values");
  }
}

cplx ThirdKindKernel::poly_at(cplx z) const {
  cplx v(0.0, 0.0);
  for (auto it = poly_.rbegin(); it != poly_.rend(); ++it) v = v * z + *it;
  return v;
}

cplx ThirdKindKernel::density(cplx z, cplx sz) const {
  if (z == p_.z || (!star_pair_ && z == q_.z))
    throw SingularEvaluation("ThirdKindKernel: evaluation at a pole projection");
  if (sz == cplx(0.0, 0.0)) throw SingularEvaluation("ThirdKindKernel: evaluation at a branch point");
  if (star_pair_) return (rp_ / (z - p_.z) + poly_at(z)) / sz;
  return ((sz + rp_) / (2.0 * (z - p_.z)) - (sz + rq_) / (2.0 * (z - q_.z)) + poly_at(z)) / sz;
}

cplx ThirdKindKernel::density(const SurfacePoint& q) const {
  return density(q.z, surface_.sqrt_P(q));
}

ThirdKindKernel third_kind_kernel(const HyperellipticSurface& surface, const SurfacePoint& p,
                                  const QuadratureSpec& spec) {
  return ThirdKindKernel(surface, p, spec);
}

cplx omega_density(const ThirdKindKernel& kernel, const SurfacePoint& q) {
  return kernel.density(q);
}

double accumulated_band_phase(const ThirdKindKernel& kernel, int j, const QuadratureSpec& spec) {
  const HyperellipticSurface& s = kernel.surface();
  if (j < 0 || j > s.genus() + 1) throw DomainError("accumulated_band_phase: index out of range");
  double total = 0.0;
  for (int m = 0; m < j; ++m) {
    const Interval band{s.edge(2 * m), s.edge(2 * m + 1)};
    const RealIntegrand f = [&](double x) -> cplx {
      return kernel.density(SurfacePoint::upper(cplx(x, 0.0), BoundarySide::kAbove));
    };
    total += integrate_endpoint_singular(f, band, {true, true}, spec).value.imag();
  }
  return total;
}

double delta_b_period(const ThirdKindKernel& kernel, int j, const QuadratureSpec& spec) {
  const HyperellipticSurface& s = kernel.surface();
  if (j < 0 || j > s.genus() + 1) throw DomainError("delta_b_period: gap index out of range");
  if (j == 0 || j == s.genus() + 1) return 0.0;
  return accumulated_band_phase(kernel, j, spec);
}

double delta_b_period(const HyperellipticSurface& surface, double rho, int j,
                      const QuadratureSpec& spec) {
  if (!std::isfinite(rho) || surface.on_bands(rho))
    throw DomainError("delta_b_period: rho must be real and off the bands");
  if (j < 0 || j > surface.genus() + 1) throw DomainError("delta_b_period: gap index out of range");
  if (j == 0 || j == surface.genus() + 1) return 0.0;
  const ThirdKindKernel k(surface, SurfacePoint::upper(cplx(rho, 0.0)), spec);
  return accumulated_band_phase(k, j, spec);
}

}  // namespace gapflow
