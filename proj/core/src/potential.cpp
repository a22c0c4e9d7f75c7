#include "gapflow/potential.hpp"

#include <cmath>
#include <sstream>

#include "gapflow/error.hpp"

namespace gapflow {

namespace {

constexpr double kPathClearance = 1e-8;

std::vector<cplx> dedupe(std::vector<cplx> v) {
  std::vector<cplx> out;
  for (const cplx& z : v)
    if (out.empty() || out.back() != z) out.push_back(z);
  return out;
}

double path_sign(cplx z, BoundarySide side) {
  if (z.imag() > 0.0) return 1.0;
  if (z.imag() < 0.0) return -1.0;
  return side == BoundarySide::kBelow ? -1.0 : 1.0;
}

std::vector<cplx> template_vertices(double e0, cplx z, double s, double height) {
  return dedupe({cplx(e0, 0.0), cplx(e0, s * height), cplx(z.real(), s * height), z});
}

bool ends_on_branch_point(const HyperellipticSurface& surface, cplx z) {
  return z.imag() == 0.0 && surface.near_branch_point(z.real(), kBandTolerance);
}

}  // namespace

BlaschkeEvaluator::BlaschkeEvaluator(HyperellipticSurface surface, double rho,
                                     const QuadratureSpec& spec, double height_scale,
                                     const PeriodData* periods)
    : rho_(rho),
      spec_(spec),
      height_(0.25 * height_scale * surface.scale()),
      kernel_([&]() -> ThirdKindKernel {
        if (!std::isfinite(rho) || surface.on_bands(rho)) {
          std::ostringstream os;
          os.precision(17);
          os << "BlaschkeEvaluator: pole " << rho << " must be real and off the bands";
          throw DomainError(os.str());
        }
        return ThirdKindKernel(surface, SurfacePoint::upper(cplx(rho, 0.0)), spec, periods);
      }()) {
  if (!(height_scale > 0.0)) throw DomainError("BlaschkeEvaluator: height_scale must be positive");
}

Polyline BlaschkeEvaluator::path_to(cplx z, BoundarySide side, double height) const {
  return Polyline(template_vertices(surface().first_edge(), z, path_sign(z, side), height));
}

QuadratureResult BlaschkeEvaluator::upper_exponent(cplx z, BoundarySide side) const {
  const HyperellipticSurface& s = surface();
  if (z == cplx(s.first_edge(), 0.0)) return {cplx(0.0, 0.0), 0.0, 0};
  if (std::abs(z - rho_) < kPathClearance)
    throw SingularEvaluation("blaschke: evaluation point coincides with the pole");
  double h = height_;
  std::optional<Polyline> path;
  for (int attempt = 0; attempt < 2; ++attempt, h *= 2.0) {
    Polyline candidate = path_to(z, side, h);
    if (candidate.distance_to(rho_) >= kPathClearance) {
      path.emplace(std::move(candidate));
      break;
    }
  }
  if (!path) throw SingularEvaluation("blaschke: no integration path clears the pole");
  const ComplexIntegrand f = [&](cplx w) -> cplx {
    return kernel_.density(w, s.sqrt_P(SurfacePoint::upper(w)));
  };
  return integrate_path(f, *path, spec_, {true, ends_on_branch_point(s, z)});
}

QuadratureResult BlaschkeEvaluator::evaluate(const SurfacePoint& p) const {
  const bool lower = p.sheet == Sheet::kLower;
  QuadratureResult e = upper_exponent(p.z, p.side);
  const cplx b = lower ? std::exp(-e.value) : std::exp(e.value);
  return {b, std::abs(b) * e.error, e.panels};
}

QuadratureResult BlaschkeEvaluator::at_infinity() const {
  const HyperellipticSurface& s = surface();
  const double e0 = s.first_edge();
  const cplx top(e0, height_);
  const ComplexIntegrand f = [&](cplx w) -> cplx {
    return kernel_.density(w, s.sqrt_P(SurfacePoint::upper(w)));
  };
  const QuadratureResult head = integrate_path(f, Polyline({cplx(e0, 0.0), top}), spec_, {true, false});
  // w = top + i t/(1-t), t in [0, 1); the density decays like |w|^-2
  const RealIntegrand tail_f = [&](double t) -> cplx {
    const double u = 1.0 - t;
    const cplx w = top + cplx(0.0, t / u);
    return f(w) * cplx(0.0, 1.0 / (u * u));
  };
  const QuadratureResult tail = integrate(tail_f, {0.0, 1.0}, spec_);
  const cplx b = std::exp(head.value + tail.value);
  return {b, std::abs(b) * (head.error + tail.error), head.panels + tail.panels};
}

double BlaschkeEvaluator::gap_phase(int j) const { return delta_b_period(kernel_, j, spec_); }

cplx blaschke(const BlaschkeEvaluator& evaluator, const SurfacePoint& p) { return evaluator(p); }

double blaschke_gap_phase(const BlaschkeEvaluator& evaluator, int j) {
  return evaluator.gap_phase(j);
}

double green(const HyperellipticSurface& surface, cplx z, cplx z0, const QuadratureSpec& spec) {
  if (std::abs(z - z0) < kPathClearance) throw SingularEvaluation("green: z coincides with the pole");
  if (z0.imag() == 0.0) {
    if (surface.on_bands(z0.real())) return 0.0;
    const BlaschkeEvaluator b(surface, z0.real(), spec);
    return -std::log(std::abs(b(SurfacePoint::upper(z))));
  }
  const double e0 = surface.first_edge();
  if (z == cplx(e0, 0.0)) return 0.0;
  const ThirdKindKernel k(surface, SurfacePoint::upper(z0), SurfacePoint::lower(std::conj(z0)),
                          spec);
  const double s = path_sign(z, BoundarySide::kNone);
  const double h = 0.25 * surface.scale();
  std::optional<Polyline> best;
  double best_d = -1.0;
  for (double f : {1.0, 2.0, 0.5, 3.0, 0.25}) {
    Polyline p(template_vertices(e0, z, s, f * h));
    const double d = p.distance_to(z0);
    if (d > best_d) {
      best_d = d;
      best.emplace(std::move(p));
    }
  }
  const ComplexIntegrand f = [&](cplx w) -> cplx {
    return k.density(w, surface.sqrt_P(SurfacePoint::upper(w)));
  };
  const QuadratureResult r =
      integrate_path(f, *best, spec, {true, ends_on_branch_point(surface, z)});
  return -r.value.real();
}

}  // namespace gapflow
