#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {

constexpr double kPi = std::numbers::pi;

cplx kronrod(const std::function<cplx(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  auto re = [&](double t) { return f(t).real(); };
  auto im = [&](double t) { return f(t).imag(); };
  return {gauss_kronrod<double, 61>::integrate(re, a, b, 15, 1e-13),
          gauss_kronrod<double, 61>::integrate(im, a, b, 15, 1e-13)};
}

cplx segment(const std::function<cplx(cplx)>& f, cplx from, cplx to) {
  const cplx d = to - from;
  return kronrod([&](double t) { return f(from + t * d) * d; }, 0.0, 1.0);
}

// int_lo^hi f(x) dx for f with inverse square-root edges, as Gauss-Chebyshev
// of the first kind applied to f(x) sqrt((x - lo)(hi - x)).
cplx chebyshev(const std::function<cplx(double)>& f, double lo, double hi, int n = 600) {
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  cplx sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = kPi * (k + 0.5) / n;
    sum += f(c - h * std::cos(t)) * (h * std::sin(t));
  }
  return sum * (kPi / n);
}

}  // namespace

double agm(double a, double b) {
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
    const double m = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = m;
  }
  return a;
}

double elliptic_k(double k) { return kPi / (2.0 * agm(1.0, std::sqrt(1.0 - k * k))); }

cplx joukowski_inverse(cplx z) {
  const cplx r = std::sqrt(z * z - 1.0);
  const cplx w1 = z - r, w2 = z + r;
  // on [-1, 1] both roots are unimodular; the limit from above has Im w <= 0
  if (std::abs(std::abs(w1) - std::abs(w2)) < 1e-14) return w1.imag() <= 0.0 ? w1 : w2;
  return std::abs(w1) < std::abs(w2) ? w1 : w2;
}

cplx blaschke_genus0(cplx z, double rho) {
  const cplx wz = joukowski_inverse(z), wr = joukowski_inverse(rho);
  return (wz - wr) / (wz * wr - 1.0);
}

cplx single_site_transmission(cplx z, double beta) {
  const cplx w = joukowski_inverse(z);
  const cplx d = w - 1.0 / w;
  return d / (d + 2.0 * beta);
}

double single_site_eigenvalue(double beta) {
  return std::copysign(std::sqrt(1.0 + beta * beta), beta);
}

cplx tanh_sinh(const std::function<cplx(double)>& f, double a, double b, double tol) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto re = [&](double x) { return f(x).real(); };
  auto im = [&](double x) { return f(x).imag(); };
  return {ts.integrate(re, a, b, tol), ts.integrate(im, a, b, tol)};
}

cplx edge_weighted_pv(const std::function<cplx(double)>& f, double x0, double lo, double hi) {
  // F = f g with g = sqrt((x - lo)(hi - x)) is smooth; PV int 1/(g (x - x0)) = 0
  // inside the interval, so PV int f/(x - x0) = int (f - F(x0)/g)/(x - x0)
  const auto g = [&](double x) { return std::sqrt((x - lo) * (hi - x)); };
  const cplx F0 = f(x0) * g(x0);
  return chebyshev([&](double x) { return (f(x) - F0 / g(x)) / (x - x0); }, lo, hi, 2000);
}

cplx a_period(const gapflow::ThirdKindKernel& kernel, int l) {
  const auto& s = kernel.surface();
  const gapflow::Interval gap = s.gap(l);
  const auto density = [&](double x) {
    return kernel.density(gapflow::SurfacePoint::upper(cplx(x, 0.0)));
  };
  const auto in_gap = [&](const gapflow::SurfacePoint& p) {
    return p.z.imag() == 0.0 && p.z.real() > gap.lo && p.z.real() < gap.hi;
  };
  const gapflow::SurfacePoint p = kernel.pole();
  if (!in_gap(p) && !in_gap(kernel.second_pole())) {
    // the cycle runs along the gap on the upper sheet and back on the lower one
    return chebyshev(
        [&](double x) {
          return density(x) - kernel.density(gapflow::SurfacePoint::lower(cplx(x, 0.0)));
        },
        gap.lo, gap.hi);
  }
  if (!kernel.star_pair()) throw std::logic_error("a_period: two-pole kernel with a gap pole");
  // the upper sheet sees residue +1 (p there) or -1 (p* there)
  const double x0 = p.z.real();
  const double res = p.sheet == gapflow::Sheet::kUpper ? 1.0 : -1.0;
  const auto numerator = [&](double x) -> cplx { return x == x0 ? cplx(res) : density(x) * (x - x0); };
  return 2.0 * edge_weighted_pv(numerator, x0, gap.lo, gap.hi);
}

double holomorphic_a_period(const gapflow::HyperellipticSurface& s, const gapflow::PeriodData& pd,
                            int j, int k) {
  const gapflow::Interval gap = s.gap(j);
  return 2.0 * chebyshev(
                   [&](double x) {
                     return gapflow::holomorphic_density(
                         s, pd, k, gapflow::SurfacePoint::upper(cplx(x, 0.0)));
                   },
                   gap.lo, gap.hi)
                   .real();
}

double b_cycle_phase(const gapflow::ThirdKindKernel& kernel, int j) {
  const auto& s = kernel.surface();
  if (!kernel.star_pair() || kernel.pole().z.imag() != 0.0)
    throw std::logic_error("b_cycle_phase: needs a real-pole star-pair kernel");
  const double rho = kernel.pole().z.real();
  const double e0 = s.first_edge();
  const gapflow::Interval gap = s.gap(j);
  // cross gap j at the quarter point farthest from rho
  double right = gap.lo + 0.25 * gap.length();
  if (rho > gap.lo && rho < gap.hi && rho - gap.lo < gap.hi - rho) right = gap.hi - 0.25 * gap.length();
  const double len = s.last_edge() - e0;
  const double left = rho < e0 ? 0.5 * (rho + e0) : e0 - 0.25 * len;
  const double h = 0.5 * s.scale();
  const auto f = [&](cplx w) { return kernel.density(w, s.sqrt_P(gapflow::SurfacePoint::upper(w))); };
  const cplx c[4] = {cplx(left, -h), cplx(right, -h), cplx(right, h), cplx(left, h)};
  cplx total = 0.0;
  for (int i = 0; i < 4; ++i) total += segment(f, c[i], c[(i + 1) % 4]);
  const int enclosed = (rho > left && rho < right) ? 1 : 0;
  return -0.5 * (total.imag() - 2.0 * kPi * enclosed);
}

}  // namespace oracle
