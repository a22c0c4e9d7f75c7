#include "gapflow/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "gapflow/error.hpp"

namespace gapflow {

namespace {

constexpr double kMaxAbsZ = 1e100;
constexpr double kFlagT = 1e-12;

void check_background(const Background& bg, const char* which) {
  if (!(bg.a > 0.0) || !std::isfinite(bg.a) || !std::isfinite(bg.b)) {
    std::ostringstream os;
    os << which << " background needs a > 0 and finite b";
    throw DomainError(os.str());
  }
}

void check_z(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kMaxAbsZ)
    throw DomainError("spectral parameter is not finite or too large for the recurrence");
}

}  // namespace

SteplikeOperator::SteplikeOperator(Background left, Background right,
                                   std::vector<PerturbationEntry> table)
    : left_(left), right_(right) {
  check_background(left_, "left");
  check_background(right_, "right");
  std::map<long, PerturbationEntry> merged;
  for (const auto& e : table) {
    if (e.a && (!(*e.a > 0.0) || !std::isfinite(*e.a))) {
      std::ostringstream os;
      os << "perturbation at n = " << e.n << ": a(n) must be positive";
      throw DomainError(os.str());
    }
    if (e.b && !std::isfinite(*e.b)) {
      std::ostringstream os;
      os << "perturbation at n = " << e.n << ": b(n) must be finite";
      throw DomainError(os.str());
    }
    if (merged.count(e.n)) {
      std::ostringstream os;
      os << "perturbation: site n = " << e.n << " listed twice";
      throw DomainError(os.str());
    }
    merged[e.n] = e;
  }
  for (const auto& [n, e] : merged) {
    table_.push_back(e);
    n_lo_ = std::min(n_lo_, n);
    n_hi_ = std::max(n_hi_, n);
  }
}

double SteplikeOperator::a(long n) const {
  for (const auto& e : table_)
    if (e.n == n && e.a) return *e.a;
  return n < 0 ? left_.a : right_.a;
}

double SteplikeOperator::b(long n) const {
  for (const auto& e : table_)
    if (e.n == n && e.b) return *e.b;
  return n < 0 ? left_.b : right_.b;
}

Interval SteplikeOperator::gershgorin() const {
  double lo = std::min(left_.band().lo, right_.band().lo);
  double hi = std::max(left_.band().hi, right_.band().hi);
  for (long n = n_lo_ - 1; n <= n_hi_ + 1; ++n) {
    const double r = a(n - 1) + a(n);
    lo = std::min(lo, b(n) - r);
    hi = std::max(hi, b(n) + r);
  }
  return {lo, hi};
}

double transmission_at_infinity(const SteplikeOperator& op) {
  double t = 1.0;
  for (const PerturbationEntry& e : op.perturbation())
    if (e.a) t *= *e.a / op.background(e.n < 0 ? Side::kMinus : Side::kPlus).a;
  return t;
}

cplx floquet_multiplier(const Background& bg, cplx z, BoundarySide side) {
  check_background(bg, "floquet");
  check_z(z);
  const cplx s = (z - bg.b) / (2.0 * bg.a);
  cplx w;
  if (s.imag() == 0.0) {
    // the boundary value on the band; off the band both roots are real
    w = s - shifted_sqrt(s, 1.0, side) * shifted_sqrt(s, -1.0, side);
  } else {
    w = s - std::sqrt(s - 1.0) * std::sqrt(s + 1.0);
  }
  return w;
}

cplx floquet(const Background& bg, cplx z, long n, Side side, BoundarySide boundary) {
  const cplx w = floquet_multiplier(bg, z, boundary);
  const long k = side == Side::kPlus ? n : -n;
  if (k >= 0) return std::pow(w, static_cast<double>(k));
  return std::pow(1.0 / w, static_cast<double>(-k));
}

cplx JostSolution::operator()(long n) const {
  if (n < lo() || n > hi()) {
    std::ostringstream os;
    os << "JostSolution: site " << n << " outside [" << lo() << ", " << hi() << "]";
    throw DomainError(os.str());
  }
  return values_[static_cast<std::size_t>(n - lo_)];
}

JostSolution JostSolution::conj() const {
  std::vector<cplx> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), [](cplx x) { return std::conj(x); });
  return JostSolution(lo_, std::move(v));
}

JostSolution jost_solution(const SteplikeOperator& op, cplx z, Side side, long lo, long hi,
                           BoundarySide boundary) {
  if (hi < lo) throw DomainError("jost_solution: empty site range");
  const Background& bg = op.background(side);
  const cplx w = floquet_multiplier(bg, z, boundary);
  if (side == Side::kPlus) {
    const long top = std::max(hi + 1, op.window_hi() + 2);
    const long bottom = std::min(lo, op.window_hi() + 1);
    std::vector<cplx> v(static_cast<std::size_t>(top - bottom + 1));
    auto at = [&](long n) -> cplx& { return v[static_cast<std::size_t>(n - bottom)]; };
    for (long n = std::max(bottom, op.window_hi() + 1); n <= top; ++n)
      at(n) = std::pow(w, static_cast<double>(n));
    for (long n = op.window_hi() + 1; n > bottom; --n)
      at(n - 1) = ((z - op.b(n)) * at(n) - op.a(n) * at(n + 1)) / op.a(n - 1);
    std::vector<cplx> out(v.begin() + (lo - bottom), v.begin() + (hi - bottom + 1));
    return JostSolution(lo, std::move(out));
  }
  const long bottom = std::min(lo - 1, op.window_lo() - 2);
  const long top = std::max(hi, op.window_lo() - 1);
  std::vector<cplx> v(static_cast<std::size_t>(top - bottom + 1));
  auto at = [&](long n) -> cplx& { return v[static_cast<std::size_t>(n - bottom)]; };
  for (long n = bottom; n <= std::min(top, op.window_lo() - 1); ++n)
    at(n) = std::pow(1.0 / w, static_cast<double>(n));
  for (long n = op.window_lo() - 1; n < top; ++n)
    at(n + 1) = ((z - op.b(n)) * at(n) - op.a(n - 1) * at(n - 1)) / op.a(n);
  std::vector<cplx> out(v.begin() + (lo - bottom), v.begin() + (hi - bottom + 1));
  return JostSolution(lo, std::move(out));
}

cplx jost(const SteplikeOperator& op, cplx z, long n, Side side, BoundarySide boundary) {
  return jost_solution(op, z, side, n, n, boundary)(n);
}

cplx wronskian(const SteplikeOperator& op, const JostSolution& f, const JostSolution& g, long n) {
  return op.a(n) * (f(n) * g(n + 1) - f(n + 1) * g(n));
}

WronskianCheck wronskian_checked(const SteplikeOperator& op, const JostSolution& f,
                                 const JostSolution& g) {
  const long lo = std::max(f.lo(), g.lo());
  const long hi = std::min(f.hi(), g.hi()) - 1;
  if (hi < lo) throw DomainError("wronskian_checked: solutions share fewer than two sites");
  const long n0 = (lo <= 0 && 0 <= hi) ? 0 : lo;
  const cplx w0 = wronskian(op, f, g, n0);
  double var = 0.0, terms = 0.0;
  for (long n = lo; n <= hi; ++n) {
    var = std::max(var, std::abs(wronskian(op, f, g, n) - w0));
    terms = std::max(terms, op.a(n) * (std::abs(f(n) * g(n + 1)) + std::abs(f(n + 1) * g(n))));
  }
  const double ref = std::max(std::abs(w0), terms);
  return {w0, var, var <= 1e-8 * ref};
}

namespace {

struct JostPair {
  JostSolution plus;
  JostSolution minus;
};

JostPair jost_pair(const SteplikeOperator& op, cplx z, BoundarySide boundary) {
  const long lo = op.window_lo() - 2, hi = op.window_hi() + 2;
  return {jost_solution(op, z, Side::kPlus, lo, hi, boundary),
          jost_solution(op, z, Side::kMinus, lo, hi, boundary)};
}

// a (1/w - w): the continuation of W(psi, conj psi) for the right solution.
cplx floquet_wronskian(const Background& bg, cplx z, BoundarySide boundary) {
  const cplx w = floquet_multiplier(bg, z, boundary);
  return bg.a * (1.0 / w - w);
}

void check_real_on(const BandSet& set, double lambda, const char* what) {
  if (!set.contains_interior(lambda, 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": lambda = " << lambda << " is not inside the band";
    throw DomainError(os.str());
  }
}

}  // namespace

cplx jost_wronskian(const SteplikeOperator& op, cplx z, BoundarySide boundary) {
  const JostPair p = jost_pair(op, z, boundary);
  return wronskian(op, p.minus, p.plus, 0);
}

cplx transmission_plus(const SteplikeOperator& op, cplx z, BoundarySide boundary) {
  const JostPair p = jost_pair(op, z, boundary);
  const cplx w = wronskian(op, p.plus, p.minus, 0);
  if (w == cplx(0.0, 0.0)) throw SingularEvaluation("transmission_plus: pole (eigenvalue)");
  return floquet_wronskian(op.right(), z, boundary) / w;
}

cplx transmission_minus(const SteplikeOperator& op, cplx z, BoundarySide boundary) {
  const JostPair p = jost_pair(op, z, boundary);
  const cplx w = wronskian(op, p.plus, p.minus, 0);
  if (w == cplx(0.0, 0.0)) throw SingularEvaluation("transmission_minus: pole (eigenvalue)");
  return floquet_wronskian(op.left(), z, boundary) / w;
}

cplx reflection_plus(const SteplikeOperator& op, double lambda) {
  check_real_on(op.sigma_plus(), lambda, "reflection_plus");
  const JostPair p = jost_pair(op, cplx(lambda, 0.0), BoundarySide::kAbove);
  const JostSolution pc = p.plus.conj();
  const cplx wpc = wronskian(op, p.plus, pc, 0);
  const cplx T = wpc / wronskian(op, p.plus, p.minus, 0);
  return -T * wronskian(op, pc, p.minus, 0) / wpc;
}

cplx reflection_minus(const SteplikeOperator& op, double lambda) {
  check_real_on(op.sigma_minus(), lambda, "reflection_minus");
  const JostPair p = jost_pair(op, cplx(lambda, 0.0), BoundarySide::kAbove);
  const JostSolution mc = p.minus.conj();
  const cplx wmc = wronskian(op, p.minus, mc, 0);
  const cplx T = wmc / wronskian(op, p.minus, p.plus, 0);
  return -T * wronskian(op, mc, p.plus, 0) / wmc;
}

void ScatteringGrids::validate() const {
  if (samples_per_band < 8) throw DomainError("grids: samples_per_band must be >= 8");
  if (!(edge_margin > 0.0)) throw DomainError("grids: edge_margin must be positive");
  if (scan_points < 10) throw DomainError("grids: scan_points must be >= 10");
  if (!(eigen_tol > 0.0)) throw DomainError("grids: eigen_tol must be positive");
}

std::vector<double> band_samples(Interval iv, const ScatteringGrids& grids) {
  grids.validate();
  const double lo = iv.lo + grids.edge_margin, hi = iv.hi - grids.edge_margin;
  if (!(hi > lo)) {
    std::ostringstream os;
    os << "band_samples: interval [" << iv.lo << ", " << iv.hi
       << "] is shorter than twice the edge margin";
    throw DomainError(os.str());
  }
  const int n = grids.samples_per_band;
  std::vector<double> x(n);
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  for (int k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / (n - 1);
    x[k] = grids.chebyshev ? c - h * std::cos(std::numbers::pi * t) : lo + t * (hi - lo);
  }
  x.front() = lo;
  x.back() = hi;
  return x;
}

std::vector<double> find_eigenvalues(const SteplikeOperator& op, const ScatteringGrids& grids) {
  grids.validate();
  const BandSet sm = op.sigma_minus(), sp = op.sigma_plus();
  const SpectralDecomposition dec = decompose_spectra(sm, sp);
  const double spread = 5.0 * (op.left().a + op.right().a);
  const Interval gb = op.gershgorin();
  const double lo = std::min(dec.sigma[0].lo - spread, gb.lo - 1e-3 * spread);
  const double hi = std::max(dec.sigma[dec.sigma.size() - 1].hi + spread, gb.hi + 1e-3 * spread);

  auto W = [&](double x) -> double {
    const cplx w = jost_wronskian(op, cplx(x, 0.0));
    if (std::abs(w.imag()) > 1e-8 * std::max(1.0, std::abs(w))) {
      std::ostringstream os;
      os.precision(17);
      os << "find_eigenvalues: W(psi_-, psi_+) not real at " << x << " (" << w << ")";
      throw NumericalError(os.str());
    }
    return w.real();
  };

  // complement of sigma inside [lo, hi]
  std::vector<Interval> gaps;
  double cur = lo;
  for (const auto& band : dec.sigma.intervals()) {
    gaps.push_back({cur, band.lo - grids.edge_margin});
    cur = band.hi + grids.edge_margin;
  }
  gaps.push_back({cur, hi});
  gaps.front().lo = lo;

  const double step = (hi - lo) / grids.scan_points;
  for (double end : {lo, hi}) {
    if (std::abs(W(end)) < 1e-12) throw NumericalError("find_eigenvalues: eigenvalue at the scan boundary");
  }

  std::vector<double> roots;
  for (const auto& g : gaps) {
    if (!(g.hi > g.lo)) continue;
    std::vector<double> xs{g.lo};
    for (double x = lo + step * std::ceil((g.lo - lo) / step); x < g.hi; x += step)
      if (x > g.lo) xs.push_back(x);
    xs.push_back(g.hi);
    double xa = xs[0], fa = W(xa);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double xb = xs[i], fb = W(xb);
      if (fa == 0.0) {
        roots.push_back(xa);
      } else if (fa * fb < 0.0) {
        double a = xa, b = xb, fl = fa;
        while (b - a > grids.eigen_tol * std::max(1.0, std::abs(a))) {
          const double m = 0.5 * (a + b);
          if (m <= a || m >= b) break;
          const double fm = W(m);
          if (fm == 0.0) {
            a = b = m;
            break;
          }
          if ((fm < 0.0) == (fl < 0.0)) {
            a = m;
            fl = fm;
          } else {
            b = m;
          }
        }
        roots.push_back(0.5 * (a + b));
      }
      xa = xb;
      fa = fb;
    }
    if (fa == 0.0 && xa == g.hi) roots.push_back(xa);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

double norming_constant(const SteplikeOperator& op, double lambda, Side side) {
  const cplx z(lambda, 0.0);
  const long lo = op.window_lo() - 1, hi = op.window_hi() + 1;
  const JostSolution psi = jost_solution(op, z, side, lo, hi);
  const double wl = std::abs(floquet_multiplier(op.left(), z));
  const double wr = std::abs(floquet_multiplier(op.right(), z));
  if (!(wl < 1.0) || !(wr < 1.0))
    throw DomainError("norming_constant: lambda must lie off the essential spectrum");
  double sum = 0.0;
  for (long n = lo + 1; n <= hi - 1; ++n) sum += std::norm(psi(n));
  // beyond the window the eigenfunction is a multiple of the decaying
  // Floquet solution on either side
  sum += std::norm(psi(lo)) / (1.0 - wl * wl);
  sum += std::norm(psi(hi)) / (1.0 - wr * wr);
  return 1.0 / sum;
}

ScatteringData scattering_data(const SteplikeOperator& op, const ScatteringGrids& grids) {
  grids.validate();
  ScatteringData d;
  d.sigma_minus_edges = op.sigma_minus().edges();
  d.sigma_plus_edges = op.sigma_plus().edges();
  const SpectralDecomposition dec = decompose_spectra(op.sigma_minus(), op.sigma_plus());

  std::vector<Interval> plus_pieces = dec.sigma2.intervals();
  for (const auto& iv : dec.sigma_plus1.intervals()) plus_pieces.push_back(iv);
  std::sort(plus_pieces.begin(), plus_pieces.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& iv : plus_pieces)
    for (double x : band_samples(iv, grids)) d.R_plus.push_back({x, reflection_plus(op, x)});

  for (const auto& iv : dec.sigma_minus1.intervals())
    for (double x : band_samples(iv, grids))
      d.T_plus_sq.push_back({x, std::norm(transmission_plus(op, cplx(x, 0.0), BoundarySide::kAbove))});

  d.eigenvalues = find_eigenvalues(op, grids);
  for (double l : d.eigenvalues) d.norming_plus.push_back(norming_constant(op, l, Side::kPlus));
  return d;
}

cplx rho_ratio(const ScatteringData& data, const SurfacePoint& p) {
  const HyperellipticSurface sm(data.sigma_minus_edges), sp(data.sigma_plus_edges);
  const SurfacePoint q = SurfacePoint::upper(p.z, p.side);
  return rho(sp, data.mu_plus, q) / rho(sm, data.mu_minus, q);
}

std::vector<TranslatedSample> translate_data(const ScatteringData& data,
                                             const std::function<cplx(double)>& t_plus) {
  const BandSet sm = BandSet::from_edges(data.sigma_minus_edges);
  const BandSet sp = BandSet::from_edges(data.sigma_plus_edges);
  const SpectralDecomposition dec = decompose_spectra(sm, sp);
  std::vector<TranslatedSample> out;
  for (const auto& s : data.R_plus) {
    if (!dec.sigma2.contains(s.lambda, 0.0)) continue;
    const cplx T = t_plus(s.lambda);
    const cplx ratio = rho_ratio(data, SurfacePoint::upper(cplx(s.lambda, 0.0), BoundarySide::kAbove));
    TranslatedSample t{s.lambda, true, ratio * T, cplx(0.0, 0.0), std::abs(T) < kFlagT};
    if (!t.flagged) t.R_minus = -std::conj(s.value) * T / std::conj(T);
    out.push_back(t);
  }
  for (const auto& s : data.T_plus_sq) {
    const cplx T = t_plus(s.lambda);
    const cplx ratio = rho_ratio(data, SurfacePoint::upper(cplx(s.lambda, 0.0), BoundarySide::kAbove));
    TranslatedSample t{s.lambda, false, ratio * T, cplx(0.0, 0.0), std::abs(T) < kFlagT};
    if (!t.flagged) t.R_minus = t.T_minus / std::conj(t.T_minus);
    out.push_back(t);
  }
  std::sort(out.begin(), out.end(),
            [](const TranslatedSample& a, const TranslatedSample& b) { return a.lambda < b.lambda; });
  return out;
}

}  // namespace gapflow
