#include "gapflow/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gapflow/error.hpp"

namespace gapflow {

namespace {

void check_increasing(std::span<const double> edges, const char* what) {
  if (edges.size() % 2 != 0) {
    std::ostringstream os;
    os << what << ": edge list must have even length, got " << edges.size();
    throw DomainError(os.str());
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i])) throw DomainError(std::string(what) + ": non-finite edge");
    if (i > 0 && !(edges[i - 1] < edges[i])) {
      std::ostringstream os;
      os << what << ": edges must be strictly increasing (" << edges[i - 1] << " >= " << edges[i]
         << ")";
      throw DomainError(os.str());
    }
  }
}

// Drops zero-length pieces and merges touching neighbours.
std::vector<Interval> normalize(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!(iv.hi > iv.lo)) continue;
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

std::vector<Interval> intersect(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::vector<Interval> out;
  for (const auto& x : a)
    for (const auto& y : b) {
      const double lo = std::max(x.lo, y.lo);
      const double hi = std::min(x.hi, y.hi);
      if (hi > lo) out.push_back({lo, hi});
    }
  return normalize(std::move(out));
}

std::vector<Interval> subtract(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::vector<Interval> out;
  for (const auto& x : a) {
    std::vector<Interval> pieces{x};
    for (const auto& y : b) {
      std::vector<Interval> next;
      for (const auto& p : pieces) {
        if (y.hi <= p.lo || y.lo >= p.hi) {
          next.push_back(p);
          continue;
        }
        if (y.lo > p.lo) next.push_back({p.lo, y.lo});
        if (y.hi < p.hi) next.push_back({y.hi, p.hi});
      }
      pieces = std::move(next);
    }
    out.insert(out.end(), pieces.begin(), pieces.end());
  }
  return normalize(std::move(out));
}

}  // namespace

BandSet::BandSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw DomainError("BandSet: each interval needs lo < hi");
    if (i > 0 && !(intervals_[i - 1].hi < iv.lo))
      throw DomainError("BandSet: intervals must be increasing and pairwise disjoint");
  }
}

BandSet BandSet::from_edges(std::span<const double> edges) {
  check_increasing(edges, "BandSet");
  std::vector<Interval> v;
  for (std::size_t i = 0; i + 1 < edges.size(); i += 2) v.push_back({edges[i], edges[i + 1]});
  return BandSet(std::move(v));
}

std::vector<double> BandSet::edges() const {
  std::vector<double> e;
  e.reserve(2 * intervals_.size());
  for (const auto& iv : intervals_) {
    e.push_back(iv.lo);
    e.push_back(iv.hi);
  }
  return e;
}

bool BandSet::contains(double x, double tol) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [&](const Interval& iv) { return x >= iv.lo - tol && x <= iv.hi + tol; });
}

bool BandSet::contains_interior(double x, double tol) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [&](const Interval& iv) { return x > iv.lo + tol && x < iv.hi - tol; });
}

double BandSet::distance_to_edge(double x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& iv : intervals_) d = std::min({d, std::abs(x - iv.lo), std::abs(x - iv.hi)});
  return d;
}

double BandSet::measure() const {
  double m = 0.0;
  for (const auto& iv : intervals_) m += iv.length();
  return m;
}

HyperellipticSurface::HyperellipticSurface(std::vector<double> edges) : edges_(std::move(edges)) {
  check_increasing(edges_, "HyperellipticSurface");
  if (edges_.empty()) throw DomainError("HyperellipticSurface: need at least one band");
}

HyperellipticSurface::HyperellipticSurface(const BandSet& bands)
    : HyperellipticSurface(bands.edges()) {}

BandSet HyperellipticSurface::bands() const { return BandSet::from_edges(edges_); }

std::vector<Interval> HyperellipticSurface::gaps() const {
  std::vector<Interval> g;
  for (int j = 1; j <= genus(); ++j) g.push_back(gap(j));
  return g;
}

Interval HyperellipticSurface::gap(int j) const {
  if (j < 1 || j > genus()) throw DomainError("HyperellipticSurface::gap: index out of range");
  return {edges_[2 * j - 1], edges_[2 * j]};
}

double HyperellipticSurface::min_gap() const {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= genus(); ++j) m = std::min(m, gap(j).length());
  return m;
}

double HyperellipticSurface::scale() const {
  double s = last_edge() - first_edge();
  if (genus() > 0) s = std::min(s, min_gap());
  return s;
}

bool HyperellipticSurface::on_bands(double x, double tol) const {
  for (std::size_t i = 0; i + 1 < edges_.size(); i += 2)
    if (x >= edges_[i] - tol && x <= edges_[i + 1] + tol) return true;
  return false;
}

bool HyperellipticSurface::near_branch_point(double x, double tol) const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [&](double e) { return std::abs(x - e) <= tol; });
}

cplx shifted_sqrt(cplx z, double e, BoundarySide side) {
  if (z.imag() == 0.0) {
    const double d = z.real() - e;
    if (d >= 0.0) return {std::sqrt(d), 0.0};
    const double r = std::sqrt(-d);
    return side == BoundarySide::kBelow ? cplx(0.0, -r) : cplx(0.0, r);
  }
  return std::sqrt(z - e);
}

cplx HyperellipticSurface::sqrt_P(const SurfacePoint& p) const {
  cplx v(-1.0, 0.0);
  for (double e : edges_) v *= shifted_sqrt(p.z, e, p.side);
  return p.sheet == Sheet::kUpper ? v : -v;
}

cplx HyperellipticSurface::poly(cplx z) const {
  cplx v(1.0, 0.0);
  for (double e : edges_) v *= (z - e);
  return v;
}

SpectralDecomposition decompose_spectra(const BandSet& sigma_minus, const BandSet& sigma_plus,
                                        double tol) {
  for (double a : sigma_minus.edges())
    for (double b : sigma_plus.edges()) {
      const double d = std::abs(a - b);
      if (d > 0.0 && d <= tol) {
        std::ostringstream os;
        os.precision(17);
        os << "decompose_spectra: edges " << a << " and " << b
           << " coincide within tolerance but are not equal";
        throw DomainError(os.str());
      }
    }
  const auto& m = sigma_minus.intervals();
  const auto& p = sigma_plus.intervals();
  std::vector<Interval> all(m);
  all.insert(all.end(), p.begin(), p.end());

  SpectralDecomposition out;
  out.sigma = BandSet(normalize(std::move(all)));
  out.sigma2 = BandSet(intersect(m, p));
  out.sigma_minus1 = BandSet(subtract(m, out.sigma2.intervals()));
  out.sigma_plus1 = BandSet(subtract(p, out.sigma2.intervals()));
  return out;
}

cplx rho(const HyperellipticSurface& background, std::span<const double> mu,
         const SurfacePoint& p) {
  if (static_cast<int>(mu.size()) != background.genus())
    throw DomainError("rho: need exactly one Dirichlet value per gap");
  const cplx root = background.sqrt_P(SurfacePoint::upper(p.z, p.side));
  if (root == cplx(0.0, 0.0)) throw SingularEvaluation("rho: evaluation at a band edge");
  cplx num(1.0, 0.0);
  for (double m : mu) num *= (p.z - m);
  return num / root;
}

}  // namespace gapflow
