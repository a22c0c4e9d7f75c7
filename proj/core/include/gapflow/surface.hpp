#pragma once

// Band sets, the two-sheeted surface of the square root of
//   P(z) = prod_j (z - E_j),   E_0 < E_1 < ... < E_{2g+1},
// and the fixed branch R(z) = -prod_j sqrt(z - E_j) (principal roots).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gapflow {

using cplx = std::complex<double>;

/// Absolute tolerance for band membership and edge coincidence.
inline constexpr double kBandTolerance = 1e-12;

enum class Sheet { kUpper, kLower };

/// Which boundary limit is meant for a real point lying on a band.
enum class BoundarySide { kNone, kAbove, kBelow };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A point (z, +/-) on the surface. `side` only matters for real z on a band;
/// `kNone` is read as "from above" there.
struct SurfacePoint {
  cplx z;
  Sheet sheet = Sheet::kUpper;
  BoundarySide side = BoundarySide::kNone;

  static SurfacePoint upper(cplx z, BoundarySide side = BoundarySide::kNone) {
    return {z, Sheet::kUpper, side};
  }
  static SurfacePoint lower(cplx z, BoundarySide side = BoundarySide::kNone) {
    return {z, Sheet::kLower, side};
  }

  /// Sheet involution; keeps the projection and the boundary side.
  SurfacePoint star() const {
    return {z, sheet == Sheet::kUpper ? Sheet::kLower : Sheet::kUpper, side};
  }
};

/// Ordered, pairwise disjoint union of closed intervals.
class BandSet {
 public:
  BandSet() = default;
  explicit BandSet(std::vector<Interval> intervals);

  /// Builds from an even-length, strictly increasing edge list.
  static BandSet from_edges(std::span<const double> edges);

  const std::vector<Interval>& intervals() const { return intervals_; }
  std::vector<double> edges() const;
  std::size_t size() const { return intervals_.size(); }
  bool empty() const { return intervals_.empty(); }
  const Interval& operator[](std::size_t i) const { return intervals_[i]; }

  bool contains(double x, double tol = kBandTolerance) const;
  /// True when x lies strictly inside some interval (by more than tol).
  bool contains_interior(double x, double tol = kBandTolerance) const;
  /// Distance from x to the nearest edge.
  double distance_to_edge(double x) const;
  double measure() const;

  friend bool operator==(const BandSet&, const BandSet&) = default;

 private:
  std::vector<Interval> intervals_;
};

/// The hyperelliptic surface attached to a band set with g+1 bands.
class HyperellipticSurface {
 public:
  explicit HyperellipticSurface(std::vector<double> edges);
  explicit HyperellipticSurface(const BandSet& bands);

  int genus() const { return static_cast<int>(edges_.size()) / 2 - 1; }
  std::span<const double> edges() const { return edges_; }
  double edge(std::size_t j) const { return edges_[j]; }
  double first_edge() const { return edges_.front(); }
  double last_edge() const { return edges_.back(); }

  BandSet bands() const;
  /// The g finite gaps (E_{2j-1}, E_{2j}), j = 1..g, in order.
  std::vector<Interval> gaps() const;
  /// Finite gap j, 1-based.
  Interval gap(int j) const;
  double min_gap() const;
  /// Characteristic length used for path heights and offsets.
  double scale() const;

  bool on_bands(double x, double tol = kBandTolerance) const;
  /// True when x is within tol of some E_j.
  bool near_branch_point(double x, double tol) const;

  /// Branch-consistent value of the square root at p.
  cplx sqrt_P(const SurfacePoint& p) const;
  /// Upper-sheet value; real z on a band is taken from above.
  cplx sqrt_P(cplx z) const { return sqrt_P(SurfacePoint::upper(z)); }
  /// P(z) itself.
  cplx poly(cplx z) const;

 private:
  std::vector<double> edges_;
};

/// Principal sqrt(z - e); for real z < e the limit from `side`
/// (kNone counts as above).
cplx shifted_sqrt(cplx z, double e, BoundarySide side);

struct SpectralDecomposition {
  BandSet sigma;         // union
  BandSet sigma2;        // overlap, multiplicity two
  BandSet sigma_minus1;  // closure of sigma_- minus the overlap
  BandSet sigma_plus1;   // closure of sigma_+ minus the overlap
};

/// Splits the spectrum of a steplike operator into its multiplicity parts.
/// Distinct edges closer than `tol` make the split ill-conditioned and throw.
SpectralDecomposition decompose_spectra(const BandSet& sigma_minus,
                                        const BandSet& sigma_plus,
                                        double tol = kBandTolerance);

/// rho(z) = prod_j (z - mu_j) / R(z) on the upper sheet of a background
/// surface, one Dirichlet value per gap.
cplx rho(const HyperellipticSurface& background, std::span<const double> mu,
         const SurfacePoint& p);

}  // namespace gapflow
