#include "gapflow/reconstruct.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "gapflow/error.hpp"

namespace gapflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI(0.0, 1.0);

HyperellipticSurface surface_from_edges(const std::vector<double>& edges, const char* what) {
  if (edges.empty()) {
    std::ostringstream os;
    os << "scattering data: " << what << " is empty";
    throw DomainError(os.str());
  }
  return HyperellipticSurface(edges);
}

SpectralDecomposition decompose(const ScatteringData& d) {
  return decompose_spectra(BandSet::from_edges(d.sigma_minus_edges),
                           BandSet::from_edges(d.sigma_plus_edges));
}

std::string describe(Interval iv) {
  std::ostringstream os;
  os.precision(17);
  os << "[" << iv.lo << ", " << iv.hi << "]";
  return os.str();
}

template <class Sample, class Fn>
SampledFunction sample_piece(const std::vector<Sample>& samples, Interval iv, const char* what,
                             bool log_edges, Fn value) {
  std::vector<double> x, y;
  for (const auto& s : samples) {
    if (s.lambda < iv.lo || s.lambda > iv.hi) continue;
    if (!x.empty() && !(s.lambda > x.back()))
      throw DomainError(std::string("scattering data: ") + what + " abscissae must increase");
    x.push_back(s.lambda);
    y.push_back(value(s));
  }
  if (x.size() < 4)
    throw DomainError(std::string("scattering data: ") + what + " does not cover " +
                      describe(iv) + " (need at least 4 samples)");
  if (log_edges && iv.lo < x.front() && x.back() < iv.hi)
    return SampledFunction(std::move(x), std::move(y), iv);
  return SampledFunction(std::move(x), std::move(y));
}

double upper_distance_to_set(const BandSet& set, cplx z) {
  const double x = z.real(), y = std::abs(z.imag());
  if (set.contains(x, 0.0)) return y;
  double dx = std::numeric_limits<double>::infinity();
  for (const auto& iv : set.intervals())
    dx = std::min(dx, x < iv.lo ? iv.lo - x : x - iv.hi);
  return std::hypot(dx, y);
}

std::vector<double> compute_delta_table(const HyperellipticSurface& sm,
                                        const ReconstructionProblem::Factors& f) {
  std::vector<double> t(static_cast<std::size_t>(sm.genus()), 0.0);
  for (int l = 1; l <= sm.genus(); ++l) {
    double v = 0.0;
    for (const auto& b : f.mu_minus) v -= b.gap_phase(l);
    for (const auto& b : f.mu_plus) v += b.gap_phase(l);
    for (const auto& b : f.eigen) v += b.gap_phase(l);
    t[l - 1] = v;
  }
  return t;
}

cplx q_product(const std::vector<double>& edges, cplx z, BoundarySide side) {
  cplx v(1.0, 0.0);
  for (double e : edges) v *= shifted_sqrt(z, e, side);
  return v;
}

// The formula, with the 2 pi offsets of arg R_+ per sigma_+^(1) component
// passed explicitly.
Reconstruction evaluate(const ReconstructionProblem& pb, cplx z, const std::vector<int>& branches) {
  const auto& opt = pb.options();
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("reconstruct_T: z must be finite");
  if (upper_distance_to_set(pb.decomposition().sigma, z) < opt.min_distance) {
    std::ostringstream os;
    os.precision(17);
    os << "reconstruct_T: z = " << z << " is closer than " << opt.min_distance << " to sigma";
    throw DomainError(os.str());
  }
  const HyperellipticSurface& s = pb.sigma_surface();
  const ThirdKindKernel kernel(s, SurfacePoint::upper(z), opt.spec, &pb.sigma_periods());
  const std::vector<double>& qe = pb.q_edges();

  const double log_tinf = std::log(std::abs(pb.infinity_normalization()));
  const double arg_tinf = std::arg(pb.infinity_normalization());
  const auto& winding = pb.winding_factors();
  auto log_abs_phi = [&](double x) {
    double v = 0.0;
    for (const auto& w : winding) v += w.order * std::log(std::abs(x - w.c));
    return v;
  };
  auto arg_phi = [&](double x) {
    double v = 0.0;
    for (const auto& w : winding) v += x < w.c ? w.order * kPi : 0.0;
    return v;
  };
  const double delta_weight = opt.variant == DeltaVariant::kProof ? 2.0 : 1.0;

  auto band_integral = [&](const Interval& iv, const std::function<double(double)>& f) {
    const RealIntegrand g = [&](double x) -> cplx {
      const SurfacePoint p = SurfacePoint::upper(cplx(x, 0.0), BoundarySide::kAbove);
      return q_product(qe, cplx(x, 0.0), BoundarySide::kAbove) * f(x) *
             kernel.density(p.z, s.sqrt_P(p));
    };
    return integrate_endpoint_singular(g, iv, {true, true}, opt.spec);
  };

  cplx acc(0.0, 0.0);
  double err = 0.0;
  for (const auto& pc : pb.minus1_pieces()) {
    const auto r = band_integral(pc.iv, [&](double x) { return pc.f(x) - log_tinf + log_abs_phi(x); });
    acc += r.value / (kPi * kI);
    err += r.error / kPi;
  }
  for (const auto& pc : pb.sigma2_pieces()) {
    const auto r = band_integral(pc.iv, [&](double x) {
      const cplx ratio =
          1.0 / rho_ratio(pb.data(), SurfacePoint::upper(cplx(x, 0.0), BoundarySide::kAbove));
      if (!(ratio.real() > 0.0) || std::abs(ratio.imag()) > 1e-8 * std::abs(ratio)) {
        std::ostringstream os;
        os.precision(17);
        os << "reconstruct_T: rho_-/rho_+ = " << ratio << " at " << x
           << " is not a positive real";
        throw NumericalError(os.str());
      }
      return std::log(ratio.real()) + pc.f(x) - 2.0 * log_tinf + 2.0 * log_abs_phi(x);
    });
    acc += r.value / (2.0 * kPi * kI);
    err += r.error / (2.0 * kPi);
  }
  const auto& plus1 = pb.plus1_pieces();
  for (std::size_t i = 0; i < plus1.size(); ++i) {
    const auto& pc = plus1[i];
    const double shift = 2.0 * kPi * (i < branches.size() ? branches[i] : 0) - 2.0 * arg_tinf;
    const auto r = band_integral(pc.iv, [&](double x) {
      return pc.f(x) + shift + delta_weight * pb.delta_minus_at(x) + 2.0 * arg_phi(x);
    });
    acc += r.value / (2.0 * kPi);
    err += r.error / (2.0 * kPi);
  }

  const cplx qz = q_product(qe, z, BoundarySide::kNone);
  cplx value = std::exp(acc / qz);
  double rel_err = err / std::abs(qz);

  const SurfacePoint pz = SurfacePoint::upper(z);
  auto apply = [&](const std::vector<BlaschkeEvaluator>& list, bool divide) {
    for (const auto& b : list) {
      const QuadratureResult r = b.evaluate(pz);
      if (r.value == cplx(0.0, 0.0)) throw SingularEvaluation("reconstruct_T: z is a pole or zero");
      value = divide ? value / r.value : value * r.value;
      rel_err += r.error / std::abs(r.value);
    }
  };
  const auto& f = pb.blaschke_factors();
  apply(f.mu_minus, false);
  apply(f.mu_plus, true);
  apply(f.eigen, true);
  for (const auto& w : winding) value /= std::pow(z - w.c, w.order);
  value *= pb.infinity_normalization();
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw NumericalError("reconstruct_T: non-finite result");
  return {value, std::abs(value) * rel_err};
}

}  // namespace

SampledFunction::SampledFunction(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.size() < 4)
    throw DomainError("SampledFunction: need at least four (x, y) pairs");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw DomainError("SampledFunction: abscissae must increase");
  for (double v : y_)
    if (!std::isfinite(v)) throw DomainError("SampledFunction: non-finite sample value");
  r_ = y_;
  build_spline();
}

SampledFunction::SampledFunction(std::vector<double> x, std::vector<double> y, Interval support)
    : SampledFunction(std::move(x), std::move(y)) {
  if (!(support.lo < x_.front() && x_.back() < support.hi))
    throw DomainError("SampledFunction: samples must lie strictly inside the support");
  support_ = support;
  // Local slope in log distance at the outermost pair; exponents near a
  // multiple of 1/2 are snapped, since those are the only generic ones.
  auto exponent = [](double d0, double d1, double y0, double y1) {
    const double p = (y0 - y1) / (std::log(d0) - std::log(d1));
    const double snapped = 0.5 * std::round(2.0 * p);
    return std::abs(p - snapped) < 0.05 ? snapped : p;
  };
  const std::size_t n = x_.size();
  p_lo_ = exponent(x_[0] - support.lo, x_[1] - support.lo, y_[0], y_[1]);
  p_hi_ = exponent(support.hi - x_[n - 1], support.hi - x_[n - 2], y_[n - 1], y_[n - 2]);
  for (std::size_t i = 0; i < n; ++i) r_[i] = y_[i] - singular_part(x_[i]);
  build_spline();
}

double SampledFunction::singular_part(double t) const {
  if (!support_) return 0.0;
  constexpr double kFloor = 1e-300;
  const double dl = std::max(t - support_->lo, kFloor), dh = std::max(support_->hi - t, kFloor);
  return p_lo_ * std::log(dl) + p_hi_ * std::log(dh);
}

namespace {

// Derivative at x[i0 + k] of the cubic through the four points from i0.
double lagrange_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t i0,
                      std::size_t k) {
  const double t = x[i0 + k];
  double d = 0.0;
  for (std::size_t j = i0; j < i0 + 4; ++j) {
    double dl = 0.0;
    for (std::size_t m = i0; m < i0 + 4; ++m) {
      if (m == j) continue;
      double term = 1.0 / (x[j] - x[m]);
      for (std::size_t q = i0; q < i0 + 4; ++q)
        if (q != j && q != m) term *= (t - x[q]) / (x[j] - x[q]);
      dl += term;
    }
    d += dl * y[j];
  }
  return d;
}

}  // namespace

void SampledFunction::build_spline() {
  // Clamped cubic spline; second derivatives from the usual tridiagonal
  // system, end slopes from the four outermost samples.
  const std::size_t n = x_.size();
  const double s0 = lagrange_slope(x_, r_, 0, 0), sn = lagrange_slope(x_, r_, n - 4, 3);
  slope_lo_ = s0;
  slope_hi_ = sn;
  std::vector<double> diag(n), upper(n), rhs(n);
  const double h0 = x_[1] - x_[0], hn = x_[n - 1] - x_[n - 2];
  diag[0] = h0 / 3.0;
  upper[0] = h0 / 6.0;
  rhs[0] = (r_[1] - r_[0]) / h0 - s0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
    diag[i] = (hl + hr) / 3.0;
    upper[i] = hr / 6.0;
    rhs[i] = (r_[i + 1] - r_[i]) / hr - (r_[i] - r_[i - 1]) / hl;
  }
  diag[n - 1] = hn / 3.0;
  rhs[n - 1] = sn - (r_[n - 1] - r_[n - 2]) / hn;
  // Thomas algorithm; the lower diagonal equals the upper one shifted.
  for (std::size_t i = 1; i < n; ++i) {
    const double m = upper[i - 1] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  m2_.assign(n, 0.0);
  m2_[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) m2_[i] = (rhs[i] - upper[i] * m2_[i + 1]) / diag[i];
}

double SampledFunction::smooth(double t) const {
  // Linear continuation only next to a modelled edge; plain data are clamped.
  if (t <= x_.front()) return r_.front() + (support_ ? slope_lo_ * (t - x_.front()) : 0.0);
  if (t >= x_.back()) return r_.back() + (support_ ? slope_hi_ * (t - x_.back()) : 0.0);
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - t) / h, b = 1.0 - a;
  return a * r_[i] + b * r_[i + 1] +
         ((a * a * a - a) * m2_[i] + (b * b * b - b) * m2_[i + 1]) * h * h / 6.0;
}

double SampledFunction::operator()(double t) const { return smooth(t) + singular_part(t); }

ReconstructionProblem::ReconstructionProblem(ScatteringData data, ReconstructionOptions options)
    : data_(std::move(data)),
      options_(options),
      sigma_minus_(surface_from_edges(data_.sigma_minus_edges, "sigma_minus_edges")),
      sigma_plus_(surface_from_edges(data_.sigma_plus_edges, "sigma_plus_edges")),
      decomposition_(decompose(data_)),
      sigma_(decomposition_.sigma),
      periods_(compute_periods(sigma_, options_.spec)) {
  options_.spec.validate();
  if (static_cast<int>(data_.mu_minus.size()) != sigma_minus_.genus() ||
      static_cast<int>(data_.mu_plus.size()) != sigma_plus_.genus())
    throw DomainError("scattering data: need one Dirichlet value per gap of each background");
  if (data_.norming_plus.size() != data_.eigenvalues.size() && !data_.norming_plus.empty())
    throw DomainError("scattering data: norming_plus and eigenvalues differ in length");

  q_edges_ = decomposition_.sigma_plus1.edges();

  for (const auto& iv : decomposition_.sigma_minus1.intervals())
    minus1_.push_back({iv, sample_piece(data_.T_plus_sq, iv, "T_plus_sq", true, [](const ModulusSample& s) {
                         if (!(s.value > 0.0)) throw DomainError("scattering data: |T_+|^2 must be positive");
                         return 0.5 * std::log(s.value);
                       })});
  for (const auto& iv : decomposition_.sigma2.intervals())
    sigma2_.push_back({iv, sample_piece(data_.R_plus, iv, "R_plus", true, [](const ReflectionSample& s) {
                         const double r2 = std::norm(s.value);
                         if (!(r2 < 1.0))
                           throw DomainError("scattering data: |R_+| must be below 1 on sigma^(2)");
                         return std::log1p(-r2);
                       })});
  for (const auto& iv : decomposition_.sigma_plus1.intervals()) {
    // unwrap by continuity from the principal value at the left sample
    double prev = 0.0;
    bool first = true;
    auto unwrap = [&](const ReflectionSample& s) {
      double a = std::arg(s.value);
      if (!first) a += 2.0 * kPi * std::round((prev - a) / (2.0 * kPi));
      first = false;
      prev = a;
      return a;
    };
    plus1_.push_back({iv, sample_piece(data_.R_plus, iv, "R_plus", false, unwrap)});
  }
  arg_branches_.assign(plus1_.size(), 0);

  auto check_off_sigma = [&](double x, const char* what) {
    if (!std::isfinite(x) || decomposition_.sigma.contains(x)) {
      std::ostringstream os;
      os.precision(17);
      os << "scattering data: " << what << " value " << x << " lies on sigma";
      throw DomainError(os.str());
    }
  };
  for (double x : data_.M_minus) {
    check_off_sigma(x, "M_minus");
    factors_.mu_minus.emplace_back(sigma_minus_, x, options_.spec, options_.path_height_scale);
  }
  for (double x : data_.M_plus) {
    check_off_sigma(x, "M_plus");
    factors_.mu_plus.emplace_back(sigma_minus_, x, options_.spec, options_.path_height_scale);
  }
  for (double x : data_.eigenvalues) {
    check_off_sigma(x, "eigenvalue");
    factors_.eigen.emplace_back(sigma_minus_, x, options_.spec, options_.path_height_scale);
  }
  delta_table_ = compute_delta_table(sigma_minus_, factors_);

  {
    cplx t = options_.transmission_at_infinity;
    for (const auto& b : factors_.mu_minus) t /= b.at_infinity().value;
    for (const auto& b : factors_.mu_plus) t *= b.at_infinity().value;
    for (const auto& b : factors_.eigen) t *= b.at_infinity().value;
    if (t == cplx(0.0, 0.0) || !std::isfinite(std::abs(t)))
      throw DomainError("transmission_at_infinity gives a degenerate normalization");
    t_infinity_ = t;
  }

  arg_branches_.assign(plus1_.size(), 0);
  anchor_arg_branches();
  if (options_.select_arg_branch && !plus1_.empty()) choose_arg_branches();
  balance_windings();
}

double ReconstructionProblem::plus1_data(std::size_t i, double x) const {
  const double delta_weight = options_.variant == DeltaVariant::kProof ? 2.0 : 1.0;
  return plus1_[i].f(x) + 2.0 * kPi * arg_branches_[i] - 2.0 * std::arg(t_infinity_) +
         delta_weight * delta_minus_at(x);
}

namespace {

// 2 arg of (z - e)^alpha at a band edge, alpha = 0 or 1/2, read off modulo 2 pi.
double edge_exponent(double a) {
  return std::abs(std::remainder(a / (2.0 * kPi), 1.0)) > 0.25 ? 0.5 : 0.0;
}

}  // namespace

void ReconstructionProblem::anchor_arg_branches() {
  // The pole-free part is positive beyond the outermost edges and tends to 1
  // at infinity, so next to E_0 and E_last its doubled arg is fixed exactly.
  const auto& sigma = decomposition_.sigma;
  if (sigma.intervals().empty()) return;
  const double first = sigma[0].lo, last = sigma[sigma.size() - 1].hi;
  for (std::size_t i = 0; i < plus1_.size(); ++i) {
    const Interval iv = plus1_[i].iv;
    double at = 0.0, target = 0.0;
    if (iv.hi == last) {
      at = plus1_data(i, iv.hi);
      target = 2.0 * kPi * edge_exponent(at);
    } else if (iv.lo == first) {
      at = plus1_data(i, iv.lo);
      target = -2.0 * kPi * edge_exponent(at);
    } else {
      continue;
    }
    arg_branches_[i] = static_cast<int>(std::round((target - at) / (2.0 * kPi)));
    anchored_.push_back(i);
  }
}

void ReconstructionProblem::balance_windings() {
  winding_.clear();
  const auto& comps = decomposition_.sigma.intervals();
  // Around a component that lies in sigma_+^(1) the winding of the pole-free
  // part follows from its arg data; it is real in the adjacent gaps, so it
  // behaves like (z - e)^alpha at an edge e with alpha = 0 or 1/2.
  std::vector<std::optional<int>> wind(comps.size());
  for (std::size_t i = 0; i < plus1_.size(); ++i) {
    const Interval iv = plus1_[i].iv;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      if (comps[k].lo != iv.lo || comps[k].hi != iv.hi) continue;
      const double a_lo = plus1_data(i, iv.lo), a_hi = plus1_data(i, iv.hi);
      const double w = (a_lo - a_hi) / (2.0 * kPi) + edge_exponent(a_lo) + edge_exponent(a_hi);
      if (std::abs(w - std::round(w)) > 0.2) {
        std::ostringstream os;
        os << "reconstruction: arg data on " << describe(iv) << " give a non-integer winding " << w;
        throw NumericalError(os.str());
      }
      wind[k] = static_cast<int>(std::round(w));
    }
  }
  int total = 0;
  std::vector<std::size_t> open;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    if (wind[k]) {
      total += *wind[k];
      if (*wind[k] != 0) winding_.push_back({comps[k].lo, -*wind[k]});
    } else {
      open.push_back(k);
    }
  }
  if (total == 0) return;
  // the windings add up to zero; the rest sits on the one component whose
  // arg is not known
  if (open.size() != 1)
    throw DomainError("reconstruction: cannot place the winding of the pole-free part");
  winding_.push_back({comps[open.front()].lo, total});
}

double ReconstructionProblem::delta_minus_at(double lambda) const {
  for (int l = 1; l <= sigma_minus_.genus(); ++l) {
    const Interval g = sigma_minus_.gap(l);
    if (lambda >= g.lo && lambda <= g.hi) return delta_table_[l - 1];
  }
  return 0.0;
}

void ReconstructionProblem::choose_arg_branches() {
  // T_+ stays bounded at the edges of sigma_+^(1); a wrong 2 pi multiple
  // makes it blow up like a power of the distance on one side.
  std::vector<int> branches = arg_branches_;
  for (std::size_t i = 0; i < plus1_.size(); ++i) {
    if (std::find(anchored_.begin(), anchored_.end(), i) != anchored_.end()) continue;
    const Interval iv = plus1_[i].iv;
    const double d1 = 1e-3 * iv.length(), d2 = 1e-2 * iv.length();
    double best_score = -std::numeric_limits<double>::infinity();
    const int k0 = branches[i];
    int best_k = k0;
    for (int k : {k0, k0 - 1, k0 + 1}) {
      branches[i] = k;
      double score = std::numeric_limits<double>::infinity();
      try {
        for (double e : {iv.lo, iv.hi}) {
          const double t1 = std::abs(evaluate(*this, cplx(e, d1), branches).value);
          const double t2 = std::abs(evaluate(*this, cplx(e, d2), branches).value);
          score = std::min(score, std::log(t2 / t1) / std::log(d2 / d1));
        }
      } catch (const Error&) {
        score = -std::numeric_limits<double>::infinity();
      }
      // the unwrapped branch wins ties
      if (score > best_score + 0.25) {
        best_score = score;
        best_k = k;
      }
    }
    branches[i] = best_k;
  }
  arg_branches_ = branches;
}

cplx q_eval(const ReconstructionProblem& problem, cplx z, BoundarySide side) {
  return q_product(problem.q_edges(), z, side);
}

std::vector<double> delta_minus_table(const ReconstructionProblem& problem) {
  return compute_delta_table(problem.sigma_minus_surface(), problem.blaschke_factors());
}

Reconstruction reconstruct_T(const ReconstructionProblem& problem, cplx z) {
  return evaluate(problem, z, problem.arg_branches());
}

std::vector<GridPoint> reconstruct_on_grid(const ReconstructionProblem& problem,
                                           std::span<const cplx> grid, unsigned threads) {
  std::vector<GridPoint> out(grid.size());
  if (grid.empty()) return out;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      GridPoint& g = out[i];
      g.z = grid[i];
      try {
        const Reconstruction r = reconstruct_T(problem, grid[i]);
        g.T = r.value;
        g.err_est = r.err_est;
        g.ok = true;
      } catch (const std::exception& e) {
        g.T = cplx(std::nan(""), std::nan(""));
        g.err_est = std::nan("");
        g.message = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace gapflow
