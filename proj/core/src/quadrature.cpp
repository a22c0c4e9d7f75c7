#include "gapflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "gapflow/error.hpp"

namespace gapflow {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw DomainError("QuadratureSpec: tolerances must be positive");
  if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
  if (base_nodes < 2 || base_nodes > 512)
    throw DomainError("QuadratureSpec: base_nodes must lie in [2, 512]");
}

namespace {

GaussRule build_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      // one more evaluation at the converged node for the weight
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

// One smooth piece of the problem: integrate g over [t0, t1]. Panels
// [t0, t] with t - t0 below `resolution` are not refined further.
struct Piece {
  RealIntegrand g;
  double t0;
  double t1;
  double resolution = 0.0;
};

struct Panel {
  int piece;
  double lo, hi;
  cplx whole;  // single-rule estimate on [lo, hi]
  cplx left, right;
  double l1;
  double err;
  int depth;
};

struct RuleSum {
  cplx value;
  double l1;
};

RuleSum apply_rule(const GaussRule& rule, const RealIntegrand& g, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  cplx s(0.0, 0.0);
  double l1 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = c + h * rule.nodes[i];
    const cplx v = g(t);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os.precision(17);
      os << "quadrature: non-finite integrand value at parameter " << t;
      throw NumericalError(os.str());
    }
    s += rule.weights[i] * v;
    l1 += rule.weights[i] * std::abs(v);
  }
  return {s * h, l1 * std::abs(h)};
}

Panel make_panel(const GaussRule& rule, const std::vector<Piece>& pieces, int piece, double lo,
                 double hi, cplx whole, int depth) {
  const double mid = 0.5 * (lo + hi);
  const RuleSum l = apply_rule(rule, pieces[piece].g, lo, mid);
  const RuleSum r = apply_rule(rule, pieces[piece].g, mid, hi);
  Panel p{piece, lo, hi, whole, l.value, r.value, l.l1 + r.l1, 0.0, depth};
  p.err = std::abs(whole - (l.value + r.value));
  return p;
}

constexpr int kMaxPanels = 20000;
constexpr double kEdgeMassFraction = 0.02;

QuadratureResult adaptive(const std::vector<Piece>& pieces, const QuadratureSpec& spec) {
  spec.validate();
  const GaussRule& rule = gauss_legendre(spec.base_nodes);
  auto by_err = [](const Panel& a, const Panel& b) { return a.err < b.err; };

  std::vector<Panel> heap;
  std::vector<Panel> frozen;
  for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
    const Piece& pc = pieces[i];
    if (pc.t1 == pc.t0) continue;
    const RuleSum w = apply_rule(rule, pc.g, pc.t0, pc.t1);
    heap.push_back(make_panel(rule, pieces, i, pc.t0, pc.t1, w.value, 0));
  }
  std::make_heap(heap.begin(), heap.end(), by_err);

  auto totals = [&](cplx& value, double& err, double& l1) {
    value = 0.0;
    err = 0.0;
    l1 = 0.0;
    for (const auto* v : {&heap, &frozen})
      for (const Panel& p : *v) {
        value += p.left + p.right;
        err += p.err;
        l1 += p.l1;
      }
  };

  cplx value;
  double err = 0.0, l1 = 0.0;
  totals(value, err, l1);
  const double eps = std::numeric_limits<double>::epsilon();
  int count = static_cast<int>(heap.size());
  int since_resum = 0;
  double unresolved = 0.0;
  while (true) {
    const double tol = std::max({spec.abs_tol, spec.rel_tol * std::abs(value), 50.0 * eps * l1});
    if (err <= tol) break;
    if (heap.empty() || count >= kMaxPanels) {
      totals(value, err, l1);
      const double tol2 =
          std::max({spec.abs_tol, spec.rel_tol * std::abs(value), 50.0 * eps * l1});
      if (err <= tol2) break;
      std::ostringstream os;
      os << "quadrature did not converge (error estimate " << err << ", tolerance " << tol2
         << ", " << count << " panels)";
      throw QuadratureError(os.str(), value, err);
    }
    std::pop_heap(heap.begin(), heap.end(), by_err);
    Panel p = heap.back();
    heap.pop_back();
    if (p.depth >= spec.max_subdivisions) {
      frozen.push_back(p);
      continue;
    }
    const Piece& pc = pieces[p.piece];
    if (p.lo == pc.t0 && p.hi - p.lo < pc.resolution) {
      // below what the endpoint's floating-point spacing can resolve; a
      // fraction of the panel's mass goes into the reported error instead
      err -= p.err;
      unresolved += p.err + kEdgeMassFraction * p.l1;
      p.err = 0.0;
      frozen.push_back(p);
      continue;
    }
    if (pc.resolution > 0.0 && p.lo > pc.t0) {
      // x = t0 + s^2 carries a relative rounding of about ulp / s^2, so the
      // integrand is only known to that accuracy on this panel
      const double r = pc.resolution / (p.lo - pc.t0);
      if (p.err <= 0.25 * r * r * p.l1) {
        err -= p.err;
        unresolved += p.err;
        p.err = 0.0;
        frozen.push_back(p);
        continue;
      }
    }
    const double mid = 0.5 * (p.lo + p.hi);
    Panel a = make_panel(rule, pieces, p.piece, p.lo, mid, p.left, p.depth + 1);
    Panel b = make_panel(rule, pieces, p.piece, mid, p.hi, p.right, p.depth + 1);
    value += (a.left + a.right + b.left + b.right) - (p.left + p.right);
    err += a.err + b.err - p.err;
    l1 += a.l1 + b.l1 - p.l1;
    heap.push_back(a);
    std::push_heap(heap.begin(), heap.end(), by_err);
    heap.push_back(b);
    std::push_heap(heap.begin(), heap.end(), by_err);
    ++count;
    if (++since_resum == 256) {
      totals(value, err, l1);
      since_resum = 0;
    }
  }
  totals(value, err, l1);
  return {value, err + unresolved, static_cast<int>(heap.size() + frozen.size())};
}

// x = a + s^2 near a singular left end. The Jacobian uses the rounded
// offset x - a so that f(x) sqrt(x - a) stays consistent; a node that rounds
// onto a is moved to the next representable point.
RealIntegrand left_substituted(const RealIntegrand& f, double a) {
  return [&f, a](double s) -> cplx {
    double x = a + s * s;
    if (x == a) x = std::nextafter(a, std::numeric_limits<double>::infinity());
    return f(x) * (2.0 * std::sqrt(x - a));
  };
}

RealIntegrand right_substituted(const RealIntegrand& f, double b) {
  return [&f, b](double s) -> cplx {
    double x = b - s * s;
    if (x == b) x = std::nextafter(b, -std::numeric_limits<double>::infinity());
    return f(x) * (2.0 * std::sqrt(b - x));
  };
}

// Smallest s-panel worth refining next to an endpoint at e.
double substitution_resolution(double e) {
  const double ulp = std::nextafter(std::abs(e), std::numeric_limits<double>::infinity()) - std::abs(e);
  return std::sqrt(16.0 * ulp);
}

void add_pieces(std::vector<Piece>& pieces, const RealIntegrand& f, Interval iv,
                SingularEnds ends) {
  const double a = iv.lo, b = iv.hi;
  if (ends.left && ends.right) {
    const double m = 0.5 * (a + b);
    pieces.push_back({left_substituted(f, a), 0.0, std::sqrt(m - a), substitution_resolution(a)});
    pieces.push_back({right_substituted(f, b), 0.0, std::sqrt(b - m), substitution_resolution(b)});
  } else if (ends.left) {
    pieces.push_back({left_substituted(f, a), 0.0, std::sqrt(b - a), substitution_resolution(a)});
  } else if (ends.right) {
    pieces.push_back({right_substituted(f, b), 0.0, std::sqrt(b - a), substitution_resolution(b)});
  } else {
    pieces.push_back({f, a, b});
  }
}

void check_interval(Interval iv, const char* what) {
  if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi))
    throw DomainError(std::string(what) + ": need a finite interval with a < b");
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

QuadratureResult integrate(const RealIntegrand& f, Interval iv, const QuadratureSpec& spec) {
  check_interval(iv, "integrate");
  return adaptive({{f, iv.lo, iv.hi}}, spec);
}

QuadratureResult integrate_endpoint_singular(const RealIntegrand& f, Interval iv,
                                             SingularEnds ends, const QuadratureSpec& spec) {
  check_interval(iv, "integrate_endpoint_singular");
  std::vector<Piece> pieces;
  add_pieces(pieces, f, iv, ends);
  return adaptive(pieces, spec);
}

QuadratureResult integrate_principal_value(const RealIntegrand& f_regular, double pole,
                                           const RealIntegrand& weight, Interval iv,
                                           SingularEnds ends, const QuadratureSpec& spec) {
  check_interval(iv, "integrate_principal_value");
  constexpr double kMinPoleDistance = 1e-10;
  if (!(pole - iv.lo > kMinPoleDistance && iv.hi - pole > kMinPoleDistance)) {
    std::ostringstream os;
    os.precision(17);
    os << "integrate_principal_value: pole " << pole << " is not strictly inside [" << iv.lo
       << ", " << iv.hi << "]";
    throw DomainError(os.str());
  }
  const cplx c = f_regular(pole) * weight(pole);
  const RealIntegrand h = [&](double x) -> cplx {
    return (f_regular(x) * weight(x) - c) / (x - pole);
  };
  std::vector<Piece> pieces;
  add_pieces(pieces, h, {iv.lo, pole}, {ends.left, false});
  add_pieces(pieces, h, {pole, iv.hi}, {false, ends.right});
  QuadratureResult r = adaptive(pieces, spec);
  r.value += c * std::log((iv.hi - pole) / (pole - iv.lo));
  return r;
}

Polyline::Polyline(std::vector<cplx> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw DomainError("Polyline: need at least two vertices");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!std::isfinite(vertices_[i].real()) || !std::isfinite(vertices_[i].imag()))
      throw DomainError("Polyline: non-finite vertex");
    if (i > 0 && vertices_[i] == vertices_[i - 1])
      throw DomainError("Polyline: consecutive vertices must differ");
  }
}

double Polyline::distance_to(cplx w) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    const cplx a = vertices_[i], b = vertices_[i + 1];
    const cplx ab = b - a;
    double t = std::real((w - a) * std::conj(ab)) / std::norm(ab);
    t = std::clamp(t, 0.0, 1.0);
    d = std::min(d, std::abs(w - (a + t * ab)));
  }
  return d;
}

QuadratureResult integrate_path(const ComplexIntegrand& f, const Polyline& path,
                                const QuadratureSpec& spec, PathEnds ends) {
  const auto& v = path.vertices();
  const std::size_t nseg = v.size() - 1;
  // Each segment is parametrised over t in [0, 1]; singular ends reuse the
  // real-line substitution on that parameter.
  std::vector<RealIntegrand> segs;
  segs.reserve(nseg);
  for (std::size_t k = 0; k < nseg; ++k) {
    const cplx a = v[k], d = v[k + 1] - v[k];
    segs.push_back([&f, a, d](double t) -> cplx { return f(a + t * d) * d; });
  }
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < nseg; ++k) {
    const bool sl = (k == 0) && ends.start_singular;
    const bool sr = (k + 1 == nseg) && ends.end_singular;
    add_pieces(pieces, segs[k], {0.0, 1.0}, {sl, sr});
  }
  return adaptive(pieces, spec);
}

}  // namespace gapflow
