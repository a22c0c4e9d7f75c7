#include "gapflow/cli/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gapflow/abelian.hpp"
#include "gapflow/error.hpp"
#include "gapflow/io.hpp"
#include "gapflow/potential.hpp"

namespace gapflow::cli {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  return os;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// One line of the verify report.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  std::string note;

  bool pass() const { return std::isfinite(value) && value < limit; }
};

ReconstructionOptions reconstruction_options(const RunConfig& cfg, const SteplikeOperator& op) {
  ReconstructionOptions o = cfg.reconstruction;
  o.transmission_at_infinity = cfg.transmission_at_infinity.value_or(cplx(transmission_at_infinity(op)));
  return o;
}

HyperellipticSurface sigma_surface(const SteplikeOperator& op) {
  return HyperellipticSurface(decompose_spectra(op.sigma_minus(), op.sigma_plus()).sigma);
}

ScatteringData run_oracle(const RunConfig& cfg, const SteplikeOperator& op, std::ostream& log) {
  const ScatteringData d = scattering_data(op, cfg.grids);
  write_scattering_data(cfg.out_dir / "scattering_data.json", d);
  log << "oracle: " << d.eigenvalues.size() << " eigenvalue(s)";
  for (double e : d.eigenvalues) log << ' ' << format_double(e);
  log << '\n';
  return d;
}

std::vector<GridPoint> run_reconstruction(const RunConfig& cfg, const ScatteringData& d,
                                          const SteplikeOperator& op, std::ostream& log) {
  const ReconstructionProblem pb(d, reconstruction_options(cfg, op));
  const std::vector<cplx> grid = cfg.evaluation_points();
  std::vector<GridPoint> out = reconstruct_on_grid(pb, grid, cfg.threads);
  write_transmission_csv(cfg.out_dir / "transmission.csv", out);
  std::size_t failed = 0;
  for (const GridPoint& p : out) {
    if (p.ok) continue;
    ++failed;
    log << "reconstruct: z = " << format_double(p.z.real()) << (p.z.imag() < 0 ? " - " : " + ")
        << format_double(std::abs(p.z.imag())) << "i: " << p.message << '\n';
  }
  log << "reconstruct: " << out.size() - failed << " of " << out.size() << " points\n";
  return out;
}

int mode_reconstruct(const RunConfig& cfg, const SteplikeOperator& op, std::ostream& log) {
  fs::path in = cfg.scattering_data.empty() ? cfg.out_dir / "scattering_data.json" : cfg.scattering_data;
  if (in.is_relative() && !cfg.scattering_data.empty()) in = cfg.base_dir / in;
  run_reconstruction(cfg, read_scattering_data(in), op, log);
  return 0;
}

std::vector<Check> identity_checks(const RunConfig& cfg, const SteplikeOperator& op,
                                   const ScatteringData& d) {
  const SpectralDecomposition dec = decompose_spectra(op.sigma_minus(), op.sigma_plus());
  Check wr{"Wronskian n-independence", 0.0, cfg.identity_tol, ""};
  Check unimod{"|R_+| = 1 on sigma_+^(1)", 0.0, cfg.identity_tol, ""};
  Check unit{"unitarity on sigma^(2)", 0.0, cfg.identity_tol, ""};
  Check tr{"translation self-consistency", 0.0, cfg.identity_tol, ""};

  const long lo = op.window_lo() - 4, hi = op.window_hi() + 4;
  std::vector<cplx> zs = cfg.evaluation_points();
  for (const ReflectionSample& s : d.R_plus) zs.push_back(s.lambda);
  for (const cplx& z : zs) {
    const WronskianCheck c = wronskian_checked(op, jost_solution(op, z, Side::kMinus, lo, hi),
                                               jost_solution(op, z, Side::kPlus, lo, hi));
    wr.value = std::max(wr.value, c.variance / std::max(std::abs(c.value), 1e-300));
  }
  std::size_t n_plus1 = 0, n_sigma2 = 0;
  for (const ReflectionSample& s : d.R_plus) {
    if (dec.sigma_plus1.contains_interior(s.lambda)) {
      ++n_plus1;
      unimod.value = std::max(unimod.value, std::abs(std::abs(s.value) - 1.0));
    } else {
      ++n_sigma2;
      const SurfacePoint p = SurfacePoint::upper(cplx(s.lambda, 0.0), BoundarySide::kAbove);
      const cplx T = transmission_plus(op, cplx(s.lambda, 0.0), BoundarySide::kAbove);
      unit.value = std::max(unit.value,
                            std::abs(1.0 - std::norm(s.value) - rho_ratio(d, p).real() * std::norm(T)));
    }
  }
  unimod.note = std::to_string(n_plus1) + " samples";
  unit.note = std::to_string(n_sigma2) + " samples";
  std::size_t n_tr = 0;
  for (const TranslatedSample& s : translate_data(d, [&](double x) {
         return transmission_plus(op, cplx(x, 0.0), BoundarySide::kAbove);
       })) {
    if (s.flagged) continue;
    ++n_tr;
    const cplx z(s.lambda, 0.0);
    tr.value = std::max({tr.value, std::abs(s.T_minus - transmission_minus(op, z, BoundarySide::kAbove)),
                         std::abs(s.R_minus - reflection_minus(op, s.lambda))});
  }
  tr.note = std::to_string(n_tr) + " samples";
  return {wr, unimod, unit, tr};
}

int mode_verify(const RunConfig& cfg, const SteplikeOperator& op, std::ostream& log) {
  const ScatteringData d = run_oracle(cfg, op, log);
  std::vector<Check> checks;

  const ScatteringData back = read_scattering_data(cfg.out_dir / "scattering_data.json");
  checks.push_back({"JSON round trip", back == d ? 0.0 : 1.0, 0.5, back == d ? "bit-identical" : "differs"});

  const std::vector<GridPoint> rec = run_reconstruction(cfg, d, op, log);
  std::vector<double> rel;
  for (const GridPoint& p : rec) {
    if (!p.ok) continue;
    const cplx direct = transmission_plus(op, p.z);
    rel.push_back(std::abs(p.T - direct) / std::abs(direct));
  }
  const std::size_t failed = rec.size() - rel.size();
  std::vector<double> sorted = rel;
  std::sort(sorted.begin(), sorted.end());
  const double max_rel = sorted.empty() ? 0.0 : sorted.back();
  double median = 0.0;
  if (!sorted.empty()) {
    const std::size_t m = sorted.size() / 2;
    median = sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
  }
  checks.push_back({"reconstructed points", static_cast<double>(failed), 0.5,
                    std::to_string(rel.size()) + " of " + std::to_string(rec.size()) + " evaluated"});
  checks.push_back({"max relative error of T_+", max_rel, cfg.verify_tol,
                    "median " + sci(median)});
  for (Check& c : identity_checks(cfg, op, d)) checks.push_back(std::move(c));

  std::ofstream os = open_out(cfg.out_dir / "report.txt");
  bool all = true;
  for (const Check& c : checks) {
    all = all && c.pass();
    os << (c.pass() ? "PASS" : "FAIL") << ' ' << c.name << ": " << sci(c.value) << " (limit " << sci(c.limit)
       << ')';
    if (!c.note.empty()) os << ", " << c.note;
    os << '\n';
  }
  os << "max relative error " << sci(max_rel) << ", median relative error " << sci(median) << '\n';
  log << "verify: " << (all ? "all checks pass" : "some checks FAIL") << ", see report.txt\n";
  return 0;
}

int mode_periods(const RunConfig& cfg, const SteplikeOperator& op, std::ostream& log) {
  const HyperellipticSurface s = sigma_surface(op);
  const PeriodData pd = compute_periods(s, cfg.reconstruction.spec);
  std::ofstream os = open_out(cfg.out_dir / "periods.csv");
  os << "j,k,C_jk,c_jk\n";
  for (int j = 0; j < pd.genus; ++j)
    for (int k = 0; k < pd.genus; ++k)
      os << j + 1 << ',' << k + 1 << ',' << format_double(pd.C(j, k)) << ',' << format_double(pd.c(j, k))
         << '\n';
  log << "periods: genus " << pd.genus << ", condition " << sci(pd.condition) << '\n';
  return 0;
}

int mode_blaschke(const RunConfig& cfg, const SteplikeOperator& op, std::ostream& log) {
  const HyperellipticSurface s = sigma_surface(op);
  const PeriodData pd = compute_periods(s, cfg.reconstruction.spec);
  std::ofstream os = open_out(cfg.out_dir / "blaschke.csv");
  std::ofstream ph = open_out(cfg.out_dir / "blaschke_phases.csv");
  os << "rho,re_z,im_z,re_B,im_B,abs_B,err_est\n";
  ph << "rho,j,delta_j\n";
  const std::vector<cplx> points = cfg.evaluation_points();
  for (double rho : cfg.poles) {
    if (s.on_bands(rho)) {
      log << "blaschke: pole " << format_double(rho) << " lies on sigma, skipped\n";
      continue;
    }
    const BlaschkeEvaluator b(s, rho, cfg.reconstruction.spec, cfg.reconstruction.path_height_scale, &pd);
    for (int j = 1; j <= s.genus(); ++j)
      ph << format_double(rho) << ',' << j << ',' << format_double(blaschke_gap_phase(b, j)) << '\n';
    for (const cplx& z : points) {
      os << format_double(rho) << ',' << format_double(z.real()) << ',' << format_double(z.imag()) << ',';
      try {
        const QuadratureResult r = b.evaluate(SurfacePoint::upper(z));
        os << format_double(r.value.real()) << ',' << format_double(r.value.imag()) << ','
           << format_double(std::abs(r.value)) << ',' << format_double(r.error) << '\n';
      } catch (const Error& e) {
        os << "nan,nan,nan,nan\n";
        log << "blaschke: rho " << format_double(rho) << ", z " << format_double(z.real()) << ": " << e.what()
            << '\n';
      }
    }
  }
  return 0;
}

int mode_translate(const RunConfig& cfg, const SteplikeOperator& op, std::ostream& log) {
  const ScatteringData d = run_oracle(cfg, op, log);
  const auto t = translate_data(d, [&](double x) {
    return transmission_plus(op, cplx(x, 0.0), BoundarySide::kAbove);
  });
  std::ofstream os = open_out(cfg.out_dir / "translated.csv");
  os << "lambda,region,re_T_minus,im_T_minus,re_R_minus,im_R_minus,flagged\n";
  for (const TranslatedSample& s : t)
    os << format_double(s.lambda) << ',' << (s.in_sigma2 ? "sigma2" : "sigma_minus1") << ','
       << format_double(s.T_minus.real()) << ',' << format_double(s.T_minus.imag()) << ','
       << format_double(s.R_minus.real()) << ',' << format_double(s.R_minus.imag()) << ','
       << (s.flagged ? 1 : 0) << '\n';
  log << "translate: " << t.size() << " samples\n";
  return 0;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  try {
    config.validate();
    const SteplikeOperator op = config.make_operator();
    fs::create_directories(config.out_dir);
    switch (config.mode) {
      case Mode::kOracle:
        run_oracle(config, op, log);
        return 0;
      case Mode::kReconstruct: return mode_reconstruct(config, op, log);
      case Mode::kVerify: return mode_verify(config, op, log);
      case Mode::kPeriods: return mode_periods(config, op, log);
      case Mode::kBlaschke: return mode_blaschke(config, op, log);
      case Mode::kTranslate: return mode_translate(config, op, log);
    }
  } catch (const std::exception& e) {
    log << "gapflow " << mode_name(config.mode) << ": " << e.what() << '\n';
  }
  return 1;
}

}  // namespace gapflow::cli
