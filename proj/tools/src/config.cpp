#include "gapflow/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "gapflow/error.hpp"

namespace gapflow::cli {

namespace {

struct Ctx {
  std::string source;

  [[noreturn]] void fail(const toml::node* node, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << source;
    if (node && node->source().begin) os << ':' << node->source().begin.line;
    os << ": " << field << ": " << msg;
    throw ConfigError(os.str());
  }

  void only_keys(const toml::table& t, const std::string& where, std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, v] : t) {
      if (std::find(keys.begin(), keys.end(), k.str()) == keys.end())
        fail(&v, where.empty() ? std::string(k.str()) : where + "." + std::string(k.str()), "unknown key");
    }
  }

  double real(const toml::node& n, const std::string& field) const {
    if (auto v = n.value<double>(); v && (n.is_floating_point() || n.is_integer())) return *v;
    fail(&n, field, "expected a number");
  }

  long integer(const toml::node& n, const std::string& field) const {
    if (auto v = n.as_integer()) return static_cast<long>(v->get());
    fail(&n, field, "expected an integer");
  }

  bool boolean(const toml::node& n, const std::string& field) const {
    if (auto v = n.as_boolean()) return v->get();
    fail(&n, field, "expected true or false");
  }

  cplx complex(const toml::node& n, const std::string& field) const {
    if (n.is_number()) return real(n, field);
    const toml::array* a = n.as_array();
    if (!a || a->size() != 2) fail(&n, field, "expected a number or a [re, im] pair");
    return {real(*a->get(0), field), real(*a->get(1), field)};
  }

  const toml::array& array(const toml::node& n, const std::string& field) const {
    if (const toml::array* a = n.as_array()) return *a;
    fail(&n, field, "expected an array");
  }

  const toml::table& table(const toml::node& n, const std::string& field) const {
    if (const toml::table* t = n.as_table()) return *t;
    fail(&n, field, "expected a table");
  }
};

Background read_background(const Ctx& c, const toml::table& t, const std::string& where) {
  c.only_keys(t, where, {"a", "b"});
  Background bg;
  if (const toml::node* a = t.get("a")) bg.a = c.real(*a, where + ".a");
  if (const toml::node* b = t.get("b")) bg.b = c.real(*b, where + ".b");
  if (!(bg.a > 0.0)) c.fail(t.get("a"), where + ".a", "must be positive");
  return bg;
}

void read_perturbation(const Ctx& c, const toml::node& node, RunConfig& cfg) {
  const toml::array* arr = node.as_array();
  if (!arr || !arr->is_array_of_tables()) c.fail(&node, "perturbation", "expected [[perturbation]] tables");
  std::set<long> seen;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const std::string where = "perturbation[" + std::to_string(i) + "]";
    const toml::table& t = *arr->get(i)->as_table();
    c.only_keys(t, where, {"n", "a", "b"});
    const toml::node* n = t.get("n");
    if (!n) c.fail(&t, where + ".n", "missing site index");
    PerturbationEntry e;
    e.n = c.integer(*n, where + ".n");
    if (!seen.insert(e.n).second) c.fail(n, where + ".n", "site " + std::to_string(e.n) + " listed twice");
    if (const toml::node* a = t.get("a")) {
      e.a = c.real(*a, where + ".a");
      if (!(*e.a > 0.0)) c.fail(a, where + ".a", "a(n) must be positive");
    }
    if (const toml::node* b = t.get("b")) e.b = c.real(*b, where + ".b");
    cfg.perturbation.push_back(e);
  }
}

void read_grids(const Ctx& c, const toml::table& t, RunConfig& cfg) {
  c.only_keys(t, "grids",
              {"samples_per_band", "edge_margin", "chebyshev", "scan_points", "points", "complex_points",
               "poles", "threads"});
  ScatteringGrids& g = cfg.grids;
  if (const toml::node* n = t.get("samples_per_band")) {
    g.samples_per_band = static_cast<int>(c.integer(*n, "grids.samples_per_band"));
    if (g.samples_per_band < 8) c.fail(n, "grids.samples_per_band", "needs at least 8 samples per band");
  }
  if (const toml::node* n = t.get("edge_margin")) {
    g.edge_margin = c.real(*n, "grids.edge_margin");
    if (!(g.edge_margin > 0.0)) c.fail(n, "grids.edge_margin", "must be positive");
  }
  if (const toml::node* n = t.get("chebyshev")) g.chebyshev = c.boolean(*n, "grids.chebyshev");
  if (const toml::node* n = t.get("scan_points")) {
    g.scan_points = static_cast<int>(c.integer(*n, "grids.scan_points"));
    if (g.scan_points < 16) c.fail(n, "grids.scan_points", "needs at least 16 points");
  }
  if (const toml::node* n = t.get("points"))
    for (const toml::node& v : c.array(*n, "grids.points")) cfg.points.push_back(c.real(v, "grids.points"));
  if (const toml::node* n = t.get("complex_points"))
    for (const toml::node& v : c.array(*n, "grids.complex_points"))
      cfg.points.push_back(c.complex(v, "grids.complex_points"));
  if (const toml::node* n = t.get("poles"))
    for (const toml::node& v : c.array(*n, "grids.poles")) cfg.poles.push_back(c.real(v, "grids.poles"));
  if (const toml::node* n = t.get("threads")) {
    const long k = c.integer(*n, "grids.threads");
    if (k < 0) c.fail(n, "grids.threads", "must be non-negative");
    cfg.threads = static_cast<unsigned>(k);
  }
}

double positive(const Ctx& c, const toml::node& n, const std::string& field) {
  const double v = c.real(n, field);
  if (!(v > 0.0)) c.fail(&n, field, "must be positive");
  return v;
}

void read_tolerances(const Ctx& c, const toml::table& t, RunConfig& cfg) {
  c.only_keys(t, "tolerances", {"rel_tol", "abs_tol", "eigen_tol", "verify", "identities"});
  QuadratureSpec& q = cfg.reconstruction.spec;
  if (const toml::node* n = t.get("rel_tol")) q.rel_tol = positive(c, *n, "tolerances.rel_tol");
  if (const toml::node* n = t.get("abs_tol")) q.abs_tol = positive(c, *n, "tolerances.abs_tol");
  if (const toml::node* n = t.get("eigen_tol")) cfg.grids.eigen_tol = positive(c, *n, "tolerances.eigen_tol");
  if (const toml::node* n = t.get("verify")) cfg.verify_tol = positive(c, *n, "tolerances.verify");
  if (const toml::node* n = t.get("identities")) cfg.identity_tol = positive(c, *n, "tolerances.identities");
}

void read_reconstruction(const Ctx& c, const toml::table& t, RunConfig& cfg) {
  c.only_keys(t, "reconstruction",
              {"delta_variant", "select_arg_branch", "transmission_at_infinity", "path_height_scale"});
  ReconstructionOptions& o = cfg.reconstruction;
  if (const toml::node* n = t.get("delta_variant")) {
    const auto s = n->value<std::string>();
    if (s == "theorem") o.variant = DeltaVariant::kTheorem;
    else if (s == "proof") o.variant = DeltaVariant::kProof;
    else c.fail(n, "reconstruction.delta_variant", "expected \"theorem\" or \"proof\"");
  }
  if (const toml::node* n = t.get("select_arg_branch"))
    o.select_arg_branch = c.boolean(*n, "reconstruction.select_arg_branch");
  if (const toml::node* n = t.get("transmission_at_infinity")) {
    cfg.transmission_at_infinity = c.complex(*n, "reconstruction.transmission_at_infinity");
    if (*cfg.transmission_at_infinity == 0.0)
      c.fail(n, "reconstruction.transmission_at_infinity", "must be non-zero");
  }
  if (const toml::node* n = t.get("path_height_scale"))
    o.path_height_scale = positive(c, *n, "reconstruction.path_height_scale");
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1));
  return v;
}

}  // namespace

std::optional<Mode> parse_mode(std::string_view name) {
  for (Mode m : {Mode::kOracle, Mode::kReconstruct, Mode::kVerify, Mode::kPeriods, Mode::kBlaschke,
                 Mode::kTranslate})
    if (mode_name(m) == name) return m;
  return std::nullopt;
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kOracle: return "oracle";
    case Mode::kReconstruct: return "reconstruct";
    case Mode::kVerify: return "verify";
    case Mode::kPeriods: return "periods";
    case Mode::kBlaschke: return "blaschke";
    case Mode::kTranslate: return "translate";
  }
  return "?";
}

SteplikeOperator RunConfig::make_operator() const {
  try {
    return SteplikeOperator(left, right, perturbation);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("operator: ") + e.what());
  }
}

std::vector<cplx> RunConfig::evaluation_points() const {
  if (!points.empty()) return points;
  const BandSet sigma = decompose_spectra(BandSet({left.band()}), BandSet({right.band()})).sigma;
  const double margin = 0.1;
  std::vector<cplx> out;
  const double e0 = sigma[0].lo, e1 = sigma[sigma.size() - 1].hi;
  for (double x : linspace(e0 - 3.0, e0 - margin, 7)) out.push_back(x);
  for (std::size_t j = 1; j < sigma.size(); ++j) {
    const double lo = sigma[j - 1].hi + margin, hi = sigma[j].lo - margin;
    if (hi > lo) for (double x : linspace(lo, hi, 6)) out.push_back(x);
  }
  for (double x : linspace(e1 + margin, e1 + 3.0, 7)) out.push_back(x);
  return out;
}

void RunConfig::validate() const {
  if (mode == Mode::kBlaschke && poles.empty())
    throw ConfigError("grids.poles: the blaschke mode needs at least one pole");
  for (const cplx& z : points)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw ConfigError("grids.points: non-finite evaluation point");
}

RunConfig parse_config(std::string_view text, std::string_view source) {
  const Ctx c{std::string(source)};
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ':' << e.source().begin.line << ':' << e.source().begin.column << ": " << e.description();
    throw ConfigError(os.str());
  }
  c.only_keys(root, "",
              {"scattering_data", "background", "perturbation", "grids", "tolerances", "reconstruction"});

  RunConfig cfg;
  const toml::node* bg = root.get("background");
  if (!bg) c.fail(nullptr, "[background.left]", "missing block");
  const toml::table& bgt = c.table(*bg, "background");
  c.only_keys(bgt, "background", {"left", "right"});
  for (const char* side : {"left", "right"}) {
    const std::string where = std::string("background.") + side;
    const toml::node* n = bgt.get(side);
    if (!n) c.fail(bg, "[" + where + "]", "missing block");
    (side[0] == 'l' ? cfg.left : cfg.right) = read_background(c, c.table(*n, where), where);
  }
  if (const toml::node* n = root.get("perturbation")) read_perturbation(c, *n, cfg);
  if (const toml::node* n = root.get("grids")) read_grids(c, c.table(*n, "grids"), cfg);
  if (const toml::node* n = root.get("tolerances")) read_tolerances(c, c.table(*n, "tolerances"), cfg);
  if (const toml::node* n = root.get("reconstruction"))
    read_reconstruction(c, c.table(*n, "reconstruction"), cfg);
  if (const toml::node* n = root.get("scattering_data")) {
    const auto s = n->value<std::string>();
    if (!s || s->empty()) c.fail(n, "scattering_data", "expected a file name");
    cfg.scattering_data = *s;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str(), path.string());
  cfg.base_dir = path.parent_path();
  return cfg;
}

}  // namespace gapflow::cli
