#include "gapflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gapflow/error.hpp"

namespace gapflow {

namespace {

using nlohmann::json;

// nlohmann writes the shortest round-trip form, but we want a fixed width
// that other tools can rely on, so the writer is done by hand.
void put_array(std::ostream& os, std::span<const double> v) {
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_double(v[i]);
  os << ']';
}

void put_key(std::ostream& os, const char* key, bool first = false) {
  os << (first ? "{\n  \"" : ",\n  \"") << key << "\": ";
}

std::vector<double> read_numbers(const json& j, const char* key, bool required = true) {
  if (!j.contains(key)) {
    if (!required) return {};
    throw DomainError(std::string("scattering data JSON: missing field '") + key + "'");
  }
  const json& a = j.at(key);
  if (!a.is_array()) throw DomainError(std::string("scattering data JSON: '") + key + "' must be an array");
  std::vector<double> out;
  for (const json& v : a) {
    if (!v.is_number()) throw DomainError(std::string("scattering data JSON: '") + key + "' holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> read_rows(const json& j, const char* key, std::size_t width) {
  if (!j.contains(key)) throw DomainError(std::string("scattering data JSON: missing field '") + key + "'");
  const json& a = j.at(key);
  if (!a.is_array()) throw DomainError(std::string("scattering data JSON: '") + key + "' must be an array");
  std::vector<std::vector<double>> out;
  for (const json& row : a) {
    if (!row.is_array() || row.size() != width)
      throw DomainError(std::string("scattering data JSON: rows of '") + key + "' need " +
                        std::to_string(width) + " numbers");
    std::vector<double> r;
    for (const json& v : row) {
      if (!v.is_number()) throw DomainError(std::string("scattering data JSON: '") + key + "' holds a non-number");
      r.push_back(v.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_json(const ScatteringData& d) {
  auto finite = [](double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string("to_json: non-finite value in ") + what);
  };
  std::ostringstream os;
  put_key(os, "sigma_minus_edges", true);
  put_array(os, d.sigma_minus_edges);
  put_key(os, "sigma_plus_edges");
  put_array(os, d.sigma_plus_edges);
  put_key(os, "R_plus");
  os << '[';
  for (std::size_t i = 0; i < d.R_plus.size(); ++i) {
    const auto& s = d.R_plus[i];
    finite(s.lambda, "R_plus");
    finite(s.value.real(), "R_plus");
    finite(s.value.imag(), "R_plus");
    os << (i ? ",\n    [" : "\n    [") << format_double(s.lambda) << ", " << format_double(s.value.real())
       << ", " << format_double(s.value.imag()) << ']';
  }
  os << (d.R_plus.empty() ? "]" : "\n  ]");
  put_key(os, "T_plus_sq");
  os << '[';
  for (std::size_t i = 0; i < d.T_plus_sq.size(); ++i) {
    const auto& s = d.T_plus_sq[i];
    finite(s.lambda, "T_plus_sq");
    finite(s.value, "T_plus_sq");
    os << (i ? ",\n    [" : "\n    [") << format_double(s.lambda) << ", " << format_double(s.value) << ']';
  }
  os << (d.T_plus_sq.empty() ? "]" : "\n  ]");
  put_key(os, "eigenvalues");
  put_array(os, d.eigenvalues);
  put_key(os, "norming_plus");
  put_array(os, d.norming_plus);
  put_key(os, "M_minus");
  put_array(os, d.M_minus);
  put_key(os, "M_plus");
  put_array(os, d.M_plus);
  if (!d.mu_minus.empty() || !d.mu_plus.empty()) {
    put_key(os, "mu_minus");
    put_array(os, d.mu_minus);
    put_key(os, "mu_plus");
    put_array(os, d.mu_plus);
  }
  os << "\n}\n";
  return os.str();
}

ScatteringData scattering_data_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("scattering data JSON: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("scattering data JSON: top level must be an object");
  ScatteringData d;
  d.sigma_minus_edges = read_numbers(j, "sigma_minus_edges");
  d.sigma_plus_edges = read_numbers(j, "sigma_plus_edges");
  for (const auto& r : read_rows(j, "R_plus", 3)) d.R_plus.push_back({r[0], cplx(r[1], r[2])});
  for (const auto& r : read_rows(j, "T_plus_sq", 2)) d.T_plus_sq.push_back({r[0], r[1]});
  d.eigenvalues = read_numbers(j, "eigenvalues");
  d.norming_plus = read_numbers(j, "norming_plus");
  d.M_minus = read_numbers(j, "M_minus");
  d.M_plus = read_numbers(j, "M_plus");
  d.mu_minus = read_numbers(j, "mu_minus", false);
  d.mu_plus = read_numbers(j, "mu_plus", false);
  for (auto* edges : {&d.sigma_minus_edges, &d.sigma_plus_edges})
    if (edges->size() < 2 || edges->size() % 2 != 0)
      throw DomainError("scattering data JSON: edge lists need an even, nonzero count");
  return d;
}

void write_scattering_data(const std::filesystem::path& path, const ScatteringData& data) {
  const std::string text = to_json(data);
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("write to " + path.string() + " failed");
}

ScatteringData read_scattering_data(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return scattering_data_from_json(ss.str());
}

void write_transmission_csv(std::ostream& os, std::span<const GridPoint> points) {
  os << "re_z,im_z,re_T,im_T,abs_T,arg_T,err_est\n";
  for (const GridPoint& p : points) {
    const double nan = std::nan("");
    const cplx T = p.ok ? p.T : cplx(nan, nan);
    os << format_double(p.z.real()) << ',' << format_double(p.z.imag()) << ','
       << format_double(T.real()) << ',' << format_double(T.imag()) << ','
       << format_double(p.ok ? std::abs(T) : nan) << ',' << format_double(p.ok ? std::arg(T) : nan)
       << ',' << format_double(p.ok ? p.err_est : nan) << '\n';
  }
}

void write_transmission_csv(const std::filesystem::path& path, std::span<const GridPoint> points) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  write_transmission_csv(f, points);
  if (!f) throw Error("write to " + path.string() + " failed");
}

}  // namespace gapflow
