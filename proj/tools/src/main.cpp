#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gapflow/cli/run.hpp"

int main(int argc, char** argv) {
  using namespace gapflow::cli;

  CLI::App app{"Transmission coefficients of steplike Jacobi operators from one-sided scattering data"};
  std::string mode, config_path, out = ".", variant;
  double tol = 0.0;
  app.add_option("mode", mode, "oracle, reconstruct, verify, periods, blaschke or translate")
      ->required()
      ->check(CLI::IsMember({"oracle", "reconstruct", "verify", "periods", "blaschke", "translate"}));
  app.add_option("--config", config_path, "TOML run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory")->capture_default_str();
  auto* tol_opt = app.add_option("--tol", tol, "quadrature relative tolerance")->check(CLI::PositiveNumber);
  app.add_option("--delta-variant", variant, "weight of the b-period phases")
      ->check(CLI::IsMember({"theorem", "proof"}));
  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  cfg.mode = *parse_mode(mode);
  cfg.out_dir = out;
  if (*tol_opt) cfg.reconstruction.spec.rel_tol = tol;
  if (variant == "theorem") cfg.reconstruction.variant = gapflow::DeltaVariant::kTheorem;
  if (variant == "proof") cfg.reconstruction.variant = gapflow::DeltaVariant::kProof;
  return run(cfg, std::cerr);
}
