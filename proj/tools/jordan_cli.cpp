#include <iostream>

#include "CLI11.hpp"

#include "cli_commands.hpp"

namespace cli = jordan::cli;

int main(int argc, char** argv) {
  CLI::App app{"Jordan algebras and their centro-affine hypersurfaces"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  auto add_seed = [&seed](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed (default: $JORDAN_SEED, else 42)");
  };

  auto* catalog = app.add_subcommand("catalog", "algebra catalog");
  catalog->require_subcommand(1);
  cli::CatalogListOptions list_opt;
  auto* list = catalog->add_subcommand("list", "list the algebra families");
  list->add_flag("--json", list_opt.json, "machine-readable output");
  list->add_option("--family", list_opt.family, "show one family");

  cli::VerifyOptions verify_opt;
  auto* verify = app.add_subcommand("verify", "run the algebraic and geometric checks on a spec");
  verify->add_option("spec", verify_opt.spec_path, "spec file (JSON)")->required();
  verify->add_option("--samples", verify_opt.samples, "sample points per check")->capture_default_str();
  verify->add_option("--tol", verify_opt.tol, "tolerance of analytic checks")->capture_default_str();
  verify->add_option("--fd-tol", verify_opt.fd_tol, "tolerance of finite-difference checks")->capture_default_str();
  add_seed(verify);

  cli::EvalOptions eval_opt;
  auto* eval = app.add_subcommand("eval", "evaluate omega, the potential, zeta or det P at a point");
  eval->add_option("spec", eval_opt.spec_path, "spec file (JSON)")->required();
  eval->add_option("--point", eval_opt.point, "coordinates, comma separated")->required();
  eval->add_option("--what", eval_opt.what, "omega | phi | zeta | detP")
      ->check(CLI::IsMember({"omega", "phi", "zeta", "detP"}))
      ->capture_default_str();

  cli::SurfaceOptions surface_opt;
  auto* surface = app.add_subcommand("surface", "sample a level surface and export it");
  surface->add_option("spec", surface_opt.spec_path, "spec file (JSON)")->required();
  surface->add_option("--level", surface_opt.level, "level of omega (or of the potential)")->capture_default_str();
  surface->add_option("--count", surface_opt.count, "number of points")->capture_default_str();
  surface->add_option("--out", surface_opt.out_path, "output file")->required();
  surface->add_option("--format", surface_opt.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  surface->add_option("--spread", surface_opt.spread, "spread of sampled directions around e")->capture_default_str();
  add_seed(surface);

  cli::CalabiOptions calabi_opt;
  auto* calabi = app.add_subcommand("calabi", "assemble points of a Calabi product");
  calabi->add_option("config", calabi_opt.config_path, "Calabi configuration (JSON)")->required();
  calabi->add_option("--count", calabi_opt.count, "number of product points")->capture_default_str();
  calabi->add_option("--tol", calabi_opt.tol, "tolerance on |omega(f) - c| / c")->capture_default_str();
  add_seed(calabi);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kSpecError;
  }

  if (list->parsed()) return cli::catalog_list(list_opt, std::cout, std::cerr);
  if (verify->parsed()) {
    verify_opt.seed = seed;
    return cli::verify(verify_opt, std::cout, std::cerr);
  }
  if (eval->parsed()) return cli::eval(eval_opt, std::cout, std::cerr);
  if (surface->parsed()) {
    surface_opt.seed = seed;
    return cli::surface(surface_opt, std::cout, std::cerr);
  }
  if (calabi->parsed()) {
    calabi_opt.seed = seed;
    return cli::calabi(calabi_opt, std::cout, std::cerr);
  }
  return cli::kSpecError;
}
