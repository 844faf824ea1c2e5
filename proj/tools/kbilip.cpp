#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "kbilip/cli.hpp"

namespace {

void add_common(CLI::App* cmd, kbilip::cli::Overrides& o) {
  cmd->add_option("--scheme-r0", o.r0, "outermost sampling radius");
  cmd->add_option("--scheme-rho", o.rho, "radius ratio between shells");
  cmd->add_option("--scheme-radii", o.radii, "number of radius shells");
  cmd->add_option("--scheme-dirs", o.dirs, "directions per shell");
  cmd->add_option("--seed", o.seed, "direction and catalog seed");
  cmd->add_option("--tol-eps-zero", o.eps_zero_base, "zero threshold base");
  cmd->add_option("--tol-ratio-floor", o.ratio_floor, "smallest certified contact ratio");
  cmd->add_option("--tol-check", o.check_tol, "residual tolerance of the checks");
  cmd->add_option("--tol-boundary-margin", o.boundary_margin, "case boundary exclusion");
  cmd->add_option("--tol-lipschitz-cap", o.lipschitz_cap, "largest finite Lipschitz estimate");
  cmd->add_option("--tol-partial-growth", o.partial_growth, "allowed partial bound growth");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on K-bi-Lipschitz equivalence of polynomial germs"};
  app.set_version_flag("--version", kbilip::cli::version());
  app.require_subcommand(1);

  kbilip::cli::Overrides o;
  std::string report_path;
  bool json_out = false;
  std::string f_path, g_path, config_path, homeo_path;
  int fi = 0, gi = 0;
  std::string catalog;

  auto add_output = [&](CLI::App* cmd) {
    add_common(cmd, o);
    cmd->add_option("--report", report_path, "write the JSON report to this path");
    cmd->add_flag("--json", json_out, "print the JSON report on stdout");
  };

  auto* contact = app.add_subcommand("check-contact", "contact test of two scalar components");
  contact->add_option("f", f_path, "germ file")->required();
  contact->add_option("g", g_path, "germ file")->required();
  contact->add_option("--fi", fi, "component of f");
  contact->add_option("--gi", gi, "component of g");
  add_output(contact);

  auto* equiv = app.add_subcommand("equiv", "search the catalog for a certified equivalence");
  equiv->add_option("f", f_path, "germ file")->required();
  equiv->add_option("g", g_path, "germ file")->required();
  equiv->add_option("--catalog", catalog, "catalog spec, e.g. id,signs,perms,rot:8,linear:4");
  add_output(equiv);

  auto* probe = app.add_subcommand("probe", "cluster a germ grid into classes");
  probe->add_option("config", config_path, "probe config file")->required();
  probe->add_option("--catalog", catalog, "override the config's catalog");
  add_output(probe);

  auto* verify = app.add_subcommand("verify", "re-check a described homeomorphism");
  verify->add_option("f", f_path, "germ file")->required();
  verify->add_option("g", g_path, "germ file")->required();
  verify->add_option("--homeo", homeo_path, "certificate or equiv report")->required();
  add_output(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kbilip::cli::kInputError;
  }
  if (!catalog.empty()) o.catalog = catalog;

  kbilip::cli::Result r;
  if (*contact)
    r = kbilip::cli::check_contact(f_path, g_path, fi, gi, o);
  else if (*equiv)
    r = kbilip::cli::equiv(f_path, g_path, o);
  else if (*probe)
    r = kbilip::cli::probe(config_path, o);
  else
    r = kbilip::cli::verify(f_path, g_path, homeo_path, o);

  const std::string text = r.report.dump(2) + "\n";
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) {
      std::cerr << "error: cannot write report to " << report_path << "\n";
      return kbilip::cli::kInputError;
    }
    out << text;
  }
  if (json_out || report_path.empty()) std::cout << text;
  else std::cout << r.summary << "\n";
  if (r.exit_code == kbilip::cli::kInputError) std::cerr << "error: " << r.summary << "\n";
  return r.exit_code;
}
