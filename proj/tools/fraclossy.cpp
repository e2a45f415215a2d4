// fraclossy: operator evaluation, dispersion tables, wave simulations and the
// acceptance pipeline. Exit codes: 0 ok, 1 verification failed, 2 config
// error, 3 numerical error, 4 instability.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "fraclossy/cli.hpp"

int main(int argc, char** argv) {
  using namespace fraclossy;
  CLI::App app{"Fractional-derivative lossy wave toolkit"};
  app.require_subcommand(1);

  cli::OperatorArgs op;
  auto* c_op = app.add_subcommand("operator", "apply a fractional operator to a signal, writing CSV (t,value)");
  c_op->add_option("--kind", op.kind, "caputo, rl, positive, positive-general, szabo, modified")->capture_default_str();
  c_op->add_option("--order", op.order, "mu, eta, or the loss exponent y")->capture_default_str();
  c_op->add_option("--k", op.k, "branch index for positive-general")->capture_default_str();
  c_op->add_option("--signal", op.signal, "builtin input: poly:N, sin, cos, exp");
  c_op->add_option("--input", op.input, "input CSV with columns t,value");
  c_op->add_option("--t-max", op.t_max, "end of the builtin signal's grid [s]")->capture_default_str();
  c_op->add_option("--n", op.n, "samples of the builtin signal")->capture_default_str();
  c_op->add_option("--time-scale", op.time_scale, "reference time of the odd-order log kernel [s]")->capture_default_str();
  c_op->add_option("-o,--output", op.output, "output CSV ('-' for stdout)")->capture_default_str();

  cli::DispersionArgs disp;
  double disp_alpha0 = 0.0, disp_ratio = 0.0;
  auto* c_disp = app.add_subcommand("dispersion", "tabulate k(omega) of the power-law medium as CSV");
  c_disp->add_option("--c0", disp.c0, "sound speed [m/s]")->capture_default_str();
  auto* o_a0 = c_disp->add_option("--alpha0", disp_alpha0, "attenuation prefactor [Np/m/(rad/s)^y]");
  auto* o_ratio = c_disp->add_option("--smallness-ratio", disp_ratio, "set alpha0 from this ratio over the range");
  o_a0->excludes(o_ratio);
  c_disp->add_option("--y", disp.y, "power-law exponent")->capture_default_str();
  c_disp->add_option("--f-min-hz", disp.f_min_hz, "lowest frequency [Hz]")->capture_default_str();
  c_disp->add_option("--f-max-hz", disp.f_max_hz, "highest frequency [Hz]")->capture_default_str();
  c_disp->add_option("--count", disp.count, "number of rows")->capture_default_str();
  c_disp->add_option("-o,--output", disp.output, "output CSV ('-' for stdout)")->capture_default_str();

  cli::SimulateArgs sim;
  double sim_y = 0.0, sim_alpha0 = 0.0, sim_cfl = 0.0;
  std::string sim_kind;
  auto* c_sim = app.add_subcommand("simulate", "run the 1-D lossy wave solver from a config file");
  c_sim->add_option("config", sim.config, "config file")->required();
  c_sim->add_option("-o,--output", sim.output, "sensor CSV ('-' for stdout)")->capture_default_str();
  c_sim->add_option("--manifest", sim.manifest, "run manifest path (default <output>.manifest)");
  auto* o_y = c_sim->add_option("--y", sim_y, "override medium.y");
  auto* o_sa0 = c_sim->add_option("--alpha0", sim_alpha0, "override medium.alpha0");
  auto* o_kind = c_sim->add_option("--loss-kind", sim_kind, "override medium.loss_kind (modified, szabo, lossless)");
  auto* o_cfl = c_sim->add_option("--cfl", sim_cfl, "override run.cfl");

  cli::VerifyArgs ver;
  std::string level = "quick";
  auto* c_ver = app.add_subcommand("verify", "run the acceptance checks and print a pass/fail table");
  c_ver->add_option("--level", level, "quick (operator checks) or full (adds simulations)")
      ->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();
  // test hook, deliberately undocumented
  c_ver->add_option("--tolerance-scale", ver.tolerance_scale)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::config_error;
  }

  if (c_op->parsed()) return cli::cmd_operator(op, std::cerr);
  if (c_disp->parsed()) {
    if (o_a0->count()) disp.alpha0 = disp_alpha0;
    if (o_ratio->count()) disp.smallness_ratio = disp_ratio;
    return cli::cmd_dispersion(disp, std::cerr);
  }
  if (c_sim->parsed()) {
    return cli::guarded(std::cerr, [&] {
      if (o_y->count()) sim.overrides.y = sim_y;
      if (o_sa0->count()) sim.overrides.alpha0 = sim_alpha0;
      if (o_kind->count()) sim.overrides.loss_kind = loss_kind_from_string(sim_kind);
      if (o_cfl->count()) sim.overrides.cfl = sim_cfl;
      return cli::cmd_simulate(sim, std::cerr);
    });
  }
  ver.level = level == "full" ? acceptance::Level::full : acceptance::Level::quick;
  return cli::cmd_verify(ver, std::cout, std::cerr);
}
