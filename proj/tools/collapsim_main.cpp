#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "collapsim/commands.hpp"
#include "collapsim/config.hpp"

namespace cmd = collapsim::commands;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  std::string format;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("-c,--config", opts.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  sub->add_option("-s,--set", opts.overrides, "override one key, e.g. --set alpha2=0.5 (repeatable)");
  sub->add_option("-o,--output", opts.output, "output file (default: stdout or $COLLAPSIM_OUTPUT_DIR)");
  sub->add_option("-f,--format", opts.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

/// Config file text followed by the overrides, so later keys win.
collapsim::RunConfig load(const CommonOptions& opts) {
  std::string text;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    if (!text.empty() && text.back() != '\n') text += '\n';
  }
  for (const std::string& kv : opts.overrides) text += kv + '\n';
  if (!opts.output.empty()) text += "output_path = " + opts.output + '\n';
  if (!opts.format.empty()) text += "output_format = " + opts.format + '\n';
  return collapsim::parse_config(text);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-time collapse coincidence simulator"};
  app.set_version_flag("--version", std::string(COLLAPSIM_VERSION));
  app.require_subcommand(1);

  CommonOptions common;
  CLI::App* analyze = app.add_subcommand("analyze", "closed-form and quadrature analytics for one configuration");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo batch plus significance test");
  CLI::App* sweep = app.add_subcommand("sweep", "analytics (optionally Monte Carlo) over a parameter grid");
  CLI::App* plan = app.add_subcommand("plan", "required trial count and laboratory duration");
  CLI::App* verify = app.add_subcommand("verify", "cross-checks between analytics, quadrature and Monte Carlo");
  CLI::App* config = app.add_subcommand("config", "print the fully resolved configuration");
  for (CLI::App* sub : {analyze, simulate, sweep, plan, verify, config}) add_common(sub, common);

  std::string axis;
  std::vector<double> grid;
  bool sweep_mc = false;
  sweep->add_option("--axis", axis, "delta_t, alpha2, T or lambda_rate")->required();
  sweep->add_option("--grid", grid, "grid values (times in fs)")->delimiter(',');
  sweep->add_flag("--mc", sweep_mc, "run a Monte Carlo batch at every grid point");

  double k_sigma = 6.0;
  plan->add_option("-k,--k-sigma", k_sigma, "significance in standard deviations");

  cmd::VerifyOptions verify_opts;
  verify->add_option("--tolerance-scale", verify_opts.tolerance_scale, "multiply every tolerance (test hook)")
      ->group("");
  verify->add_option("--replay-trials", verify_opts.replay_trials, "trials for the determinism checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cmd::kExitUsage;
  }

  const cmd::CommandIo io{std::cout, std::cerr};
  collapsim::RunConfig cfg;
  if (const int rc = cmd::guarded(io, [&] {
        cfg = load(common);
        return 0;
      });
      rc != 0) {
    return rc;
  }

  if (*analyze) return cmd::cmd_analyze(cfg, io);
  if (*simulate) return cmd::cmd_simulate(cfg, io);
  if (*sweep) return cmd::cmd_sweep(cfg, axis, grid, sweep_mc, io);
  if (*plan) return cmd::cmd_plan(cfg, k_sigma, io);
  if (*verify) return cmd::cmd_verify(cfg, verify_opts, io);
  std::cout << collapsim::emit_config(cfg);
  return cmd::kExitOk;
}
