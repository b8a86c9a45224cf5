#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kslab/errors.hpp"
#include "kslab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"desk-scale laboratory for a chemotaxis system with logistic growth"};
  app.require_subcommand(1);

  std::string config_path, run_dir;
  std::vector<std::string> dirs;
  std::vector<double> eps_list;
  std::vector<int> nx_list;
  int jobs = 0;

  auto* run = app.add_subcommand("run", "integrate one configuration and check every bound");
  run->add_option("config", config_path, "config file")->required();

  auto* sweep =
      app.add_subcommand("sweep", "run a family of configurations and compare the members");
  sweep->add_option("config", config_path, "config file")->required();
  sweep->add_option("--eps", eps_list, "regularization members (the limit run is added)");
  sweep->add_option("--nx", nx_list, "grid refinement members");
  sweep->add_option("--jobs", jobs, "worker cap (overrides KS_LAB_JOBS and the config)");

  auto* phi = app.add_subcommand("phi", "construct the weight and check its invariants");
  phi->add_option("config", config_path, "config file")->required();

  auto* verify = app.add_subcommand("verify", "re-hash artifacts and recompute the checks");
  verify->add_option("dir", run_dir, "run directory")->required();

  auto* report = app.add_subcommand("report", "print bound tables for run directories");
  report->add_option("dirs", dirs, "run or sweep directories")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) return kslab::cmd_run(config_path);
    if (app.got_subcommand(sweep)) return kslab::cmd_sweep(config_path, eps_list, nx_list, jobs);
    if (app.got_subcommand(phi)) return kslab::cmd_phi(config_path);
    if (app.got_subcommand(verify)) return kslab::cmd_verify(run_dir);
    if (app.got_subcommand(report)) return kslab::cmd_report(dirs);
  } catch (const kslab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const kslab::NumericalAbort& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 3;
  } catch (const kslab::ConstructionError& e) {
    std::fprintf(stderr, "weight construction failed: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
