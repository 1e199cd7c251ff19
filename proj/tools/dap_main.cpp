// Experiment runner for the decentralized approximate-projection solver.
//
//   dap run --config cfg.json [--seed S] [--max-rounds K] [--out DIR] [--time]
//   dap table1 [--repeats R] [--out DIR] [--max-rounds K]
//   dap validate --config cfg.json
//
// DAP_THREADS caps how many repeats execute in parallel.

#include <CLI11.hpp>

#include "dap/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"decentralized approximate projection experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  dap::RunOverrides overrides;
  std::uint64_t seed = 0;
  long max_rounds = 0;
  std::string out_dir;

  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("--config", config_path, "experiment config file")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed, "override master seed");
  CLI::Option* rounds_opt =
      run->add_option("--max-rounds", max_rounds, "override round budget");
  CLI::Option* out_opt = run->add_option("--out", out_dir, "output directory");
  run->add_flag("--time", overrides.measure_wallclock,
                "fill the wallclock_ms trace column with measured times "
                "(makes traces non-reproducible)");

  int repeats = 10;
  std::string table_out;
  long table_rounds = 100000;
  CLI::App* table1 =
      app.add_subcommand("table1", "gossip study: {4,15} x {clique,cycle,star}");
  table1->add_option("--repeats", repeats, "seeds per cell (default 10)");
  table1->add_option("--out", table_out, "directory for table1.json");
  table1->add_option("--max-rounds", table_rounds,
                     "round budget per run (default 100000)");

  std::string validate_path;
  CLI::App* validate =
      app.add_subcommand("validate", "check assumptions without simulating");
  validate->add_option("--config", validate_path, "experiment config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (*seed_opt) overrides.seed = seed;
    if (*rounds_opt) overrides.max_rounds = max_rounds;
    if (*out_opt) overrides.out_dir = out_dir;
    return dap::cmd_run(config_path, overrides);
  }
  if (table1->parsed()) {
    return dap::cmd_table1(repeats, table_out, table_rounds);
  }
  return dap::cmd_validate(validate_path);
}
