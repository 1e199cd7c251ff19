#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "dap/oracle.hpp"
#include "dap/problems.hpp"
#include "dap/simulator.hpp"

namespace dap {

// Thrown for malformed or inconsistent experiment configs. line == 0 means
// the problem is semantic rather than syntactic; `where` then carries the
// offending section.
struct ConfigError : std::runtime_error {
  ConfigError(std::string message, int line_number, std::string section)
      : std::runtime_error(std::move(message)), line(line_number),
        where(std::move(section)) {}
  int line;
  std::string where;
};

// A fully resolved experiment: defaults filled in, problem and topology
// constructed. `document` is the canonical form that serializes back to an
// identical config.
struct Experiment {
  nlohmann::json document;
  ProblemSpec problem;
  DigraphSequence topology = builtin_topology(Topology::kClique, 1);
  WeightScheme scheme = WeightScheme::kMetropolis;
  StepSizeSchedule stepsize;
  std::uint64_t seed = 1;
  long max_rounds = 50000;
  int repeats = 1;
  TerminationRule termination;
  int metric_stride = 10;
  std::string trace_path = "out/trace";
  std::string summary_path = "out/summary.json";

  RunConfig run_config(std::uint64_t run_seed) const;
};

Experiment parse_experiment(const std::string& text);
std::string serialize_experiment(const Experiment& experiment);

// SHA-1 of the git blob header plus content, hex encoded.
std::string git_blob_sha1(const std::string& content);

// Worker cap for parallel repeats; reads DAP_THREADS, falling back to the
// hardware count.
int thread_cap();

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> max_rounds;
  std::optional<std::string> out_dir;
  bool measure_wallclock = false;  // keep traces deterministic by default
};

// Exit codes: 0 all runs converged, 1 config error, 2 some run failed to
// converge.
int cmd_run(const std::string& config_path, const RunOverrides& overrides);
int cmd_table1(int repeats, const std::string& out_dir, long max_rounds);
int cmd_validate(const std::string& config_path);

}  // namespace dap
