#include "dap/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

namespace dap {

namespace {

using nlohmann::json;

int line_of_byte(const std::string& text, size_t byte) {
  int line = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

[[noreturn]] void fail(const std::string& message, const std::string& where) {
  throw ConfigError(where + ": " + message, 0, where);
}

const json& require(const json& parent, const char* key,
                    const std::string& where) {
  auto it = parent.find(key);
  if (it == parent.end()) fail(std::string("missing key '") + key + "'", where);
  return *it;
}

Eigen::VectorXd to_vector(const json& j, const std::string& where) {
  if (!j.is_array()) fail("expected an array of numbers", where);
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Eigen::MatrixXd to_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail("expected a matrix (array of rows)", where);
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) fail("ragged matrix rows", where);
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

SimpleSet parse_simple_set(const json& j, const std::string& where) {
  const std::string kind = require(j, "kind", where).get<std::string>();
  if (kind == "full_space") {
    return SimpleSet::full_space(require(j, "dimension", where).get<int>());
  }
  if (kind == "box") {
    return SimpleSet::box(to_vector(require(j, "lower", where), where),
                          to_vector(require(j, "upper", where), where));
  }
  if (kind == "ball") {
    return SimpleSet::ball(to_vector(require(j, "center", where), where),
                           require(j, "radius", where).get<double>());
  }
  if (kind == "simplex") {
    return SimpleSet::simplex(require(j, "dimension", where).get<int>(),
                              require(j, "scale", where).get<double>());
  }
  fail("unknown set kind '" + kind + "'", where);
}

std::shared_ptr<const ObjectiveOracle> parse_objective(const json& j,
                                                       const std::string& where) {
  const std::string kind = require(j, "kind", where).get<std::string>();
  if (kind == "linear") {
    return std::make_shared<LinearObjective>(
        to_vector(require(j, "gradient", where), where));
  }
  if (kind == "abs_deviation") {
    return std::make_shared<AbsDeviationObjective>(
        to_vector(require(j, "target", where), where));
  }
  if (kind == "squared_distance") {
    return std::make_shared<SquaredDistanceObjective>(
        to_vector(require(j, "center", where), where));
  }
  if (kind == "zero") {
    return std::make_shared<ZeroObjective>(
        require(j, "dimension", where).get<int>());
  }
  fail("unknown objective kind '" + kind + "'", where);
}

void parse_constraint_into(ConstraintSet& family, const json& j, int dim,
                           const std::string& where) {
  const std::string type = require(j, "type", where).get<std::string>();
  if (type == "linear_block") {
    family.push_back(std::make_shared<LinearBlockConstraint>(
        to_matrix(require(j, "a", where), where),
        to_vector(require(j, "b", where), where)));
    return;
  }
  if (type == "lmi") {
    const json& mats = require(j, "matrices", where);
    std::vector<Eigen::MatrixXd> coeff;
    for (const auto& m : mats) coeff.push_back(to_matrix(m, where));
    family.push_back(std::make_shared<LmiConstraint>(std::move(coeff)));
    return;
  }
  if (type == "robust_linear") {
    RngStream rng(j.value("scenario_seed", std::uint64_t{0}), 0x5ce7a510);
    auto scenarios = robust_linear_scenarios(
        to_matrix(require(j, "a0", where), where),
        to_vector(require(j, "b0", where), where),
        require(j, "r1", where).get<double>(),
        require(j, "r2", where).get<double>(),
        require(j, "scenarios", where).get<int>(), rng);
    family.insert(family.end(), scenarios.begin(), scenarios.end());
    return;
  }
  if (type == "distance") {
    SimpleSet target = parse_simple_set(require(j, "set", where), where);
    std::vector<int> indices;
    if (j.contains("indices")) {
      for (const auto& idx : j["indices"]) indices.push_back(idx.get<int>());
    }
    if (indices.empty()) {
      family.push_back(std::make_shared<DistanceConstraint>(std::move(target)));
    } else {
      family.push_back(std::make_shared<DistanceConstraint>(
          std::move(target), std::move(indices), dim));
    }
    return;
  }
  fail("unknown constraint type '" + type + "'", where);
}

ProblemSpec parse_inline_problem(const json& j) {
  const std::string where = "problem";
  ProblemSpec problem;
  problem.name = j.value("name", std::string("inline"));
  problem.dimension = require(j, "dimension", where).get<int>();
  problem.x0 = parse_simple_set(require(j, "x0", where), where);
  problem.linear_objective = true;
  for (const auto& agent : require(j, "agents", where)) {
    auto objective = parse_objective(require(agent, "objective", where), where);
    problem.linear_objective =
        problem.linear_objective && objective->is_linear();
    problem.objectives.push_back(std::move(objective));
    ConstraintSet family;
    if (agent.contains("constraints")) {
      for (const auto& c : agent["constraints"]) {
        parse_constraint_into(family, c, problem.dimension, where);
      }
    }
    problem.constraint_sets.push_back(std::move(family));
  }
  if (j.contains("epigraph") && j["epigraph"].get<bool>()) {
    problem = epigraph_transform(problem);
  }
  return problem;
}

DigraphSequence parse_topology(const json& j) {
  const std::string where = "topology";
  const std::string kind = require(j, "kind", where).get<std::string>();
  if (kind == "periodic") {
    const int n = require(j, "n", where).get<int>();
    std::vector<std::vector<DigraphSequence::Edge>> phases;
    for (const auto& phase : require(j, "schedule", where)) {
      std::vector<DigraphSequence::Edge> edges;
      for (const auto& e : phase) {
        if (e.size() != 2) fail("edge must be a [from, to] pair", where);
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
      phases.push_back(std::move(edges));
    }
    return DigraphSequence::periodic(n, phases);
  }
  return builtin_topology(topology_from_string(kind),
                          require(j, "n", where).get<int>());
}

json canonical_document(const Experiment& e) {
  json doc;
  doc["problem"] = e.document["problem"];
  doc["topology"] = e.document["topology"];
  doc["weights"] = {{"scheme", to_string(e.scheme)}};
  doc["stepsize"] = {{"a", e.stepsize.a}, {"b", e.stepsize.b},
                     {"gamma", e.stepsize.gamma}};
  doc["run"] = {{"seed", e.seed},
                {"max_rounds", e.max_rounds},
                {"repeats", e.repeats},
                {"consensus_rel_tol", e.termination.consensus_rel_tol},
                {"feasibility_tol", e.termination.feasibility_tol},
                {"local_average", e.termination.local_average},
                {"metric_stride", e.metric_stride}};
  doc["output"] = {{"trace_path", e.trace_path},
                   {"summary_path", e.summary_path}};
  return doc;
}

}  // namespace

Experiment parse_experiment(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError("parse error at line " +
                          std::to_string(line_of_byte(text, err.byte)) + ": " +
                          err.what(),
                      line_of_byte(text, err.byte), "document");
  }

  Experiment e;
  const json& topo = require(doc, "topology", "document");
  e.topology = parse_topology(topo);
  e.document["topology"] = topo;

  const json& problem = require(doc, "problem", "document");
  if (problem.is_string()) {
    const std::string name = problem.get<std::string>();
    if (name == "gossip") {
      e.problem = gossip_sdp_problem(e.topology);
    } else if (name.rfind("builtin:", 0) == 0) {
      e.problem = builtin_test_problem(name.substr(8));
    } else {
      fail("unknown problem '" + name + "'", "problem");
    }
  } else if (problem.is_object()) {
    e.problem = parse_inline_problem(problem);
  } else {
    fail("problem must be a name or an object", "problem");
  }
  e.document["problem"] = problem;

  if (doc.contains("weights")) {
    e.scheme = weight_scheme_from_string(
        require(doc["weights"], "scheme", "weights").get<std::string>());
  }
  if (doc.contains("stepsize")) {
    const json& s = doc["stepsize"];
    e.stepsize.a = s.value("a", 1.0);
    e.stepsize.b = s.value("b", 1.0);
    e.stepsize.gamma = s.value("gamma", 1.0);
  }
  e.stepsize.validate();
  if (doc.contains("run")) {
    const json& r = doc["run"];
    e.seed = r.value("seed", 1ULL);
    e.max_rounds = r.value("max_rounds", 50000L);
    e.repeats = r.value("repeats", 1);
    e.termination.consensus_rel_tol = r.value("consensus_rel_tol", 1e-4);
    e.termination.feasibility_tol = r.value("feasibility_tol", 1e-3);
    e.termination.local_average = r.value("local_average", false);
    e.metric_stride = r.value("metric_stride", 10);
  }
  if (e.repeats < 1) fail("repeats must be >= 1", "run");
  if (doc.contains("output")) {
    const json& o = doc["output"];
    e.trace_path = o.value("trace_path", e.trace_path);
    e.summary_path = o.value("summary_path", e.summary_path);
  }

  if (e.problem.agent_count() != e.topology.node_count()) {
    fail("problem has " + std::to_string(e.problem.agent_count()) +
             " agents but topology has " +
             std::to_string(e.topology.node_count()) + " nodes",
         "topology");
  }
  e.document = canonical_document(e);
  return e;
}

std::string serialize_experiment(const Experiment& experiment) {
  return experiment.document.dump(2) + "\n";
}

RunConfig Experiment::run_config(std::uint64_t run_seed) const {
  RunConfig config;
  config.problem = &problem;
  config.topology = topology;
  config.scheme = scheme;
  config.stepsize = stepsize;
  config.seed = run_seed;
  config.max_rounds = max_rounds;
  config.termination = termination;
  config.metric_stride = metric_stride;
  return config;
}

// ---------------------------------------------------------------------------
// SHA-1, as git hashes a blob: sha1("blob <len>\0" + content)

namespace {

struct Sha1 {
  std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                        0xC3D2E1F0u};
  std::uint64_t total = 0;
  unsigned char block[64];
  size_t fill = 0;

  static std::uint32_t rol(std::uint32_t x, int s) {
    return (x << s) | (x >> (32 - s));
  }

  void process() {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i) {
      w[i] = (std::uint32_t(block[4 * i]) << 24) |
             (std::uint32_t(block[4 * i + 1]) << 16) |
             (std::uint32_t(block[4 * i + 2]) << 8) |
             std::uint32_t(block[4 * i + 3]);
    }
    for (int i = 16; i < 80; ++i) {
      w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      const std::uint32_t t = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = t;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  void update(const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    total += len;
    while (len > 0) {
      const size_t take = std::min(len, sizeof(block) - fill);
      std::copy(p, p + take, block + fill);
      fill += take;
      p += take;
      len -= take;
      if (fill == sizeof(block)) {
        process();
        fill = 0;
      }
    }
  }

  std::string finish() {
    const std::uint64_t bits = total * 8;
    const unsigned char one = 0x80;
    update(&one, 1);
    const unsigned char zero = 0x00;
    while (fill != 56) update(&zero, 1);
    unsigned char len_be[8];
    for (int i = 0; i < 8; ++i) len_be[i] = (bits >> (56 - 8 * i)) & 0xFF;
    update(len_be, 8);
    std::string hex;
    for (std::uint32_t word : h) {
      for (int shift = 28; shift >= 0; shift -= 4) {
        hex.push_back("0123456789abcdef"[(word >> shift) & 0xF]);
      }
    }
    return hex;
  }
};

}  // namespace

std::string git_blob_sha1(const std::string& content) {
  Sha1 sha;
  const std::string header = "blob " + std::to_string(content.size());
  sha.update(header.data(), header.size() + 1);  // includes the NUL
  sha.update(content.data(), content.size());
  return sha.finish();
}

int thread_cap() {
  if (const char* env = std::getenv("DAP_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---------------------------------------------------------------------------
// commands

namespace {

struct RepeatOutcome {
  std::uint64_t seed = 0;
  bool converged = false;
  long rounds = 0;
  double final_objective = 0.0;
  double final_consensus_error = 0.0;
  double final_total_violation = 0.0;
  std::string trace_file;
};

// Runs `jobs` indexed tasks on up to thread_cap() workers. Each task must be
// independent; results land in pre-sized slots so scheduling order cannot
// matter.
void parallel_for(int jobs, const std::function<void(int)>& task) {
  const int workers = std::min(jobs, thread_cap());
  if (workers <= 1) {
    for (int j = 0; j < jobs; ++j) task(j);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int j = next.fetch_add(1); j < jobs; j = next.fetch_add(1)) task(j);
    });
  }
  for (auto& t : pool) t.join();
}

RepeatOutcome execute_repeat(const Experiment& experiment, std::uint64_t seed,
                             const std::filesystem::path& trace_file,
                             bool measure_wallclock) {
  const RunConfig config = experiment.run_config(seed);
  const RunResult result = run(config);

  RepeatOutcome outcome;
  outcome.seed = seed;
  outcome.converged = result.converged;
  outcome.rounds = result.rounds;
  outcome.final_objective = experiment.problem.objective_value(result.mean_final);
  if (!result.trace.rows.empty()) {
    outcome.final_consensus_error = result.trace.rows.back().consensus_error;
    outcome.final_total_violation = result.trace.rows.back().total_violation;
  }
  outcome.trace_file = trace_file.string();

  std::ofstream out(trace_file);
  if (!out) throw std::runtime_error("cannot write " + trace_file.string());
  write_trace_csv(out, result.trace,
                  measure_wallclock ? result.wallclock_ms
                                    : std::vector<double>{});
  return outcome;
}

json outcome_json(const RepeatOutcome& o) {
  return {{"seed", o.seed},
          {"converged", o.converged},
          {"rounds", o.rounds},
          {"final_objective", o.final_objective},
          {"final_consensus_error", o.final_consensus_error},
          {"final_total_violation", o.final_total_violation},
          {"trace_file", o.trace_file}};
}

json rounds_stats(const std::vector<RepeatOutcome>& outcomes) {
  double mean = 0.0;
  long lo = std::numeric_limits<long>::max(), hi = 0;
  for (const auto& o : outcomes) {
    mean += static_cast<double>(o.rounds);
    lo = std::min(lo, o.rounds);
    hi = std::max(hi, o.rounds);
  }
  mean /= static_cast<double>(outcomes.size());
  return {{"mean", mean}, {"min", lo}, {"max", hi}};
}

Experiment load_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path, 0, "document");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_experiment(text);
}

}  // namespace

int cmd_run(const std::string& config_path, const RunOverrides& overrides) {
  Experiment experiment;
  try {
    experiment = load_experiment_file(config_path);
    if (overrides.seed) experiment.seed = *overrides.seed;
    if (overrides.max_rounds) experiment.max_rounds = *overrides.max_rounds;
    if (overrides.out_dir) {
      const std::filesystem::path dir(*overrides.out_dir);
      experiment.trace_path =
          (dir / std::filesystem::path(experiment.trace_path).filename())
              .string();
      experiment.summary_path =
          (dir / std::filesystem::path(experiment.summary_path).filename())
              .string();
    }
    experiment.document = canonical_document(experiment);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  }

  const std::string config_text = serialize_experiment(experiment);
  const std::string config_hash = git_blob_sha1(config_text);

  std::filesystem::path trace_base(experiment.trace_path);
  if (trace_base.has_parent_path()) {
    std::filesystem::create_directories(trace_base.parent_path());
  }
  std::filesystem::path summary_file(experiment.summary_path);
  if (summary_file.has_parent_path()) {
    std::filesystem::create_directories(summary_file.parent_path());
  }

  std::vector<RepeatOutcome> outcomes(experiment.repeats);
  std::vector<std::string> errors(experiment.repeats);
  parallel_for(experiment.repeats, [&](int r) {
    const std::uint64_t seed = experiment.seed + static_cast<std::uint64_t>(r);
    auto file = trace_base;
    file += "_seed" + std::to_string(seed) + ".csv";
    try {
      outcomes[r] =
          execute_repeat(experiment, seed, file, overrides.measure_wallclock);
    } catch (const std::exception& err) {
      errors[r] = err.what();
    }
  });
  for (const auto& err : errors) {
    if (!err.empty()) {
      std::cerr << "run error: " << err << "\n";
      return 1;
    }
  }

  json summary;
  summary["config"] = experiment.document;
  summary["config_hash"] = config_hash;
  summary["problem_notes"] = experiment.problem.notes;
  summary["runs"] = json::array();
  bool all_converged = true;
  for (const auto& o : outcomes) {
    summary["runs"].push_back(outcome_json(o));
    all_converged = all_converged && o.converged;
  }
  summary["rounds_to_convergence"] = rounds_stats(outcomes);
  summary["all_converged"] = all_converged;

  std::ofstream out(summary_file);
  if (!out) {
    std::cerr << "cannot write " << summary_file << "\n";
    return 1;
  }
  out << summary.dump(2) << "\n";

  std::cout << "runs: " << outcomes.size() << "  converged: "
            << (all_converged ? "all" : "NOT all") << "  mean rounds: "
            << summary["rounds_to_convergence"]["mean"] << "\n";
  return all_converged ? 0 : 2;
}

int cmd_table1(int repeats, const std::string& out_dir, long max_rounds) {
  if (repeats < 1) {
    std::cerr << "repeats must be >= 1\n";
    return 1;
  }
  const std::vector<int> sizes{4, 15};
  const std::vector<Topology> topologies{Topology::kClique, Topology::kCycle,
                                         Topology::kStar};

  struct Cell {
    int n;
    Topology kind;
    ProblemSpec problem;
    DigraphSequence graph = builtin_topology(Topology::kClique, 1);
    std::vector<long> rounds;
    std::vector<bool> converged;
  };
  std::vector<Cell> cells;
  for (int n : sizes) {
    for (Topology kind : topologies) {
      Cell cell{n, kind, {}, builtin_topology(kind, n), {}, {}};
      cell.problem = gossip_sdp_problem(cell.graph);
      cell.rounds.resize(repeats);
      cell.converged.resize(repeats);
      cells.push_back(std::move(cell));
    }
  }

  const int jobs = static_cast<int>(cells.size()) * repeats;
  parallel_for(jobs, [&](int job) {
    Cell& cell = cells[job / repeats];
    const int r = job % repeats;
    RunConfig config;
    config.problem = &cell.problem;
    config.topology = cell.graph;
    config.scheme = WeightScheme::kMetropolis;
    config.seed = 1 + static_cast<std::uint64_t>(r);
    config.max_rounds = max_rounds;
    const RunResult result = run(config);
    cell.rounds[r] = result.rounds;
    cell.converged[r] = result.converged;
  });

  json summary;
  summary["repeats"] = repeats;
  summary["max_rounds"] = max_rounds;
  summary["weights"] = "metropolis";
  summary["cells"] = json::array();

  std::printf("mean rounds to convergence over %d seeds\n", repeats);
  std::printf("%-6s %10s %10s %10s\n", "", "clique", "cycle", "star");
  bool all_converged = true;
  for (int row = 0; row < 2; ++row) {
    std::printf("N=%-4d", sizes[row]);
    for (int col = 0; col < 3; ++col) {
      const Cell& cell = cells[row * 3 + col];
      double mean = 0.0;
      bool cell_converged = true;
      for (int r = 0; r < repeats; ++r) {
        mean += static_cast<double>(cell.rounds[r]);
        cell_converged = cell_converged && cell.converged[r];
      }
      mean /= repeats;
      all_converged = all_converged && cell_converged;
      std::printf(" %9.0f%s", mean, cell_converged ? " " : "*");
      summary["cells"].push_back({{"n", cell.n},
                                  {"topology", to_string(cell.kind)},
                                  {"mean_rounds", mean},
                                  {"all_converged", cell_converged}});
    }
    std::printf("\n");
  }
  if (!all_converged) {
    std::printf("* some repeats hit max_rounds without converging\n");
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / "table1.json";
    std::ofstream out(path);
    out << summary.dump(2) << "\n";
  }
  return all_converged ? 0 : 2;
}

int cmd_validate(const std::string& config_path) {
  Experiment experiment;
  try {
    experiment = load_experiment_file(config_path);
  } catch (const std::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  }

  const RunConfig config = experiment.run_config(experiment.seed);
  const RegimeReport report = regime_check(config);

  auto line = [](const char* label, bool ok) {
    std::printf("%-52s %s\n", label, ok ? "pass" : "FAIL");
  };

  const DigraphSequence& topo = experiment.topology;
  bool a1_selected;
  if (experiment.scheme == WeightScheme::kMetropolis) {
    a1_selected = report.weights_doubly_stochastic;
    line("assumption 1 (a-c, doubly stochastic, metropolis)", a1_selected);
  } else {
    const WeightMatrix w = equal_neighbor_weights(topo, 0);
    const auto a1 = validate_assumption1(w, topo, 0);
    a1_selected = a1.graph_respected && a1.nu_bound && a1.row_stochastic;
    line("assumption 1 (a,b,row; equal-neighbor)", a1_selected);
    line("  column stochasticity (informational)", a1.column_stochastic);
  }
  line("assumption 5 (Q-strong connectivity)", report.prop1_connectivity_q > 0);
  if (report.prop1_connectivity_q > 0) {
    std::printf("  smallest passing Q: %d\n", report.prop1_connectivity_q);
  }
  line("proposition 1 hypotheses", report.prop1);
  line("proposition 2 hypotheses", report.prop2);
  for (const auto& warning : report.warnings) {
    std::printf("warning: %s\n", warning.c_str());
  }
  return report.selected_pass ? 0 : 2;
}

}  // namespace dap
