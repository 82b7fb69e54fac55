// brdlab: sample random normal-form games, run best-response dynamics under
// clockwork or random playing sequences, evaluate the closed-form results,
// and enumerate small shapes exactly.
//
// Subcommands: simulate, exact, trace, couple, oracle. Exit codes: 0 success,
// 1 usage/configuration error, 2 violated internal invariant.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "brd/analytics.hpp"
#include "brd/coupling.hpp"
#include "brd/csv.hpp"
#include "brd/dynamics.hpp"
#include "brd/montecarlo.hpp"
#include "brd/oracle.hpp"
#include "brd/sampling.hpp"

using nlohmann::json;

namespace {

constexpr int kCsvSchemaVersion = 1;

std::uint64_t parse_seed(const std::string& text) {
  std::size_t pos = 0;
  const int base = text.rfind("0x", 0) == 0 || text.rfind("0X", 0) == 0 ? 16 : 10;
  const std::uint64_t value = std::stoull(text, &pos, base);
  if (pos != text.size())
    throw brd::ConfigError("invalid seed: " + text);
  return value;
}

std::string m_list_string(const brd::GameShape& shape) {
  std::string out;
  for (int i = 0; i < shape.players(); ++i) {
    if (i) out += 'x';
    out += std::to_string(shape.actions(i));
  }
  return out;
}

brd::GameShape shape_from_flags(int n, const std::vector<int>& m) {
  if (m.empty()) throw brd::ConfigError("--m is required");
  if (n == 0) n = static_cast<int>(m.size());
  if (m.size() == 1) return brd::GameShape(n, std::vector<int>(n, m[0]));
  return brd::GameShape(n, m);
}

brd::SequenceKind parse_sequence(const std::string& name) {
  if (name == "clockwork") return brd::SequenceKind::clockwork;
  if (name == "random") return brd::SequenceKind::random;
  throw brd::ConfigError("unknown sequence kind: " + name);
}

brd::Estimand parse_estimand(const std::string& name) {
  for (auto e : {brd::Estimand::converged_to_pne, brd::Estimand::converged_given_pne_exists,
                 brd::Estimand::pne_exists, brd::Estimand::pne_count,
                 brd::Estimand::cycle_length, brd::Estimand::hit_time_mean,
                 brd::Estimand::survival_beyond})
    if (name == brd::estimand_name(e)) return e;
  throw brd::ConfigError("unknown estimand: " + name);
}

int env_threads() {
  const char* v = std::getenv("BRDLAB_THREADS");
  if (!v) return 0;
  return std::atoi(v);
}

std::unique_ptr<std::ofstream> open_output(const std::string& path) {
  auto out = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*out) throw brd::ConfigError("cannot open output file: " + path);
  return out;
}

json config_json(const brd::ExperimentConfig& cfg) {
  return json{{"n", cfg.shape.players()},
              {"m", cfg.shape.action_counts()},
              {"q", cfg.shape.q()},
              {"sequence", cfg.sequence == brd::SequenceKind::clockwork ? "clockwork" : "random"},
              {"estimand", brd::estimand_name(cfg.estimand)},
              {"k", cfg.param_k},
              {"t", cfg.param_t},
              {"batches", cfg.batches},
              {"games_per_batch", cfg.games_per_batch},
              {"seed", cfg.master_seed}};
}

brd::ExperimentConfig config_from_json(const json& j) {
  std::vector<int> m = j.at("m").get<std::vector<int>>();
  const int n = j.contains("n") ? j.at("n").get<int>() : static_cast<int>(m.size());
  brd::ExperimentConfig cfg{brd::GameShape(n, std::move(m))};
  if (j.contains("sequence")) cfg.sequence = parse_sequence(j.at("sequence").get<std::string>());
  if (j.contains("estimand")) cfg.estimand = parse_estimand(j.at("estimand").get<std::string>());
  if (j.contains("k")) cfg.param_k = j.at("k").get<int>();
  if (j.contains("t")) cfg.param_t = j.at("t").get<std::uint64_t>();
  if (j.contains("batches")) cfg.batches = j.at("batches").get<int>();
  if (j.contains("games_per_batch")) cfg.games_per_batch = j.at("games_per_batch").get<int>();
  if (j.contains("seed")) {
    if (j.at("seed").is_string())
      cfg.master_seed = parse_seed(j.at("seed").get<std::string>());
    else
      cfg.master_seed = j.at("seed").get<std::uint64_t>();
  }
  return cfg;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int n = 0;
  std::vector<int> m;
  std::string sequence = "clockwork";
  std::string estimand = "converged_to_pne";
  int k = 0;
  std::uint64_t t = 0;
  int batches = 10;
  int games = 1000;
  std::string seed = "0";
  std::string config_path;
  int figure = 0;
  std::string out_path;
  std::string summary_path;
  int threads = 0;
};

int run_simulate(const SimulateArgs& args) {
  std::vector<brd::ExperimentConfig> configs;
  if (args.figure == 2) {
    configs = brd::figure2_grid(parse_seed(args.seed));
  } else if (args.figure == 3) {
    configs = brd::figure3_grid(parse_seed(args.seed));
  } else if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw brd::ConfigError("cannot open config file: " + args.config_path);
    json j;
    in >> j;
    if (j.contains("experiments"))
      for (const auto& e : j.at("experiments")) configs.push_back(config_from_json(e));
    else
      configs.push_back(config_from_json(j));
  } else {
    brd::ExperimentConfig cfg{shape_from_flags(args.n, args.m)};
    cfg.sequence = parse_sequence(args.sequence);
    cfg.estimand = parse_estimand(args.estimand);
    cfg.param_k = args.k;
    cfg.param_t = args.t;
    cfg.batches = args.batches;
    cfg.games_per_batch = args.games;
    cfg.master_seed = parse_seed(args.seed);
    configs.push_back(std::move(cfg));
  }
  for (const auto& cfg : configs) cfg.validate();

  std::unique_ptr<std::ofstream> rows_file, summary_file;
  std::ostream* rows_out = &std::cout;
  std::ostream* summary_out = &std::cout;
  if (!args.out_path.empty()) {
    rows_file = open_output(args.out_path);
    rows_out = rows_file.get();
  }
  if (!args.summary_path.empty()) {
    summary_file = open_output(args.summary_path);
    summary_out = summary_file.get();
  }

  const int threads = args.threads > 0 ? args.threads : env_threads();

  brd::csv::Writer rows(*rows_out);
  rows.comment("brdlab simulate rows v" + std::to_string(kCsvSchemaVersion));
  brd::csv::Writer summary(*summary_out);
  summary.comment("brdlab simulate summary v" + std::to_string(kCsvSchemaVersion));
  rows.row({"n", "m_list", "q", "sequence", "estimand", "batch_id", "count", "frequency"});
  summary.row({"n", "m_list", "q", "sequence", "estimand", "batches", "games_per_batch",
               "seed", "mean", "std", "se"});

  for (const auto& cfg : configs) {
    rows.comment("config " + config_json(cfg).dump());
    const brd::ExperimentResult result = brd::run_experiment(cfg, threads);
    const std::string seq =
        cfg.sequence == brd::SequenceKind::clockwork ? "clockwork" : "random";
    for (const auto& row : result.rows) {
      rows.row({std::to_string(cfg.shape.players()), m_list_string(cfg.shape),
                std::to_string(cfg.shape.q()), seq, brd::estimand_name(cfg.estimand),
                std::to_string(row.batch_id), std::to_string(row.count),
                brd::csv::format_double(row.value)});
    }
    summary.row({std::to_string(cfg.shape.players()), m_list_string(cfg.shape),
                 std::to_string(cfg.shape.q()), seq, brd::estimand_name(cfg.estimand),
                 std::to_string(cfg.batches), std::to_string(cfg.games_per_batch),
                 std::to_string(cfg.master_seed),
                 brd::csv::format_double(result.stats.mean),
                 brd::csv::format_double(result.stats.stddev),
                 brd::csv::format_double(result.stats.se)});
  }
  return 0;
}

// ------------------------------------------------------------------- exact

struct ExactArgs {
  std::string formula;
  int n = 0;
  std::vector<int> m;
  int k = 1;
  std::uint64_t t = 1;
  double x = 1.0;
  int player = 1;
};

std::pair<int, int> two_player_actions(const std::vector<int>& m) {
  if (m.size() == 1) return {m[0], m[0]};
  if (m.size() == 2) return {m[0], m[1]};
  throw brd::ConfigError("this formula takes --m with one or two values");
}

int single_action_count(const std::vector<int>& m) {
  if (m.size() == 1) return m[0];
  if (m.size() == 2 && m[0] == m[1]) return m[0];
  throw brd::ConfigError("this formula takes a single action count");
}

int run_exact(const ExactArgs& args) {
  json out{{"schema", 1}, {"formula", args.formula}};
  json params, flags = json::object();
  json value;

  if (args.formula == "q") {
    const brd::GameShape shape = shape_from_flags(args.n, args.m);
    params = {{"n", shape.players()}, {"m", shape.action_counts()}};
    value = shape.q();
  } else if (args.formula == "eta") {
    const auto [m1, m2] = two_player_actions(args.m);
    params = {{"t", args.t}, {"m", {m1, m2}}};
    value = brd::analytics::eta(args.t, m1, m2);
  } else if (args.formula == "eq1" || args.formula == "cycle-at-time") {
    const auto [m1, m2] = two_player_actions(args.m);
    params = {{"k", args.k}, {"t", args.t}, {"m", {m1, m2}}};
    value = brd::analytics::prob_2k_cycle_at_t(args.k, args.t, m1, m2);
  } else if (args.formula == "eq2" || args.formula == "cycle") {
    const auto [m1, m2] = two_player_actions(args.m);
    params = {{"k", args.k}, {"m", {m1, m2}}};
    value = brd::analytics::prob_2k_cycle(args.k, m1, m2);
  } else if (args.formula == "pne-asymptotic") {
    const int m = single_action_count(args.m);
    params = {{"k", args.k}, {"m", m}};
    value = brd::analytics::pne_convergence_asymptotic(args.k, m);
  } else if (args.formula == "survival-asymptotic") {
    const int m = single_action_count(args.m);
    params = {{"x", args.x}, {"m", m}};
    const auto s = brd::analytics::no_cycle_survival_asymptotic(args.x, m);
    value = s.asymptotic;
    out["companion"] = {{"eta_exact", s.eta_exact}, {"t", s.t}};
  } else if (args.formula == "convergence-bounds") {
    const brd::GameShape shape = shape_from_flags(args.n, args.m);
    params = {{"n", shape.players()}, {"m", shape.action_counts()}};
    const auto b = brd::analytics::convergence_bounds(shape);
    value = {{"lower", b.lower}, {"upper", b.upper}};
    flags = {{"lower_vacuous", b.lower_vacuous}, {"upper_vacuous", b.upper_vacuous}};
  } else if (args.formula == "hit-after-bound") {
    const brd::GameShape shape = shape_from_flags(args.n, args.m);
    params = {{"n", shape.players()}, {"m", shape.action_counts()}, {"t", args.t}};
    value = brd::analytics::hit_after_t_bound(shape, args.t);
  } else if (args.formula == "hit-by-bounds") {
    const brd::GameShape shape = shape_from_flags(args.n, args.m);
    params = {{"n", shape.players()}, {"m", shape.action_counts()}, {"t", args.t}};
    const auto b = brd::analytics::hit_by_t_bounds(shape, args.t);
    value = {{"lower", b.lower}, {"upper", b.upper}};
    flags = {{"lower_vacuous", b.lower_vacuous}, {"upper_vacuous", b.upper_vacuous}};
  } else if (args.formula == "distinct-env-bounds") {
    const brd::GameShape shape = shape_from_flags(args.n, args.m);
    params = {{"n", shape.players()}, {"m", shape.action_counts()},
              {"player", args.player}, {"t", args.t}};
    const auto d = brd::analytics::distinct_env_bounds(shape, args.player - 1, args.t);
    value = {{"lower", d.bounds.lower}, {"upper", d.bounds.upper}, {"exact", d.exact}};
    flags = {{"lower_vacuous", d.bounds.lower_vacuous},
             {"upper_vacuous", d.bounds.upper_vacuous}};
    out["companion"] = {{"plays", d.plays}};
  } else if (args.formula == "phi") {
    params = {{"x", args.x}};
    value = brd::analytics::phi(args.x);
  } else if (args.formula == "pne-existence") {
    params = json::object();
    value = brd::analytics::pne_existence_asymptote();
  } else {
    throw brd::ConfigError("unknown formula: " + args.formula);
  }

  out["params"] = params;
  out["value"] = value;
  out["flags"] = flags;
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ------------------------------------------------------------------- trace

struct TraceArgs {
  int n = 0;
  std::vector<int> m;
  std::string sequence = "clockwork";
  std::string seed = "0";
  std::vector<int> start;
  bool print_table = false;
};

std::string profile_string(const brd::GameShape& shape, brd::ProfileIndex idx) {
  const auto a = shape.profile_at(idx);
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(a[i]);
  }
  return out;
}

int run_trace(const TraceArgs& args) {
  const brd::GameShape shape = shape_from_flags(args.n, args.m);
  const brd::SeedSpec seed{parse_seed(args.seed), 0, 0, brd::StreamPurpose::table};
  const brd::BestResponseTable table = brd::sample_best_response_table(shape, seed);

  brd::ProfileIndex a0;
  if (!args.start.empty()) {
    if (static_cast<int>(args.start.size()) != shape.players())
      throw brd::ConfigError("--start needs one action per player");
    for (int i = 0; i < shape.players(); ++i)
      if (args.start[i] < 1 || args.start[i] > shape.actions(i))
        throw brd::ConfigError("--start action out of range");
    a0 = shape.profile_index(args.start);
  } else {
    a0 = brd::sample_initial_profile(shape, seed);
  }

  if (args.print_table) {
    std::cout << "# best-response table (one line per player, environment-index order)\n";
    std::istringstream lines(brd::to_text(table));
    std::string line;
    for (int i = 0; i < shape.players(); ++i) {
      std::getline(lines, line);
      std::cout << "# player " << (i + 1) << ": " << line << "\n";
    }
  }

  brd::TrajectoryRecord record;
  brd::Outcome outcome;
  if (parse_sequence(args.sequence) == brd::SequenceKind::clockwork) {
    outcome = brd::run_clockwork(table, a0, record);
  } else {
    const brd::ReachFlags reach = brd::reach_classification(table);
    outcome = brd::run_random_sequence(table, reach, a0, seed, record);
  }

  std::cout << "t\tplayer\tprofile_index\tprofile\n";
  std::cout << "0\t-\t" << record.initial << "\t" << profile_string(shape, record.initial)
            << "\n";
  for (const auto& step : record.steps)
    std::cout << step.t << "\t" << (step.player + 1) << "\t" << step.profile << "\t"
              << profile_string(shape, step.profile) << "\n";

  std::ostringstream summary;
  switch (outcome.kind) {
    case brd::OutcomeKind::pne_hit:
      summary << "outcome=pne_hit pne_hit_time=" << *outcome.pne_hit_time;
      break;
    case brd::OutcomeKind::cycle_hit:
      summary << "outcome=cycle_hit cycle_rounds=" << outcome.cycle_rounds;
      break;
    case brd::OutcomeKind::trap:
      summary << "outcome=trap";
      break;
  }
  if (outcome.cycle_entry_time) summary << " entry_time=" << *outcome.cycle_entry_time;
  if (outcome.env_repeat_time) summary << " env_repeat_time=" << *outcome.env_repeat_time;
  std::cout << "# " << summary.str() << "\n";
  return 0;
}

// ------------------------------------------------------------------ couple

struct CoupleArgs {
  int n = 0;
  std::vector<int> m;
  std::vector<int> sink;
  int runs = 1000;
  std::string seed = "0";
  std::string out_path;
};

int run_couple(const CoupleArgs& args) {
  const brd::GameShape shape = shape_from_flags(args.n, args.m);
  std::optional<brd::ProfileIndex> sink;
  if (!args.sink.empty()) {
    if (static_cast<int>(args.sink.size()) != shape.players())
      throw brd::ConfigError("--sink needs one action per player");
    sink = shape.profile_index(args.sink);
  }
  const std::uint64_t master = parse_seed(args.seed);

  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;
  if (!args.out_path.empty()) {
    file = open_output(args.out_path);
    os = file.get();
  }
  brd::csv::Writer w(*os);
  w.comment("brdlab couple v" + std::to_string(kCsvSchemaVersion));
  w.comment("shape " + m_list_string(shape) + " runs " + std::to_string(args.runs) +
            " seed " + std::to_string(master) +
            (sink ? " sink " + profile_string(shape, *sink) : std::string()));
  w.row({"run_id", "walk_env_repeat", "coupled_env_repeat", "outcome", "cycle_rounds",
         "entry_time", "sink_hit_time"});

  std::uint64_t pne = 0, cycles = 0, sink_hits = 0;
  double repeat_sum = 0;
  for (int r = 0; r < args.runs; ++r) {
    const brd::SeedSpec seed{master, 0, static_cast<std::uint64_t>(r),
                             brd::StreamPurpose::walk};
    const brd::CoupledRun run = sink ? brd::run_coupled_with_sink(shape, *sink, seed)
                                     : brd::run_coupled(shape, seed);
    if (run.outcome.kind == brd::OutcomeKind::pne_hit)
      ++pne;
    else
      ++cycles;
    if (run.sink_hit_time) ++sink_hits;
    repeat_sum += static_cast<double>(run.coupled_env_repeat);
    w.row({std::to_string(r), std::to_string(run.walk_env_repeat),
           std::to_string(run.coupled_env_repeat),
           run.outcome.kind == brd::OutcomeKind::pne_hit ? "pne_hit" : "cycle_hit",
           std::to_string(run.outcome.cycle_rounds),
           std::to_string(*run.outcome.cycle_entry_time),
           run.sink_hit_time ? std::to_string(*run.sink_hit_time) : std::string()});
  }
  const double n_runs = static_cast<double>(args.runs);
  w.comment("aggregate pne_frequency " + brd::csv::format_double(pne / n_runs));
  w.comment("aggregate cycle_frequency " + brd::csv::format_double(cycles / n_runs));
  w.comment("aggregate mean_env_repeat " + brd::csv::format_double(repeat_sum / n_runs));
  if (sink)
    w.comment("aggregate sink_hit_frequency " + brd::csv::format_double(sink_hits / n_runs));
  w.comment("aggregate repeat_time_mismatches 0");
  return 0;
}

// ------------------------------------------------------------------ oracle

struct OracleArgs {
  int n = 0;
  std::vector<int> m;
  std::uint64_t budget = 10'000'000;
};

int run_oracle_cmd(const OracleArgs& args) {
  const brd::GameShape shape = shape_from_flags(args.n, args.m);
  const brd::OracleResult result = brd::run_oracle(shape, args.budget);
  json cycles = json::array();
  for (const auto& [k, frac] : result.cycle_probabilities)
    cycles.push_back({{"k", k},
                      {"num", frac.num},
                      {"den", frac.den},
                      {"value", frac.value()}});
  const json out{{"schema", 1},
                 {"shape", {{"n", shape.players()}, {"m", shape.action_counts()}}},
                 {"tables", result.table_count},
                 {"runs", result.runs},
                 {"pne",
                  {{"num", result.pne_probability.num},
                   {"den", result.pne_probability.den},
                   {"value", result.pne_probability.value()}}},
                 {"cycles", cycles}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"best-response dynamics laboratory for random normal-form games"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run batched Monte Carlo experiments");
  simulate->add_option("--n", sim.n, "number of players (defaults to len(m))");
  simulate->add_option("--m", sim.m, "action counts (one value is broadcast)");
  simulate->add_option("--sequence", sim.sequence, "clockwork|random");
  simulate->add_option("--estimand", sim.estimand, "what to estimate per game");
  simulate->add_option("--k", sim.k, "cycle_length parameter");
  simulate->add_option("--t", sim.t, "survival_beyond parameter");
  simulate->add_option("--batches", sim.batches, "number of batches");
  simulate->add_option("--games", sim.games, "games per batch");
  simulate->add_option("--seed", sim.seed, "master seed (decimal or 0x hex)");
  simulate->add_option("--config", sim.config_path, "JSON config file");
  simulate->add_option("--figure", sim.figure, "run a built-in grid (2 or 3)");
  simulate->add_option("--out", sim.out_path, "per-batch rows CSV path (default stdout)");
  simulate->add_option("--summary", sim.summary_path, "summary CSV path (default stdout)");
  simulate->add_option("--threads", sim.threads, "worker threads (default BRDLAB_THREADS)");

  ExactArgs exact;
  auto* exact_cmd = app.add_subcommand("exact", "evaluate a closed-form quantity");
  exact_cmd->add_option("--formula", exact.formula, "formula id")->required();
  exact_cmd->add_option("--n", exact.n, "number of players");
  exact_cmd->add_option("--m", exact.m, "action counts");
  exact_cmd->add_option("--k", exact.k, "cycle parameter");
  exact_cmd->add_option("--t", exact.t, "time parameter");
  exact_cmd->add_option("--x", exact.x, "real argument");
  exact_cmd->add_option("--player", exact.player, "player (1-based)");

  TraceArgs trace;
  auto* trace_cmd = app.add_subcommand("trace", "print one trajectory as TSV");
  trace_cmd->add_option("--n", trace.n, "number of players");
  trace_cmd->add_option("--m", trace.m, "action counts");
  trace_cmd->add_option("--sequence", trace.sequence, "clockwork|random");
  trace_cmd->add_option("--seed", trace.seed, "seed (decimal or 0x hex)");
  trace_cmd->add_option("--start", trace.start, "initial profile (default: sampled)");
  trace_cmd->add_flag("--print-table", trace.print_table, "print the sampled table");

  CoupleArgs couple;
  auto* couple_cmd = app.add_subcommand("couple", "run the coupled walk/replay system");
  couple_cmd->add_option("--n", couple.n, "number of players");
  couple_cmd->add_option("--m", couple.m, "action counts");
  couple_cmd->add_option("--sink", couple.sink, "profile planted as a sink");
  couple_cmd->add_option("--runs", couple.runs, "number of runs");
  couple_cmd->add_option("--seed", couple.seed, "seed (decimal or 0x hex)");
  couple_cmd->add_option("--out", couple.out_path, "CSV path (default stdout)");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "exact probabilities by enumeration");
  oracle_cmd->add_option("--n", oracle.n, "number of players");
  oracle_cmd->add_option("--m", oracle.m, "action counts");
  oracle_cmd->add_option("--budget", oracle.budget, "max tables*profiles to enumerate");

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) return run_simulate(sim);
    if (exact_cmd->parsed()) return run_exact(exact);
    if (trace_cmd->parsed()) return run_trace(trace);
    if (couple_cmd->parsed()) return run_couple(couple);
    if (oracle_cmd->parsed()) return run_oracle_cmd(oracle);
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const brd::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
