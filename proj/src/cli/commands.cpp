#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "bmd/commands.hpp"
#include "bmd/errors.hpp"
#include "bmd/kernels.hpp"

namespace bmd {
namespace {

void apply_overrides(ExperimentConfig& cfg, const CommandOptions& opts) {
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.estimator) cfg.estimator = *opts.estimator;
  for (auto& s : cfg.scenarios) apply_overrides(s, opts);
}

ExperimentConfig load(const CommandOptions& opts) {
  ExperimentConfig cfg = load_config(opts.config);
  apply_overrides(cfg, opts);
  return cfg;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  return f;
}

void write_stats_json(std::ostream& out, const ReplicateResult& result, std::uint64_t seed) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  auto& runs = doc["runs"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const RunStats& s = result.runs[r].stats;
    nlohmann::ordered_json j;
    j["run_id"] = r;
    j["seed"] = seed + r;
    j["starvation_count"] = s.starvation;
    j["max_lag"] = s.max_lag;
    j["leftover_cache"] = s.cache_left;
    j["leftover_queue"] = s.queue_left;
    j["in_flight"] = s.in_flight;
    j["max_ghat_norm"] = s.max_ghat_norm;
    runs.push_back(std::move(j));
  }
  out << doc.dump(2) << '\n';
}

// Fills x* and Phi* from the oracle file when present.
void attach_oracle(RunConfig& rc, const ExperimentConfig& cfg, std::ostream& err) {
  if (cfg.oracle_path.empty() || !std::filesystem::exists(cfg.oracle_path)) {
    fmt::print(err, "warning: oracle file {} not found; rel_dist and potential_gap are nan\n",
               cfg.oracle_path.empty() ? "(none configured)" : "'" + cfg.oracle_path.string() + "'");
    return;
  }
  OracleFile o = read_oracle_file(cfg.oracle_path);
  if (o.x_star.size() != cfg.game->layout().total())
    throw ConfigError("oracle file '" + cfg.oracle_path.string() + "' does not match the game dimension");
  rc.x_star = std::move(o.x_star);
  if (!cfg.game->has_potential()) {
    fmt::print(err, "warning: {} game has no potential; potential_gap is nan\n", cfg.game_kind);
  } else if (!o.potential) {
    fmt::print(err, "warning: oracle file has no potential value; potential_gap is nan\n");
  } else {
    rc.phi_star = o.potential;
  }
}

void execute(const ExperimentConfig& cfg, const std::filesystem::path& csv, std::ostream& err) {
  RunConfig rc = cfg.run_config();
  attach_oracle(rc, cfg, err);
  const ReplicateResult result = replicate(rc, cfg.threads);
  {
    auto f = open_output(csv);
    write_trace_csv(f, result);
  }
  auto f = open_output(csv.string() + ".stats.json");
  write_stats_json(f, result, cfg.seed);
}

void print_report(std::ostream& out, const ExperimentConfig& cfg, const ValidationReport& report) {
  for (const auto& c : report.conditions)
    fmt::print(out, "  {} {:<24} {:<40} {}\n", c.passed ? "PASS" : "FAIL", c.id, c.inequality, c.detail);
  // Construction already rejected any ball that fails verification.
  fmt::print(out, "  PASS {:<24} {:<40} {} players, min radius {}\n", "interior_balls", "ball inside feasible set",
             cfg.game->players(), format_double(cfg.game->min_ball_radius()));
  if (cfg.schedule.alpha_delta <= 0.5)
    fmt::print(out, "  note: alpha_delta = {} is in the range used with single-point estimators; the "
                    "conditions above are the residual-estimator ones\n",
               format_double(cfg.schedule.alpha_delta));
  if (cfg.delay.kind == DelayKind::HeterogeneousBounded && cfg.delay.c == 0.0)
    fmt::print(out, "  note: delays bounded by the constant {}\n", format_double(cfg.delay.d_bar));
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

void write_trace_csv(std::ostream& out, const ReplicateResult& result) {
  out << kTraceHeader << '\n';
  for (std::size_t r = 0; r < result.runs.size(); ++r)
    for (const TraceRow& row : result.runs[r].trace)
      out << r << ',' << row.iteration << ',' << format_double(row.rel_dist) << ','
          << format_double(row.potential_gap) << ',' << format_double(row.ghat_norm) << ','
          << row.starved_players << ',' << format_double(row.wall_ms) << '\n';
}

void write_oracle_json(std::ostream& out, const std::string& game_kind, const OracleResult& r, double tol) {
  out << "{\n";
  out << "  \"schema_version\": " << kSchemaVersion << ",\n";
  out << "  \"game\": \"" << game_kind << "\",\n";
  out << "  \"x_star\": [";
  for (std::size_t i = 0; i < r.x_star.size(); ++i) out << (i ? ", " : "") << format_double(r.x_star[i]);
  out << "],\n";
  out << "  \"potential\": " << (r.potential ? format_double(*r.potential) : "null") << ",\n";
  out << "  \"vi_residual\": " << format_double(r.vi_residual) << ",\n";
  out << "  \"tol\": " << format_double(tol) << ",\n";
  out << "  \"step\": " << format_double(r.step) << ",\n";
  out << "  \"iterations\": " << r.iterations << "\n";
  out << "}\n";
}

OracleFile read_oracle_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read oracle file '" + path.string() + "'");
  try {
    const auto doc = nlohmann::json::parse(in);
    OracleFile o;
    o.x_star = doc.at("x_star").get<Vector>();
    if (doc.contains("potential") && !doc.at("potential").is_null()) o.potential = doc.at("potential").get<double>();
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed oracle file '" + path.string() + "': " + e.what());
  }
}

int cmd_validate(const CommandOptions& opts, std::ostream& out, std::ostream&) {
  const ExperimentConfig cfg = load(opts);
  bool ok = true;
  auto check = [&](const ExperimentConfig& c, const std::string& label) {
    const auto report = validate_params(c.schedule, c.game->min_ball_radius());
    fmt::print(out, "{}: {}\n", label, report.ok() ? "all conditions hold" : "conditions violated");
    print_report(out, c, report);
    ok = ok && report.ok();
  };
  check(cfg, "config");
  for (const auto& s : cfg.scenarios) check(s, "scenario " + s.name);
  return ok || !opts.strict ? kExitOk : kExitConfig;
}

int cmd_oracle(const CommandOptions& opts, std::ostream& out, std::ostream&) {
  const ExperimentConfig cfg = load(opts);
  const std::filesystem::path dest = opts.out ? *opts.out : cfg.oracle_path;
  if (dest.empty()) throw ConfigError("oracle: no output path (use --out or output.oracle)");
  const OracleResult r = solve_critical_point(*cfg.game, cfg.oracle_tol, cfg.oracle_max_iter);
  {
    auto f = open_output(dest);
    write_oracle_json(f, cfg.game_kind, r, cfg.oracle_tol);
  }
  fmt::print(out, "oracle: {} iterations, residual {}, written to {}\n", r.iterations, format_double(r.vi_residual),
             dest.string());
  return kExitOk;
}

int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load(opts);
  const std::filesystem::path dest = opts.out ? *opts.out : cfg.trace_path;
  if (dest.empty()) throw ConfigError("run: no output path (use --out or output.trace)");
  const auto report = validate_params(cfg.schedule, cfg.game->min_ball_radius());
  if (!report.ok()) {
    std::string failed;
    for (const auto& id : report.failed_ids()) failed += (failed.empty() ? "" : ", ") + id;
    if (opts.strict) throw ConfigError("run: parameter conditions violated: " + failed);
    fmt::print(err, "warning: parameter conditions violated: {}\n", failed);
  }
  execute(cfg, dest, err);
  fmt::print(out, "run: {} replication(s) of {} iterations written to {}\n", cfg.replications, cfg.horizon,
             dest.string());
  return kExitOk;
}

int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load(opts);
  if (!cfg.has_scenarios) throw ConfigError("sweep: configuration has no 'scenarios' list");
  const std::filesystem::path dir = opts.out ? *opts.out : cfg.trace_path;
  if (cfg.scenarios.empty()) {
    fmt::print(out, "sweep: no scenarios\n");
    return kExitOk;
  }
  if (dir.empty()) throw ConfigError("sweep: no output directory (use --out or output.trace)");
  for (const auto& s : cfg.scenarios) {
    const auto report = validate_params(s.schedule, s.game->min_ball_radius());
    if (!report.ok()) {
      if (opts.strict) throw ConfigError("sweep: scenario '" + s.name + "' violates the parameter conditions");
      fmt::print(err, "warning: scenario '{}' violates the parameter conditions\n", s.name);
    }
    const auto csv = dir / (s.name + ".csv");
    execute(s, csv, err);
    fmt::print(out, "sweep: {} -> {}\n", s.name, csv.string());
  }
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Bandit learning with delayed feedback: validate, oracle, run, sweep"};
  app.require_subcommand(1);
  CommandOptions opts;
  std::string out, estimator;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config", opts.config, "Experiment configuration (JSON)")->required();
    if (with_out) sub->add_option("--out", out, "Output file (oracle, run) or directory (sweep)");
    sub->add_option("--seed", seed, "Override run.seed");
    sub->add_option("--estimator", estimator, "Override run.estimator: residual | single_point");
    sub->add_flag("--strict", opts.strict, "Treat violated parameter conditions as errors");
  };
  auto* validate = app.add_subcommand("validate", "Check the step-size conditions and interior balls");
  auto* oracle = app.add_subcommand("oracle", "Solve for the critical point and write it as JSON");
  auto* run_cmd = app.add_subcommand("run", "Run the learning loop and write a CSV trace");
  auto* sweep = app.add_subcommand("sweep", "Run every scenario and write one CSV per scenario");
  add_common(validate, false);
  add_common(oracle, true);
  add_common(run_cmd, true);
  add_common(sweep, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    kernels::select_best();
    CLI::App* chosen = app.get_subcommands().front();
    if (!out.empty()) opts.out = out;
    if (chosen->count("--seed") > 0) opts.seed = seed;
    if (!estimator.empty()) opts.estimator = parse_estimator(estimator);
    if (chosen == validate) return cmd_validate(opts, std::cout, std::cerr);
    if (chosen == oracle) return cmd_oracle(opts, std::cout, std::cerr);
    if (chosen == run_cmd) return cmd_run(opts, std::cout, std::cerr);
    return cmd_sweep(opts, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    fmt::print(std::cerr, "numerical failure: {} (last residual {})\n", e.what(), format_double(e.residual()));
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "internal error: {}\n", e.what());
    return kExitInternal;
  }
}

}  // namespace bmd
