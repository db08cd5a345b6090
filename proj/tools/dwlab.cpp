#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dwlab/classify.hpp"
#include "dwlab/config.hpp"
#include "dwlab/evolve.hpp"
#include "dwlab/io.hpp"
#include "dwlab/relax.hpp"

// Exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 non-convergence.

namespace fs = std::filesystem;
using namespace dwlab;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;
constexpr int kNonConvergence = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "key=value config file");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--set", a.sets, "config override key=value (repeatable)");
  cmd->add_option("--seed", a.seed, "override relax.rng_seed");
  cmd->add_flag("--force", a.force, "overwrite existing outputs");
}

RunConfig load_config(const CommonArgs& a) {
  std::string text;
  if (!a.config_path.empty()) text = read_file(a.config_path);
  std::vector<std::string> overrides = a.sets;
  if (a.seed) overrides.push_back("relax.rng_seed=" + std::to_string(*a.seed));
  if (a.workers) overrides.push_back("scan.workers=" + std::to_string(*a.workers));
  return read_config(text, overrides);
}

// Refuses to clobber any listed output unless --force was given, then
// pins the fully-resolved config beside the outputs.
void prepare_out_dir(const CommonArgs& a, const RunConfig& c,
                     const std::vector<std::string>& outputs) {
  fs::create_directories(a.out_dir);
  if (!a.force) {
    for (const std::string& f : outputs) {
      const fs::path p = fs::path(a.out_dir) / f;
      if (fs::exists(p))
        throw ConfigError("output exists: " + p.string() + " (use --force)");
    }
  }
  write_file((fs::path(a.out_dir) / "run_config.cfg").string(), write_config(c));
}

SeedKind to_seed_kind(RelaxTarget t) {
  switch (t) {
    case RelaxTarget::kink: return SeedKind::kink;
    case RelaxTarget::antikink: return SeedKind::antikink;
    case RelaxTarget::psi_plus: return SeedKind::psi_plus;
    case RelaxTarget::psi_minus: return SeedKind::psi_minus;
    default: throw ConfigError("kind has no seed profile");
  }
}

RelaxResult build_profile(const RunConfig& c, RelaxTarget kind) {
  const ModelParams m(c.lambda);
  const Grid& g = c.relax_grid;
  FieldState seed = kind == RelaxTarget::molecule ? molecule_guess(g)
                                                  : initial_kink_guess(g, to_seed_kind(kind));
  const double dx = g.dx();
  const double step = c.flow_step > 0.0 ? c.flow_step : 0.4 * dx * dx;

  if (c.relax_method == RelaxMethodChoice::stochastic)
    return relax_stochastic(seed, m, c.schedule);
  if (c.relax_method == RelaxMethodChoice::gradient_flow)
    return relax_gradient_flow(seed, m, step, c.flow_tol, c.flow_max_iters);

  RelaxResult first = relax_stochastic(seed, m, c.schedule);
  RelaxResult second =
      relax_gradient_flow(first.profile.state, m, step, c.flow_tol, c.flow_max_iters);
  second.profile.iterations += first.profile.iterations;
  second.energy_history.insert(second.energy_history.begin(),
                               first.energy_history.begin(),
                               first.energy_history.end());
  return second;
}

int status_code(const RelaxResult& r) {
  switch (r.status) {
    case RelaxStatus::converged: return kOk;
    case RelaxStatus::iteration_limit: return kNonConvergence;
    case RelaxStatus::diverged: return kNumericalFailure;
  }
  return kNumericalFailure;
}

int cmd_relax(const CommonArgs& a) {
  const RunConfig c = load_config(a);
  const ModelParams m(c.lambda);

  std::vector<RelaxTarget> targets;
  if (c.relax_kind == RelaxTarget::all)
    targets = {RelaxTarget::kink, RelaxTarget::antikink, RelaxTarget::psi_plus,
               RelaxTarget::psi_minus, RelaxTarget::molecule};
  else
    targets = {c.relax_kind};

  std::vector<std::string> outputs = {"relax_report.txt"};
  for (RelaxTarget t : targets) outputs.push_back(std::string(relax_target_name(t)) + ".csv");
  prepare_out_dir(a, c, outputs);

  // A failed target is reported and skipped so the rest of the family is
  // still produced; the exit code carries the worst failure.
  std::string report;
  std::vector<double> energies(targets.size(),
                               std::numeric_limits<double>::quiet_NaN());
  int worst = kOk;
  for (size_t i = 0; i < targets.size(); ++i) {
    const RelaxTarget t = targets[i];
    const std::string name = relax_target_name(t);
    const RelaxResult r = build_profile(c, t);
    const int code = status_code(r);
    if (code != kOk) {
      std::fprintf(stderr, "relax %s: %s\n", name.c_str(), r.message.c_str());
      report += name + ".status=" + r.message + "\n";
      worst = std::max(worst, code);
      continue;
    }
    write_file((fs::path(a.out_dir) / (name + ".csv")).string(),
               format_snapshot(r.profile.state));

    const auto fi = first_integral_deviation(r.profile.state, m);
    double fi_max = 0.0;
    for (double v : fi) fi_max = std::max(fi_max, std::fabs(v));
    energies[i] = r.profile.energy;

    std::string block;
    block += name + ".energy=" + format_double(r.profile.energy) + "\n";
    block += name + ".charge=" + format_double(topological_charge(r.profile.state)) + "\n";
    block += name + ".first_integral_max=" + format_double(fi_max) + "\n";
    block += name + ".residual_max=" +
             format_double(static_residual_max(r.profile.state, m)) + "\n";
    block += name + ".iterations=" + std::to_string(r.profile.iterations) + "\n";
    report += block;
    std::fputs(block.c_str(), stdout);
  }

  if (c.relax_kind == RelaxTarget::all) {
    std::string block;
    block += "degeneracy.kink_antikink=" +
             format_double(std::fabs(energies[0] - energies[1])) + "\n";
    block += "degeneracy.psi_branches=" +
             format_double(std::fabs(energies[2] - energies[3])) + "\n";
    report += block;
    std::fputs(block.c_str(), stdout);
  }
  write_file((fs::path(a.out_dir) / "relax_report.txt").string(), report);
  return worst;
}

// Builds the two collision partners; "mirror" reflects the relaxed left
// profile so the pair is exactly matched.
int build_pair(const RunConfig& c, StaticProfile& left, StaticProfile& right) {
  RelaxResult l = build_profile(c, c.collision_left);
  if (int code = status_code(l); code != kOk) {
    std::fprintf(stderr, "relax %s: %s\n", relax_target_name(c.collision_left),
                 l.message.c_str());
    return code;
  }
  left = l.profile;
  if (c.collision_right == "mirror") {
    right = mirror_profile(left);
    return kOk;
  }
  RelaxTarget rt;
  if (c.collision_right == "kink") rt = RelaxTarget::kink;
  else if (c.collision_right == "antikink") rt = RelaxTarget::antikink;
  else if (c.collision_right == "psi_plus") rt = RelaxTarget::psi_plus;
  else if (c.collision_right == "psi_minus") rt = RelaxTarget::psi_minus;
  else throw ConfigError("collision.right: unknown kind '" + c.collision_right + "'");
  RelaxResult r = build_profile(c, rt);
  if (int code = status_code(r); code != kOk) {
    std::fprintf(stderr, "relax %s: %s\n", c.collision_right.c_str(), r.message.c_str());
    return code;
  }
  right = r.profile;
  return kOk;
}

void write_trajectory_outputs(const std::string& out_dir, const Trajectory& traj,
                              const RunConfig& c) {
  write_file((fs::path(out_dir) / "timeseries.csv").string(),
             format_timeseries(traj.diagnostics));
  fs::create_directories(fs::path(out_dir) / "snapshots");
  for (size_t k = 0; k < traj.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%06zu.csv", k);
    write_file((fs::path(out_dir) / "snapshots" / name).string(),
               format_snapshot(traj.snapshots[k]));
  }
  write_file((fs::path(out_dir) / "heatmap.ppm").string(),
             render_heatmap(traj, c.heatmap, ModelParams(c.lambda)));
}

int cmd_collide(const CommonArgs& a) {
  const RunConfig c = load_config(a);
  const ModelParams m(c.lambda);
  prepare_out_dir(a, c, {"timeseries.csv", "outcome.txt", "track.csv",
                         "heatmap.ppm", "snapshots"});

  StaticProfile left, right;
  if (int code = build_pair(c, left, right); code != kOk) return code;

  CollisionSetup setup;
  setup.left = left;
  setup.right = right;
  setup.x_left = c.x_left;
  setup.x_right = c.x_right;
  setup.v_left = c.v_left;
  setup.v_right = c.v_right;

  const FieldState s0 = compose_collision(setup, c.grid);
  const Trajectory traj = run(s0, m, c.evolve);
  write_trajectory_outputs(a.out_dir, traj, c);

  if (!traj.completed) {
    std::fprintf(stderr, "collide: %s\n", traj.failure.c_str());
    return kNumericalFailure;
  }

  const ChargeTrack track = track_charges(traj, c.thresholds);
  const OutcomeRecord rec = classify_outcome(traj, track, c.thresholds, m);
  write_file((fs::path(a.out_dir) / "track.csv").string(), format_track(track));
  const std::string outcome_text = format_outcome(rec);
  write_file((fs::path(a.out_dir) / "outcome.txt").string(), outcome_text);
  std::fputs(outcome_text.c_str(), stdout);
  return kOk;
}

std::string scan_table(const ScanResult& res) {
  std::string out =
      "v,outcome,final_Q,radiated_energy_fraction,asymmetry_index,"
      "outgoing_speed_positive,outgoing_speed_negative,oscillation_period,"
      "breather_like\n";
  for (const ScanEntry& e : res.entries) {
    out += format_double(e.v);
    out += ',' + outcome_name(e.record.outcome);
    out += ',' + format_double(e.record.final_Q);
    out += ',' + format_double(e.record.radiated_energy_fraction);
    out += ',' + format_double(e.record.asymmetry_index);
    out += ',';
    if (e.record.outgoing_speed_positive)
      out += format_double(*e.record.outgoing_speed_positive);
    out += ',';
    if (e.record.outgoing_speed_negative)
      out += format_double(*e.record.outgoing_speed_negative);
    out += ',';
    if (e.record.oscillation_period) out += format_double(*e.record.oscillation_period);
    out += ',';
    out += e.record.breather_like ? "true" : "false";
    out += '\n';
  }
  return out;
}

int cmd_scan(const CommonArgs& a) {
  const RunConfig c = load_config(a);
  const ModelParams m(c.lambda);
  prepare_out_dir(a, c, {"scan.csv", "scan_summary.txt"});

  ScanResult res;
  if (!c.scan_v.empty()) {
    StaticProfile left, right;
    if (int code = build_pair(c, left, right); code != kOk) return code;
    CollisionSetup base;
    base.left = left;
    base.right = right;
    base.x_left = c.x_left;
    base.x_right = c.x_right;
    const int workers = c.scan_workers > 0
                            ? c.scan_workers
                            : static_cast<int>(std::thread::hardware_concurrency());
    res = velocity_scan(c.scan_v, base, c.grid, m, c.evolve, c.thresholds,
                        std::max(1, workers));
  }

  const std::string table = scan_table(res);
  write_file((fs::path(a.out_dir) / "scan.csv").string(), table);

  std::string summary;
  if (res.v1_estimate) {
    summary += "v1_estimate=" + format_double(*res.v1_estimate) + "\n";
    summary += "v1_error=" + format_double(*res.v1_error) + "\n";
  } else {
    summary += "v1_estimate=none\n";
  }
  write_file((fs::path(a.out_dir) / "scan_summary.txt").string(), summary);
  std::fputs(table.c_str(), stdout);
  std::fputs(summary.c_str(), stdout);
  return kOk;
}

int cmd_analyze(const CommonArgs& a_in, const std::string& in_dir) {
  CommonArgs a = a_in;
  if (a.config_path.empty()) {
    const fs::path stored = fs::path(in_dir) / "run_config.cfg";
    if (fs::exists(stored)) a.config_path = stored.string();
  }
  const RunConfig c = load_config(a);
  const ModelParams m(c.lambda);

  const fs::path snapdir = fs::path(in_dir) / "snapshots";
  if (!fs::is_directory(snapdir))
    throw ConfigError("analyze: missing snapshot directory " + snapdir.string());
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(snapdir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("snap_", 0) == 0 && name.size() > 4 &&
        name.substr(name.size() - 4) == ".csv")
      files.push_back(entry.path().string());
  }
  if (files.empty())
    throw ConfigError("analyze: no snapshots found in " + snapdir.string());
  std::sort(files.begin(), files.end());

  Trajectory traj;
  for (const std::string& f : files)
    traj.snapshots.push_back(read_snapshot(read_file(f)));
  for (const FieldState& s : traj.snapshots)
    if (!(s.grid == traj.snapshots.front().grid))
      throw ConfigError("analyze: snapshots disagree on the grid");

  prepare_out_dir(a, c, {"outcome.txt", "track.csv", "heatmap.ppm"});

  const ChargeTrack track = track_charges(traj, c.thresholds);
  const OutcomeRecord rec = classify_outcome(traj, track, c.thresholds, m);
  write_file((fs::path(a.out_dir) / "track.csv").string(), format_track(track));
  const std::string outcome_text = format_outcome(rec);
  write_file((fs::path(a.out_dir) / "outcome.txt").string(), outcome_text);
  write_file((fs::path(a.out_dir) / "heatmap.ppm").string(),
             render_heatmap(traj, c.heatmap, m));
  std::fputs(outcome_text.c_str(), stdout);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-scalar domain-wall collision laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string in_dir;

  CLI::App* relax = app.add_subcommand("relax", "relax static profiles");
  add_common(relax, args);
  CLI::App* collide = app.add_subcommand("collide", "run one kink-antikink collision");
  add_common(collide, args);
  CLI::App* scan = app.add_subcommand("scan", "classify collisions over a velocity list");
  add_common(scan, args);
  scan->add_option("--workers", args.workers, "worker threads (0 = hardware)");
  CLI::App* analyze = app.add_subcommand("analyze", "re-classify a stored trajectory");
  add_common(analyze, args);
  analyze->add_option("--in", in_dir, "collide output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (relax->parsed()) return cmd_relax(args);
    if (collide->parsed()) return cmd_collide(args);
    if (scan->parsed()) return cmd_scan(args);
    if (analyze->parsed()) return cmd_analyze(args, in_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumericalFailure;
  }
  return kConfigError;
}
