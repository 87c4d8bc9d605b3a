// slpsim: stationary light pulse simulator CLI.
//
// Subcommands: modes | propagate | protocol | sweep | reproduce-paper.
// Exit codes: 0 success, 1 validation error, 2 solver error, 3 acceptance
// failure.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slp/config.hpp"
#include "slp/io.hpp"
#include "slp/kerr.hpp"
#include "slp/medium.hpp"
#include "slp/modes.hpp"
#include "slp/propagator.hpp"
#include "slp/protocol.hpp"
#include "slp/reproduce.hpp"
#include "slp/spin_transport.hpp"

namespace fs = std::filesystem;
using namespace slp;

namespace {

struct CommonArgs {
  std::string config;
  std::string out_dir;
  long seed = 20260808;
  int workers = 0;
  int snapshot_stride = -1; // -1: keep the config value
};

ScenarioConfig load_config(const CommonArgs& args) {
  if (args.config.empty())
    throw ValidationError("--config is required for this subcommand");
  ScenarioConfig cfg = parse_config(args.config);
  if (!args.out_dir.empty()) cfg.output.dir = args.out_dir;
  if (args.snapshot_stride >= 0)
    cfg.output.snapshot_stride = args.snapshot_stride;
  return cfg;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw SolverError("cannot create output directory '" + dir + "': " +
                      ec.message());
}

int run_modes(const CommonArgs& args) {
  auto cfg = load_config(args);
  const auto derived = derive(cfg.medium);
  std::vector<ModeTableRow> rows{mode_table_row(cfg.drive.a, derived)};
  ensure_dir(cfg.output.dir);
  const std::string path = cfg.output.dir + "/modes.csv";
  write_text_file(path, mode_table_csv(rows));
  std::cerr << "wrote " << path << "\n";
  return 0;
}

int run_propagate(const CommonArgs& args) {
  auto cfg = load_config(args);
  const auto derived = derive(cfg.medium);
  const Grid grid = cfg.make_grid();
  ensure_dir(cfg.output.dir);

  auto st = PolaritonState::zeros(grid.nz);
  const double width = cfg.grid.pulse_width / 4.0; // envelope length -> std
  st.psi_plus = gaussian_envelope(grid, cfg.grid.pulse_center, width,
                                  cfg.grid.pulse_amplitude);
  st.psi_minus = st.psi_plus;
  for (int i = 0; i < grid.nz; ++i)
    st.spin_s[i] = -0.5 * (st.psi_plus[i] + st.psi_minus[i]);

  const std::string traj_path = cfg.output.dir + "/trajectory.csv";
  if (cfg.grid.pulse_amplitude == 0.0) {
    std::cerr << "warning: zero-amplitude initial pulse, empty trajectory\n";
    write_text_file(traj_path, trajectory_csv({}));
    return 0;
  }

  TwoFieldStepper stepper(grid, derived);
  TwoFieldStepper::RunOptions opt;
  opt.t0 = cfg.drive.schedule.front().t;
  opt.t1 = cfg.drive.schedule.back().t;
  if (!(opt.t1 > opt.t0))
    throw ValidationError(
        "[drive]: propagate needs a schedule spanning a positive duration");
  const long total_steps =
      static_cast<long>(std::ceil((opt.t1 - opt.t0) / grid.dt));
  opt.report_stride = static_cast<int>(std::max<long>(1, total_steps / 1024));

  long snapshot_counter = 0;
  long row_index = 0;
  if (cfg.output.snapshot_stride > 0) ensure_dir(cfg.output.dir + "/snapshots");
  opt.observer = [&](const PolaritonState& state, const StepReport& rep) {
    if (cfg.output.snapshot_stride > 0 &&
        row_index % cfg.output.snapshot_stride == 0) {
      std::ostringstream name;
      name << cfg.output.dir << "/snapshots/snap_" << std::setw(6)
           << std::setfill('0') << snapshot_counter++ << ".bin";
      write_snapshot(name.str(), state, grid, rep.t);
    }
    ++row_index;
  };

  std::vector<StepReport> traj;
  try {
    traj = stepper.run(st, cfg.drive, opt);
  } catch (const SolverError&) {
    // leave the failed state behind for inspection
    const std::string snap = cfg.output.dir + "/diagnostics_snapshot.bin";
    write_snapshot(snap, st, grid, -1.0);
    std::cerr << "wrote " << snap << "\n";
    throw;
  }
  write_text_file(traj_path, trajectory_csv(traj));
  std::cerr << "wrote " << traj_path << "\n";
  return 0;
}

ExecutionResult run_protocol_from_config(const ScenarioConfig& cfg) {
  const auto derived = derive(cfg.medium);
  const Grid grid = cfg.make_grid();
  const auto kerr =
      make_kerr_params(derived, cfg.protocol.r_mode,
                       cfg.protocol.delta_over_gamma * cfg.medium.gamma);

  const auto drive0 = cfg.drive.sample(cfg.drive.schedule.front().t);
  StandardPlanSpec spec;
  spec.om2_total = drive0.total();
  spec.v_g_drag = cfg.protocol.v_g;
  spec.drag_distance = cfg.protocol.drag_distance;
  spec.probe.center = 0.45 * cfg.grid.l_sim;
  spec.probe.width = cfg.protocol.l_s / 4.0;
  spec.probe.excitations = 1e-6;
  spec.signal.center = spec.probe.center + 0.5 * cfg.protocol.drag_distance;
  spec.signal.width = cfg.protocol.l_sprime / 4.0;
  spec.signal.excitations = cfg.protocol.n_sprime;

  ProtocolParams params;
  params.derived = derived;
  params.kerr = kerr;
  params.l_s = cfg.protocol.l_s;
  params.l_sprime = cfg.protocol.l_sprime;
  params.spreading = cfg.protocol.spreading;

  return execute(make_standard_plan(spec, derived), params, grid);
}

int run_protocol(const CommonArgs& args) {
  auto cfg = load_config(args);
  ensure_dir(cfg.output.dir);
  auto res = run_protocol_from_config(cfg);
  for (const auto& n : res.report.notes) std::cerr << "note: " << n << "\n";

  const std::string report_path = cfg.output.dir + "/protocol.json";
  write_text_file(report_path, report_to_json(res.report, cfg).dump(2) + "\n");
  write_text_file(cfg.output.dir + "/protocol_trajectory.csv",
                  trajectory_csv(res.trajectory));
  std::cerr << "wrote " << report_path << "\n";
  return 0;
}

using SweepSetter = void (*)(ScenarioConfig&, double);

const std::map<std::string, SweepSetter>& sweep_setters() {
  static const std::map<std::string, SweepSetter> table = {
      {"medium.density",
       [](ScenarioConfig& c, double v) { c.medium.density = v; }},
      {"medium.length",
       [](ScenarioConfig& c, double v) { c.medium.length = v; }},
      {"drive.a", [](ScenarioConfig& c, double v) { c.drive.a = v; }},
      {"protocol.delta_over_gamma",
       [](ScenarioConfig& c, double v) { c.protocol.delta_over_gamma = v; }},
      {"protocol.v_g",
       [](ScenarioConfig& c, double v) { c.protocol.v_g = v; }},
      {"protocol.n_sprime",
       [](ScenarioConfig& c, double v) { c.protocol.n_sprime = v; }},
      {"protocol.l_sprime",
       [](ScenarioConfig& c, double v) { c.protocol.l_sprime = v; }},
      {"protocol.drag_distance",
       [](ScenarioConfig& c, double v) { c.protocol.drag_distance = v; }}};
  return table;
}

int run_sweep(const CommonArgs& args, const std::string& param,
              const std::vector<double>& values) {
  auto base = load_config(args);
  auto setter = sweep_setters().find(param);
  if (setter == sweep_setters().end()) {
    std::string known;
    for (const auto& [k, v] : sweep_setters())
      known += known.empty() ? k : ", " + k;
    throw ValidationError("unknown sweep parameter '" + param +
                          "' (available: " + known + ")");
  }
  if (values.empty()) throw ValidationError("sweep needs at least one value");

  const std::string sweep_dir = base.output.dir + "/sweep";
  ensure_dir(sweep_dir);
  const std::string manifest_path = sweep_dir + "/manifest.txt";

  // resumable: completed points are listed in the manifest
  std::set<std::size_t> done;
  {
    std::ifstream in(manifest_path);
    std::size_t idx;
    while (in >> idx) done.insert(idx);
  }

  std::mutex io_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= values.size() || failed.load()) return;
      if (done.count(i)) continue;
      try {
        ScenarioConfig cfg = base;
        setter->second(cfg, values[i]);
        cfg = parse_config_text(cfg.to_text()); // re-validate the mutation
        auto res = run_protocol_from_config(cfg);
        nlohmann::ordered_json j = report_to_json(res.report, cfg);
        j["sweep_param"] = param;
        j["sweep_value"] = values[i];
        std::ostringstream name;
        name << sweep_dir << "/point_" << std::setw(4) << std::setfill('0')
             << i << ".json";
        std::lock_guard<std::mutex> lock(io_mutex);
        write_text_file(name.str(), j.dump() + "\n");
        std::ofstream manifest(manifest_path, std::ios::app);
        manifest << i << "\n";
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        failed = true;
        failure = e.what();
        return;
      }
    }
  };

  int nworkers = args.workers > 0
                     ? args.workers
                     : static_cast<int>(std::thread::hardware_concurrency());
  if (nworkers < 1) nworkers = 1;
  nworkers = std::min<int>(nworkers, static_cast<int>(values.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed) throw SolverError("sweep point failed: " + failure);

  // assemble rows in point order so the output is deterministic
  std::ostringstream all;
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::ostringstream name;
    name << sweep_dir << "/point_" << std::setw(4) << std::setfill('0') << i
         << ".json";
    std::ifstream in(name.str());
    if (!in) throw SolverError("missing sweep point output " + name.str());
    all << in.rdbuf();
  }
  write_text_file(sweep_dir + "/results.jsonl", all.str());
  std::cerr << "wrote " << sweep_dir << "/results.jsonl\n";
  return 0;
}

int run_reproduce() {
  const auto table = run_acceptance_suite();
  const int failures = print_acceptance_table(table, std::cout);
  return failures == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"stationary light pulse simulator"};
  app.fallthrough();
  CommonArgs args;
  app.add_option("--config", args.config, "config file path or preset:<name>");
  app.add_option("--out", args.out_dir, "output directory override");
  app.add_option("--seed", args.seed, "seed for randomized runs");
  app.add_option("--workers", args.workers,
                 "sweep worker count (default: cores)");
  app.add_option("--snapshot-stride", args.snapshot_stride,
                 "emit a field snapshot every N trajectory rows");

  auto* modes_cmd = app.add_subcommand("modes", "guided-mode table (CSV)");
  auto* prop_cmd =
      app.add_subcommand("propagate", "two-field time integration (CSV)");
  auto* proto_cmd =
      app.add_subcommand("protocol", "phase-shift protocol (JSON report)");
  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep (JSONL)");
  auto* repro_cmd = app.add_subcommand("reproduce-paper",
                                       "check the published reference values");
  std::string sweep_param;
  std::vector<double> sweep_values;
  sweep_cmd
      ->add_option("--param", sweep_param,
                   "parameter path, e.g. protocol.delta_over_gamma")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "sweep values (SI units)")
      ->required()
      ->delimiter(',');
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
    if (modes_cmd->parsed()) return run_modes(args);
    if (prop_cmd->parsed()) return run_propagate(args);
    if (proto_cmd->parsed()) return run_protocol(args);
    if (sweep_cmd->parsed()) return run_sweep(args, sweep_param, sweep_values);
    if (repro_cmd->parsed()) return run_reproduce();
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::validation: return 1;
      case ErrorKind::solver: return 2;
      case ErrorKind::acceptance: return 3;
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
