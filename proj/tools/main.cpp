#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdlab/csv.hpp"
#include "rdlab/harness.hpp"
#include "rdlab/oracles.hpp"

namespace fs = std::filesystem;
using namespace rdlab;

namespace {

void write_text(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

nlohmann::ordered_json cloud_to_json(const AttractorCloud& cloud, double epsilon,
                                     std::uint64_t seed) {
  nlohmann::ordered_json j;
  const Grid1D* grid = nullptr;
  if (!cloud.points.empty()) grid = &cloud.points.front().grid();
  j["grid"] = {{"L", grid ? grid->L : 0.0}, {"N", grid ? grid->N : 0}};
  j["epsilon"] = epsilon;
  j["seed"] = seed;
  j["pullback_time"] = cloud.pullback_time;
  j["dedup_tol"] = cloud.dedup_tol;
  j["resolution"] = cloud.resolution;
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const Field& p : cloud.points) pts.push_back(p.values());
  j["points"] = pts;
  return j;
}

int cmd_simulate(const ExperimentConfig& config, std::uint64_t seed, double epsilon, double T,
                 const fs::path& out_dir, bool dump_path, std::vector<double> snapshot_times) {
  const ProblemSpec spec = config.problem(epsilon);
  const SolverConfig cfg = config.solver();
  const double T_run = snap_duration(T, cfg.dt);
  const auto [t_min, t_max] = config.path_window(T_run);
  for (double& s : snapshot_times) s = snap_duration(s, cfg.dt);

  std::ostringstream series;
  series << "t,u_l2,u_h1_semi,u_lp_p,tail_mass_half_L\n";
  const double R = config.L / 2.0;
  auto observe = [&](double tau, const Field&, const Field& u) {
    series << csv_num(tau) << ',' << csv_num(norm_l2(u)) << ',' << csv_num(norm_h1_semi(u))
           << ',' << csv_num(std::pow(norm_lp(u, spec.nonlin.p), spec.nonlin.p)) << ','
           << csv_num(tail_mass(u, R)) << '\n';
    for (double s : snapshot_times) {
      if (std::abs(s - tau) > 0.5 * cfg.dt) continue;
      char name[64];
      std::snprintf(name, sizeof(name), "snapshot_t%g.csv", tau);
      std::ostringstream snap;
      write_field_csv(u, snap);
      write_text(out_dir / name, snap.str());
    }
  };

  const Field u0(config.grid());  // rest state; perturbed runs leave it quickly
  if (epsilon == 0.0) {
    deterministic_flow_traced(spec, cfg, T_run, u0, observe);
  } else {
    const WienerPath omega = sample_path(seed, cfg.dt, t_min, t_max);
    OuProcess ou(omega, spec.lambda, spec.nonlin.p);
    cocycle_traced(spec, cfg, T_run, ou, u0, observe);
    if (dump_path) {
      std::ostringstream trace;
      write_ou_csv(ou, trace);
      write_text(out_dir / "path.csv", trace.str());
    }
  }
  write_text(out_dir / "timeseries.csv", series.str());
  std::cout << "wrote " << (out_dir / "timeseries.csv").string() << "\n";
  return 0;
}

int cmd_attractor(const ExperimentConfig& config, std::uint64_t seed, double epsilon,
                  const fs::path& out_file) {
  const SolverConfig cfg = config.solver();
  AttractorCloud cloud;
  if (epsilon == 0.0) {
    cloud = global_attractor(config.problem(0.0), cfg, config.T_pullback, config.ensemble_count,
                             config.dedup_tol);
  } else {
    const auto [t_min, t_max] = config.path_window(config.T_pullback);
    const WienerPath omega = sample_path(seed, cfg.dt, t_min, t_max);
    cloud = pullback_attractor(config.problem(epsilon), cfg, omega, config.T_pullback,
                               config.ensemble_count, config.dedup_tol);
  }
  write_text(out_file, cloud_to_json(cloud, epsilon, seed).dump(2) + "\n");
  std::cout << "wrote " << out_file.string() << " (" << cloud.points.size()
            << " points, resolution " << cloud.resolution << ")\n";
  return 0;
}

int cmd_sweep(const ExperimentConfig& config, int jobs, const fs::path& out_dir) {
  const SweepResult result = run_sweep(config, jobs);
  write_text(out_dir / "sweep.csv", result.csv_body());
  write_text(out_dir / "probes.csv", result.probes_csv());
  nlohmann::ordered_json meta;
  meta["config"] = config.to_json();
  meta["M"] = result.M;
  meta["resolution_A0"] = result.resolution_A0;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  meta["finished_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const SweepRow& r : result.rows)
    if (!r.ok) failures.push_back({{"epsilon", r.epsilon}, {"seed", r.seed}, {"error", r.error}});
  meta["failures"] = failures;
  write_text(out_dir / "meta.json", meta.dump(2) + "\n");
  std::cout << "wrote " << (out_dir / "sweep.csv").string() << "\n";
  for (const ProbeRow& p : result.probes)
    std::cout << (p.pass ? "[PASS] " : "[FAIL] ") << p.name << " value=" << p.value
              << " bound=" << p.bound << "\n";
  return result.all_ok() ? 0 : 1;
}

int cmd_verify(const ExperimentConfig& config, int jobs, const fs::path& out_dir) {
  const VerifyReport report = run_verify(config, jobs);
  write_text(out_dir / "verify.csv", report.csv_body());
  int failures = 0;
  for (const VerifyRow& r : report.rows) {
    if (!r.pass) ++failures;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.quantity << " value=" << r.value
              << " bound=" << r.bound << "\n";
  }
  std::cout << report.rows.size() << " checks, " << failures << " failures; wrote "
            << (out_dir / "verify.csv").string() << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic reaction-diffusion pullback-attractor laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  int jobs = 1;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool have_seed = false;

  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--jobs", jobs, "max parallel cells");
  app.add_option("--out", out_override, "output directory override");
  auto* seed_opt = app.add_option("--seed", seed_override, "seed override");

  auto* sim = app.add_subcommand("simulate", "run one trajectory and dump its time series");
  double sim_eps = -1.0;
  double sim_T = -1.0;
  bool sim_dump_path = false;
  sim->add_option("--eps", sim_eps, "perturbation amplitude (default: largest configured)");
  sim->add_option("--t", sim_T, "horizon (default: T_pullback)");
  sim->add_flag("--dump-path", sim_dump_path, "also dump the path/OU trace CSV");
  std::vector<double> sim_snapshots;
  sim->add_option("--snapshot", sim_snapshots, "dump a full-field snapshot at this time (repeatable)");

  auto* att = app.add_subcommand("attractor", "approximate one attractor cloud (JSON)");
  double att_eps = -1.0;
  std::string att_out = "cloud.json";
  att->add_option("--eps", att_eps, "perturbation amplitude (0 = deterministic)");
  att->add_option("--cloud-out", att_out, "output JSON file");

  auto* swp = app.add_subcommand("sweep", "epsilon sweep against the deterministic attractor");
  auto* ver = app.add_subcommand("verify", "run the invariant suite and report pass/fail");

  CLI11_PARSE(app, argc, argv);
  have_seed = seed_opt->count() > 0;

  try {
    ExperimentConfig config = ExperimentConfig::load(config_path);
    if (!out_override.empty()) config.output_dir = out_override;
    if (have_seed) config.seeds = {seed_override};
    const fs::path out_dir = config.output_dir;
    const std::uint64_t seed = config.seeds.front();

    if (sim->parsed()) {
      const double eps = sim_eps >= 0.0 ? sim_eps : (config.epsilons.empty() ? 0.0 : config.epsilons.front());
      const double T = sim_T > 0.0 ? sim_T : config.T_pullback;
      return cmd_simulate(config, seed, eps, T, out_dir, sim_dump_path, sim_snapshots);
    }
    if (att->parsed()) {
      const double eps = att_eps >= 0.0 ? att_eps : (config.epsilons.empty() ? 0.0 : config.epsilons.front());
      return cmd_attractor(config, seed, eps, out_dir / att_out);
    }
    if (swp->parsed()) return cmd_sweep(config, jobs, out_dir);
    if (ver->parsed()) return cmd_verify(config, jobs, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
