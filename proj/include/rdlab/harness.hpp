#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdlab/attractor.hpp"
#include "rdlab/estimates.hpp"
#include "rdlab/profiles.hpp"

namespace rdlab {

struct ProfileSpec {
  std::string type = "zero";  // zero | constant | gaussian | bump
  double amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;

  Field build(const Grid1D& g) const;
};

/// One JSON document drives every subcommand. epsilons must be sorted
/// descending in (0, 1]; dt must divide T_pullback.
struct ExperimentConfig {
  double L = 10.0;
  int N = 256;
  double dt = 5e-3;
  double lambda = 1.0;
  double a = 1.0;
  ProfileSpec b{"bump", 0.5, 0.0, 0.0};
  ProfileSpec g{"gaussian", 0.5, 0.5, 0.0};
  ProfileSpec h{"gaussian", 0.5, 0.8, 0.0};
  std::vector<double> epsilons;
  std::vector<std::uint64_t> seeds;
  double T_pullback = 20.0;
  int ensemble_count = 5;
  double eta = 1e-2;
  double dedup_tol = 1e-6;
  std::string output_dir = "out";

  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  static ExperimentConfig load(const std::string& path);

  Grid1D grid() const { return Grid1D::make(L, N); }
  SolverConfig solver() const { return SolverConfig{dt}; }
  ProblemSpec problem(double epsilon) const;

  /// Noise window wide enough for pullback over [0, T] plus the OU
  /// left-truncation margin and a little forward headroom.
  std::pair<double, double> path_window(double T) const;
};

struct SweepRow {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double dist_to_A0 = 0.0;
  double resolution_eps = 0.0;
  double resolution_0 = 0.0;
  double r_hat = 0.0;
  double wall_time = 0.0;
  bool ok = false;
  std::string error;
};

struct ProbeRow {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double M = 0.0;                 // frozen absorbing radius constant
  double resolution_A0 = 0.0;
  std::vector<ProbeRow> probes;   // condition probes (solution convergence,
                                  // absorbing-radius trend, precompactness)
  bool all_ok() const;
  std::string csv_body() const;   // spec'd header + rows
  std::string probes_csv() const;
};

struct CellResult {
  SweepRow row;
  AttractorCloud cloud;
};
using CellRunner = std::function<CellResult(const ExperimentConfig&, double eps,
                                            std::uint64_t seed, double M,
                                            const AttractorCloud& A0)>;

SweepResult run_sweep(const ExperimentConfig& config, int jobs = 1);
/// Seam for fault-injection tests: cells run through `runner`, failures are
/// isolated per cell.
SweepResult run_sweep_with(const ExperimentConfig& config, int jobs, const CellRunner& runner);

struct VerifyRow {
  std::string quantity;  // module.check.metric
  double epsilon = 0.0;  // NaN when not applicable
  std::uint64_t seed = 0;
  double t = 0.0;
  double value = 0.0;    // pass iff value <= bound
  double bound = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyRow> rows;
  bool all_pass() const;
  std::string csv_body() const;  // epsilon,seed,t,quantity_name,value,bound_value,pass_flag
};

/// Full invariant suite over every module at the config's scale. The check
/// inventory is fixed (documented in the README); rows appear in a
/// deterministic order.
VerifyReport run_verify(const ExperimentConfig& config, int jobs = 1);

/// Number of rows run_verify emits for any valid config.
int verify_inventory_size();

}  // namespace rdlab
