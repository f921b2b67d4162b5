#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "rdlab/harness.hpp"

using namespace rdlab;

TEST_SUITE_BEGIN("harness");

namespace {

ExperimentConfig smoke() { return ExperimentConfig::load("configs/smoke.json"); }

// strip the wall_time column (the only run-dependent field) for comparisons
std::string mask_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    out << line.substr(0, cut) << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("config round-trip is the identity on all fields") {
  const ExperimentConfig c = smoke();
  const auto j1 = c.to_json();
  const ExperimentConfig back = ExperimentConfig::from_json(j1);
  CHECK(j1.dump() == back.to_json().dump());
  CHECK(back.L == c.L);
  CHECK(back.N == c.N);
  CHECK(back.dt == c.dt);
  CHECK(back.epsilons == c.epsilons);
  CHECK(back.seeds == c.seeds);
  CHECK(back.dedup_tol == c.dedup_tol);
}

TEST_CASE("config validation rejects malformed inputs") {
  ExperimentConfig c = smoke();
  c.epsilons = {0.25, 0.5};  // ascending
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = smoke();
  c.epsilons = {1.5};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = smoke();
  c.seeds = {};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = smoke();
  c.T_pullback = 10.003;  // dt does not divide it
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = smoke();
  c.ensemble_count = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("profiles build what the config names") {
  const ExperimentConfig c = smoke();
  const Grid1D g = c.grid();
  const Field b = c.b.build(g);
  for (int i = 0; i < g.N; ++i)
    if (std::abs(g.node(i)) > g.L / 4.0) CHECK(b[i] == 0.0);
  ProfileSpec bad{"triangle", 1.0, 1.0, 0.0};
  CHECK_THROWS_AS(bad.build(g), std::invalid_argument);
}

TEST_CASE("sweep: empty epsilons is an error before any work") {
  ExperimentConfig c = smoke();
  c.epsilons = {};
  CHECK_THROWS_AS(run_sweep(c, 1), std::invalid_argument);
}

TEST_CASE("sweep rows are deterministic modulo wall time, serial or parallel") {
  ExperimentConfig c = smoke();
  c.seeds = {1, 2};
  c.epsilons = {0.5, 0.25};
  const SweepResult a = run_sweep(c, 1);
  const SweepResult b = run_sweep(c, 4);
  REQUIRE(a.rows.size() == 4);
  CHECK(a.all_ok());
  CHECK(mask_wall_time(a.csv_body()) == mask_wall_time(b.csv_body()));
  CHECK(a.probes_csv() == b.probes_csv());

  // one row per (epsilon, seed), epsilon-major order
  CHECK(a.rows[0].epsilon == 0.5);
  CHECK(a.rows[0].seed == 1);
  CHECK(a.rows[3].epsilon == 0.25);
  CHECK(a.rows[3].seed == 2);
}

TEST_CASE("a failing cell is isolated; the rest of the sweep completes") {
  ExperimentConfig c = smoke();
  c.seeds = {1, 2};
  c.epsilons = {0.5, 0.25};
  const SweepResult result = run_sweep_with(
      c, 2,
      [&](const ExperimentConfig& cfg, double eps, std::uint64_t seed, double M,
          const AttractorCloud& A0) -> CellResult {
        if (eps == 0.25 && seed == 2) throw SolverError("injected fault");
        CellResult res;
        res.row.epsilon = eps;
        res.row.seed = seed;
        res.row.ok = true;
        res.cloud = A0;
        (void)cfg;
        (void)M;
        return res;
      });
  REQUIRE(result.rows.size() == 4);
  int failed = 0;
  for (const SweepRow& r : result.rows) {
    if (!r.ok) {
      ++failed;
      CHECK(r.error == "injected fault");
      CHECK(r.epsilon == 0.25);
      CHECK(r.seed == 2);
    }
  }
  CHECK(failed == 1);
  CHECK_FALSE(result.all_ok());
  // failed rows serialize as nan but keep their key columns
  CHECK(result.csv_body().find("0.25,2,nan,nan,nan,nan") != std::string::npos);
}

TEST_CASE("verify runs the documented inventory and passes at smoke scale") {
  const VerifyReport report = run_verify(smoke(), 2);
  CHECK(static_cast<int>(report.rows.size()) == verify_inventory_size());
  for (const VerifyRow& r : report.rows) {
    CAPTURE(r.quantity);
    CHECK(r.pass);
  }
  // CSV body carries the spec'd header
  CHECK(report.csv_body().rfind("epsilon,seed,t,quantity_name,value,bound_value,pass_flag\n", 0) ==
        0);
}

TEST_SUITE_END();
