#include "rdlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "rdlab/csv.hpp"
#include "rdlab/oracles.hpp"
#include "rdlab/rng.hpp"

namespace rdlab {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const int workers = std::min<int>(jobs, static_cast<int>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

Field ProfileSpec::build(const Grid1D& g) const {
  if (type == "zero") return Field(g);
  if (type == "constant") return constant_profile(g, amplitude);
  if (type == "gaussian") return gaussian_profile(g, amplitude, width, center);
  if (type == "bump") {
    const double hw = width > 0.0 ? width : g.L / 4.0;
    return bump_profile(g, amplitude, hw);
  }
  throw std::invalid_argument("ProfileSpec: unknown type '" + type + "'");
}

void ExperimentConfig::validate() const {
  Grid1D::make(L, N);
  if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("config: lambda must be positive");
  if (a < 0.0) throw std::invalid_argument("config: a must be nonnegative");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] <= 1.0))
      throw std::invalid_argument("config: epsilons must lie in (0, 1]");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw std::invalid_argument("config: epsilons must be sorted descending");
  }
  if (seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
  if (!(T_pullback > 0.0)) throw std::invalid_argument("config: T_pullback must be positive");
  steps_for(T_pullback, dt);  // dt must divide T_pullback
  if (ensemble_count < 1) throw std::invalid_argument("config: ensemble_count must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("config: eta must be positive");
  if (!(dedup_tol > 0.0)) throw std::invalid_argument("config: dedup_tol must be positive");
}

namespace {

ProfileSpec profile_from_json(const nlohmann::json& j) {
  ProfileSpec p;
  p.type = j.at("type").get<std::string>();
  if (j.contains("amplitude")) p.amplitude = j.at("amplitude").get<double>();
  if (j.contains("width")) p.width = j.at("width").get<double>();
  if (j.contains("center")) p.center = j.at("center").get<double>();
  return p;
}

nlohmann::ordered_json profile_to_json(const ProfileSpec& p) {
  nlohmann::ordered_json j;
  j["type"] = p.type;
  if (p.type != "zero") j["amplitude"] = p.amplitude;
  if (p.type == "gaussian" || p.type == "bump") j["width"] = p.width;
  if (p.type == "gaussian") j["center"] = p.center;
  return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.L = j.at("grid").at("L").get<double>();
  c.N = j.at("grid").at("N").get<int>();
  c.dt = j.at("solver").at("dt").get<double>();
  const auto& prob = j.at("problem");
  c.lambda = prob.at("lambda").get<double>();
  c.a = prob.at("a").get<double>();
  c.b = profile_from_json(prob.at("b"));
  c.g = profile_from_json(prob.at("g"));
  c.h = profile_from_json(prob.at("h"));
  c.epsilons = j.at("epsilons").get<std::vector<double>>();
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.T_pullback = j.at("T_pullback").get<double>();
  c.ensemble_count = j.at("ensemble_count").get<int>();
  c.eta = j.at("eta").get<double>();
  if (j.contains("dedup_tol")) c.dedup_tol = j.at("dedup_tol").get<double>();
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  c.validate();
  return c;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["grid"] = {{"L", L}, {"N", N}};
  j["solver"] = {{"dt", dt}};
  nlohmann::ordered_json prob;
  prob["lambda"] = lambda;
  prob["a"] = a;
  prob["b"] = profile_to_json(b);
  prob["g"] = profile_to_json(g);
  prob["h"] = profile_to_json(h);
  j["problem"] = prob;
  j["epsilons"] = epsilons;
  j["seeds"] = seeds;
  j["T_pullback"] = T_pullback;
  j["ensemble_count"] = ensemble_count;
  j["eta"] = eta;
  j["dedup_tol"] = dedup_tol;
  j["output_dir"] = output_dir;
  return j;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

ProblemSpec ExperimentConfig::problem(double epsilon) const {
  const Grid1D grd = grid();
  ProblemSpec spec;
  spec.lambda = lambda;
  spec.epsilon = epsilon;
  spec.grid = grd;
  spec.g = g.build(grd);
  spec.h = h.build(grd);
  spec.nonlin = a > 0.0 ? Nonlinearity::cubic(a, b.build(grd)) : Nonlinearity::none(grd);
  spec.validate();
  return spec;
}

std::pair<double, double> ExperimentConfig::path_window(double T) const {
  const double margin = std::max(40.0 / lambda, 5.0) + 2.0;
  return {-(T + margin), 3.0};
}

bool SweepResult::all_ok() const {
  for (const SweepRow& r : rows)
    if (!r.ok) return false;
  for (const ProbeRow& p : probes)
    if (!p.pass) return false;
  return true;
}

std::string SweepResult::csv_body() const {
  std::ostringstream out;
  out << "epsilon,seed,dist_to_A0,resolution_eps,resolution_0,r_hat,wall_time\n";
  const double nan = std::nan("");
  for (const SweepRow& r : rows) {
    out << csv_num(r.epsilon) << ',' << r.seed << ',';
    if (r.ok)
      out << csv_num(r.dist_to_A0) << ',' << csv_num(r.resolution_eps) << ','
          << csv_num(r.resolution_0) << ',' << csv_num(r.r_hat);
    else
      out << csv_num(nan) << ',' << csv_num(nan) << ',' << csv_num(nan) << ',' << csv_num(nan);
    out << ',' << csv_num(r.wall_time) << '\n';
  }
  return out.str();
}

std::string SweepResult::probes_csv() const {
  std::ostringstream out;
  out << "probe,value,bound,pass\n";
  for (const ProbeRow& p : probes)
    out << p.name << ',' << csv_num(p.value) << ',' << csv_num(p.bound) << ','
        << (p.pass ? 1 : 0) << '\n';
  return out.str();
}

namespace {

CellResult default_cell(const ExperimentConfig& config, double eps, std::uint64_t seed, double M,
                        const AttractorCloud& A0) {
  const auto [t_min, t_max] = config.path_window(config.T_pullback);
  const WienerPath omega = sample_path(seed, config.dt, t_min, t_max);
  const ProblemSpec spec = config.problem(eps);
  const SolverConfig cfg = config.solver();

  CellResult res;
  res.row.epsilon = eps;
  res.row.seed = seed;
  res.row.r_hat = OuProcess(omega, spec.lambda, spec.nonlin.p).r_hat();
  res.cloud = pullback_attractor(spec, cfg, omega, config.T_pullback, config.ensemble_count,
                                 config.dedup_tol, M);
  res.row.dist_to_A0 = hausdorff_semidist(res.cloud, A0);
  res.row.resolution_eps = res.cloud.resolution;
  res.row.resolution_0 = A0.resolution;
  res.row.ok = true;
  return res;
}

}  // namespace

SweepResult run_sweep_with(const ExperimentConfig& config, int jobs, const CellRunner& runner) {
  config.validate();
  if (config.epsilons.empty())
    throw std::invalid_argument("run_sweep: epsilons list is empty, nothing to sweep");

  SweepResult result;
  const SolverConfig cfg = config.solver();

  // Freeze the absorbing radius once, from an eps = 1 calibration on the
  // first seed's path, and reuse it for every cloud including A_0.
  const auto [t_min, t_max] = config.path_window(config.T_pullback);
  const WienerPath cal_path = sample_path(config.seeds.front(), config.dt, t_min, t_max);
  const ProblemSpec base = config.problem(config.epsilons.front());
  result.M = calibrate_absorbing_radius(base, cfg, &cal_path, config.T_pullback);

  const AttractorCloud A0 = global_attractor(base, cfg, config.T_pullback,
                                             config.ensemble_count, config.dedup_tol, result.M);
  result.resolution_A0 = A0.resolution;

  struct Cell {
    double eps;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double eps : config.epsilons)
    for (std::uint64_t seed : config.seeds) cells.push_back({eps, seed});
  result.rows.resize(cells.size());
  std::vector<AttractorCloud> cell_clouds(cells.size());

  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    SweepRow row;
    row.epsilon = cells[i].eps;
    row.seed = cells[i].seed;
    try {
      CellResult res = runner(config, cells[i].eps, cells[i].seed, result.M, A0);
      row = res.row;
      cell_clouds[i] = std::move(res.cloud);
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    row.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.rows[i] = row;
  });

  // Condition probes for the upper-semicontinuity theorem's hypotheses.
  const double eps_max = config.epsilons.front();
  const double eps_min = config.epsilons.back();
  {
    // Solution convergence: the perturbed trajectory approaches the limiting
    // one as eps shrinks (sup over [0, 2] of the squared distance).
    const WienerPath& omega = cal_path;
    const AbsorbingBall probe_ball{result.M, 0.0, 0.0};
    const Field u0 = seed_ensemble(probe_ball, config.grid(), 2, 0x31u)[1];
    const double T_conv = snap_duration(std::min(2.0, config.T_pullback), config.dt);
    const double sup_max =
        convergence_check(config.problem(eps_max), cfg, omega, T_conv, u0, u0).sup_err_sq;
    const double sup_min =
        convergence_check(config.problem(eps_min), cfg, omega, T_conv, u0, u0).sup_err_sq;
    ProbeRow p;
    p.name = "condition_3_1.solution_convergence_ratio";
    p.value = sup_max > 0.0 ? sup_min / sup_max : 0.0;
    // squared distances shrink at least linearly in eps (with headroom)
    p.bound = 1.5 * eps_min / eps_max;
    p.pass = p.value <= p.bound;
    result.probes.push_back(p);
  }
  {
    // Bounded absorbing limit: at the smallest eps, every attractor point
    // already sits inside the deterministic-limit ball of radius M.
    double worst = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      if (!result.rows[i].ok || result.rows[i].epsilon != eps_min) continue;
      for (const Field& pt : cell_clouds[i].points) {
        worst = std::max(worst, norm_l2(pt) / result.M);
        any = true;
      }
    }
    ProbeRow p;
    p.name = "condition_3_2.smallest_eps_point_norm_over_M";
    p.value = any ? worst : std::nan("");
    p.bound = 1.0;
    p.pass = any && p.value <= p.bound;
    result.probes.push_back(p);
  }
  {
    // Precompactness of the attractor union: greedy eta-net plus far-field
    // certificate over every cloud the sweep produced.
    std::vector<const AttractorCloud*> ptrs;
    ptrs.push_back(&A0);
    for (std::size_t i = 0; i < result.rows.size(); ++i)
      if (result.rows[i].ok) ptrs.push_back(&cell_clouds[i]);
    const CoveringReport rep = union_precompactness_probe(ptrs, config.eta);
    ProbeRow p;
    p.name = "condition_3_3.union_tail_mass";
    p.value = rep.max_tail;
    p.bound = (config.eta / 4.0) * (config.eta / 4.0);
    p.pass = rep.tail_ok;
    result.probes.push_back(p);
    ProbeRow q;
    q.name = "condition_3_3.union_net_size";
    q.value = rep.net_size;
    q.bound = rep.pooled_points;
    q.pass = rep.net_size <= rep.pooled_points;
    result.probes.push_back(q);
  }
  return result;
}

SweepResult run_sweep(const ExperimentConfig& config, int jobs) {
  return run_sweep_with(config, jobs, default_cell);
}

bool VerifyReport::all_pass() const {
  for (const VerifyRow& r : rows)
    if (!r.pass) return false;
  return true;
}

std::string VerifyReport::csv_body() const {
  std::ostringstream out;
  out << "epsilon,seed,t,quantity_name,value,bound_value,pass_flag\n";
  for (const VerifyRow& r : rows) {
    out << csv_num(r.epsilon) << ',' << r.seed << ',' << csv_num(r.t) << ',' << r.quantity << ','
        << csv_num(r.value) << ',' << csv_num(r.bound) << ',' << (r.pass ? 1 : 0) << '\n';
  }
  return out.str();
}

namespace {

class VerifyBuilder {
 public:
  explicit VerifyBuilder(VerifyReport& report) : report_(report) {}
  void add(const std::string& quantity, double value, double bound, double epsilon = std::nan(""),
           std::uint64_t seed = 0, double t = 0.0) {
    VerifyRow row;
    row.quantity = quantity;
    row.epsilon = epsilon;
    row.seed = seed;
    row.t = t;
    row.value = value;
    row.bound = bound;
    row.pass = value <= bound;
    report_.rows.push_back(row);
  }

 private:
  VerifyReport& report_;
};

struct VerifyScale {
  ExperimentConfig config;
  SolverConfig cfg;
  Grid1D grid;
  double T;       // protocol horizon
  WienerPath path0;  // first seed's path
  std::vector<std::uint64_t> seeds;
};

void verify_noise(VerifyBuilder& vb, const VerifyScale& s) {
  const double dt = s.config.dt;
  const double lambda = s.config.lambda;
  const std::uint64_t seed = s.seeds.front();
  const WienerPath w = sample_path(seed, dt, -std::max(20.0, 40.0 / lambda), 5.0);

  {  // shift group law, exact node equality on the common window
    const double s1 = 64.0 * dt, s2 = -32.0 * dt;
    const WienerPath two = shift(shift(w, s1), s2);
    const WienerPath one = shift(w, s1 + s2);
    double worst = 0.0;
    for (std::int64_t k = 0; k < one.node_count(); ++k)
      worst = std::max(worst, std::abs(two.node(k) - one.node(k)));
    vb.add("noise.group_law.max_node_diff", worst, 0.0, std::nan(""), seed);
  }
  {  // theta_0 is the identity
    const WienerPath same = shift(w, 0.0);
    double worst = 0.0;
    for (std::int64_t k = 0; k < w.node_count(); ++k)
      worst = std::max(worst, std::abs(same.node(k) - w.node(k)));
    vb.add("noise.shift_zero.max_node_diff", worst, 0.0, std::nan(""), seed);
  }
  {  // linear path is shift-invariant: shift(c tau, s)(tau) = c tau
    const WienerPath lin = WienerPath::linear(0.7, dt, -10.0, 10.0);
    const WienerPath sh = shift(lin, 128.0 * dt);
    double worst = 0.0;
    for (std::int64_t k = 0; k < sh.node_count(); ++k)
      worst = std::max(worst, std::abs(sh.node(k) - 0.7 * sh.node_time(k)));
    vb.add("noise.linear_shift_invariance.max_dev", worst, 1e-12);
  }
  {  // OU stationarity under the shift
    const OuProcess ou = ou_from_path(w, lambda, 4.0);
    const double sft = 256.0 * dt;
    const OuProcess ou_shifted = ou_from_path(shift(w, sft), lambda, 4.0);
    double worst = 0.0;
    for (double tau = -2.0; tau <= 2.0; tau += 0.25)
      worst = std::max(worst, std::abs(ou_shifted.y_at(tau) - ou.y_at(tau + sft)));
    vb.add("noise.ou_stationarity.max_abs_dev", worst, 1e-9, std::nan(""), seed);
  }
  {  // tempered bound holds at every node and is attained
    const OuProcess ou = ou_from_path(w, lambda, 4.0);
    double worst = -1e300;
    double attained = 0.0;
    for (std::int64_t k = 0; k < w.node_count(); ++k) {
      const double y = std::abs(ou.y_node(k));
      const double lhs = y * y + std::pow(y, 4.0);
      const double rhs = std::exp(0.5 * lambda * std::abs(w.node_time(k))) * ou.r_hat();
      worst = std::max(worst, lhs - rhs);
      attained = std::max(attained, lhs / std::max(rhs, 1e-300));
    }
    vb.add("noise.tempered_bound.max_violation", worst, 1e-12, std::nan(""), seed);
    vb.add("noise.tempered_bound.tightness_gap", std::abs(1.0 - attained), 1e-9, std::nan(""), seed);
  }
  {  // exact recursion against the defining-integral quadrature oracle
    const OuProcess ou = ou_from_path(w, lambda, 4.0);
    double sup_y = 0.0;
    for (std::int64_t k = 0; k < w.node_count(); ++k)
      sup_y = std::max(sup_y, std::abs(ou.y_node(k)));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double t = -4.0 + 8.0 * i / 19.0;
      const double oracle = ou_defining_integral(w, lambda, t);
      worst = std::max(worst, std::abs(ou.y_at(t) - oracle) / sup_y);
    }
    vb.add("noise.ou_vs_quadrature.max_rel_err", worst, 1e-3, std::nan(""), seed);
  }
  {  // increment variance against dt
    double mean = 0.0;
    const std::int64_t n = w.node_count() - 1;
    for (std::int64_t k = 0; k < n; ++k) mean += w.increment(k);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
      const double d = w.increment(k) - mean;
      var += d * d;
    }
    var /= static_cast<double>(n - 1);
    vb.add("noise.increment_variance.rel_dev", std::abs(var / dt - 1.0), 0.10, std::nan(""), seed);
  }
}

void verify_field(VerifyBuilder& vb, const VerifyScale& s) {
  const Grid1D g = s.grid;
  // deterministic test fields
  const Field f = Field::from_function(g, [&](double x) { return std::sin(1.7 * x) * std::exp(-0.1 * x * x); });
  const Field q = Field::from_function(g, [&](double x) { return std::cos(0.9 * x) - x / (1.0 + x * x); });
  {
    const double lhs = inner(laplacian(f), q);
    const double rhs = inner(f, laplacian(q));
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
    vb.add("field.summation_by_parts.sym_rel", std::abs(lhs - rhs) / scale, 1e-12);
    const double e1 = -inner(laplacian(f), f);
    const double e2 = norm_h1_semi(f) * norm_h1_semi(f);
    vb.add("field.summation_by_parts.h1_rel", std::abs(e1 - e2) / std::max(e2, 1e-30), 1e-12);
  }
  vb.add("field.norm_lp2.abs_diff", std::abs(norm_lp(f, 2.0) - norm_l2(f)), 0.0);
  {
    // laplacian order against the analytic second derivative across a
    // 3-level refinement (hx halves when N -> 2N + 1)
    auto exact = [](double x) { return std::sin(M_PI * x / 4.0) * (1.0 - x * x / 25.0); };
    auto exact_dd = [](double x) {
      const double k = M_PI / 4.0;
      const double a = std::sin(k * x), da = k * std::cos(k * x), dda = -k * k * std::sin(k * x);
      const double b = 1.0 - x * x / 25.0, db = -2.0 * x / 25.0, ddb = -2.0 / 25.0;
      return dda * b + 2.0 * da * db + a * ddb;
    };
    const double L = 5.0;
    std::vector<double> errs;
    int n = 63;
    for (int level = 0; level < 3; ++level) {
      const Grid1D gg = Grid1D::make(L, n);
      const Field u = Field::from_function(gg, exact);
      const Field lap = laplacian(u);
      double worst = 0.0;
      for (int i = 2; i < gg.N - 2; ++i)
        worst = std::max(worst, std::abs(lap[i] - exact_dd(gg.node(i))));
      errs.push_back(worst);
      n = 2 * n + 1;
    }
    double dev = 0.0;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i)
      dev = std::max(dev, std::abs(std::log2(errs[i] / errs[i + 1]) - 2.0));
    vb.add("field.laplacian_order.dev_from_2", dev, 0.1);
  }
}

void verify_spde(VerifyBuilder& vb, const VerifyScale& s) {
  const SolverConfig cfg = s.cfg;
  const ExperimentConfig& config = s.config;
  const ProblemSpec cubic = config.problem(0.5);

  {  // structure conditions of the built-in family, pointwise on a sample grid
    const StructureCheck chk = check_structure_conditions(cubic.nonlin, 5.0, 400);
    vb.add("spde.structure_f1.max_violation", chk.worst_f1, 1e-12);
    vb.add("spde.structure_f3.max_violation", chk.worst_f3, 1e-12);
    vb.add("spde.structure_fcond.max_violation", chk.worst_fcond, 1e-12);
  }

  const auto [t_min, t_max] = config.path_window(4.0);
  const Field u0 = Field::from_function(s.grid, [&](double x) {
    return 0.4 * std::exp(-x * x) + 0.1 * std::sin(M_PI * x / s.grid.L);
  });

  {  // Phi(0) is the identity, exactly
    const WienerPath w = sample_path(s.seeds.front(), cfg.dt, t_min, t_max);
    const Field out = cocycle(cubic, cfg, 0.0, w, u0);
    double worst = 0.0;
    for (int i = 0; i < out.size(); ++i) worst = std::max(worst, std::abs(out[i] - u0[i]));
    vb.add("spde.cocycle_identity.t0_diff", worst, 0.0);
  }
  {  // cocycle law on grid-aligned splits
    double worst = 0.0;
    const double T = snap_duration(2.0, cfg.dt);
    int split_counter = 0;
    for (double eps : {0.0, 0.5, 1.0}) {
      const ProblemSpec spec = cubic.with_epsilon(eps);
      for (std::uint64_t seed : s.seeds) {
        const WienerPath w = sample_path(seed, cfg.dt, t_min, t_max);
        for (int rep = 0; rep < 2; ++rep) {
          const std::int64_t steps = steps_for(T, cfg.dt);
          const std::int64_t cut = 1 + static_cast<std::int64_t>(
              rng_word(0xc0c1ceull, static_cast<std::uint64_t>(split_counter++)) %
              static_cast<std::uint64_t>(steps - 1));
          const double sdur = static_cast<double>(cut) * cfg.dt;
          const double tdur = static_cast<double>(steps - cut) * cfg.dt;
          const Field direct = cocycle(spec, cfg, sdur + tdur, w, u0);
          const Field mid = cocycle(spec, cfg, sdur, w, u0);
          const Field composed = cocycle(spec, cfg, tdur, shift(w, sdur), mid);
          worst = std::max(worst, norm_l2(direct - composed));
        }
      }
    }
    vb.add("spde.cocycle_law.max_residual", worst, 1e-10, std::nan(""), 0, 2.0);
  }
  {  // eps = 0 ignores the path entirely
    const ProblemSpec det = cubic.with_epsilon(0.0);
    const WienerPath w1 = sample_path(11, cfg.dt, t_min, t_max);
    const WienerPath w2 = sample_path(12, cfg.dt, t_min, t_max);
    const Field a = cocycle(det, cfg, 1.0, w1, u0);
    const Field b = cocycle(det, cfg, 1.0, w2, u0);
    double worst = 0.0;
    for (int i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    vb.add("spde.eps0_seed_independence.max_diff", worst, 0.0);
  }
  {  // first order in dt against the discrete eigenmode decay
    const ProblemSpec lin{config.lambda, 0.0, Field(s.grid), Field(s.grid),
                          Nonlinearity::none(s.grid), s.grid};
    const int mode = 2;
    const Field v0 = dirichlet_eigenvector(s.grid, mode);
    const double beta = config.lambda - dirichlet_eigenvalue(s.grid, mode);
    const double T = 240.0 * cfg.dt;  // multiple of every dt level below
    std::vector<double> errs;
    for (double dt_level : {4.0 * cfg.dt, 2.0 * cfg.dt, cfg.dt}) {
      const Field uT = deterministic_flow(lin, SolverConfig{dt_level}, T, v0);
      errs.push_back(norm_l2(uT - std::exp(-beta * T) * v0));
    }
    double dev = 0.0;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i)
      dev = std::max(dev, std::abs(std::log2(errs[i] / errs[i + 1]) - 1.0));
    vb.add("spde.temporal_order.dev_from_1", dev, 0.1, 0.0, 0, T);
  }
  {  // linear flow contracts onto the direct-solve fixed point
    ProblemSpec lin = config.problem(0.0);
    lin.nonlin = Nonlinearity::none(s.grid);
    const Field ustar = linear_poisson_solve(s.grid, lin.lambda, lin.g);
    const double T = snap_duration(10.0, cfg.dt);
    const Field uT = deterministic_flow(lin, cfg, T, u0);
    const double lhs = norm_l2(uT - ustar);
    const double rhs = std::exp(-lin.lambda * T) * norm_l2(u0 - ustar) + 1e-9;
    vb.add("spde.linear_contraction.residual_minus_bound", lhs - rhs, 0.0, 0.0, 0, T);
  }
  {  // pure cubic dissipation: the norm never grows
    ProblemSpec pure = cubic.with_epsilon(0.0);
    pure.g = Field(s.grid);
    pure.nonlin = Nonlinearity::cubic(1.0, Field(s.grid));
    double prev = norm_l2(u0);
    double worst = -1e300;
    deterministic_flow_traced(pure, cfg, snap_duration(2.0, cfg.dt), u0,
                              [&](double, const Field&, const Field& u) {
                                const double n = norm_l2(u);
                                worst = std::max(worst, n - prev);
                                prev = n;
                              });
    vb.add("spde.cubic_monotone.max_norm_increase", worst, 1e-12);
  }
}

void verify_attractor(VerifyBuilder& vb, const VerifyScale& s) {
  const ExperimentConfig& config = s.config;
  const SolverConfig cfg = s.cfg;
  const Grid1D g = s.grid;

  {  // semidistance axioms on synthetic clouds
    const AbsorbingBall ball{1.0, 0.0, 0.0};
    auto pts = seed_ensemble(ball, g, 6, 0xd15ull);
    const std::vector<Field> Y(pts.begin(), pts.begin() + 4);
    const std::vector<Field> Z(pts.begin() + 2, pts.end());
    vb.add("attractor.semidist_self.dist", hausdorff_semidist(Y, Y), 0.0);
    double worst = -1e300;
    for (int reps = 0; reps < 3; ++reps) {
      auto W = seed_ensemble(ball, g, 3 + reps, 0x7777ull + static_cast<std::uint64_t>(reps));
      const double dYW = hausdorff_semidist(Y, W);
      const double dYZ = hausdorff_semidist(Y, Z);
      const double dZW = hausdorff_semidist(Z, W);
      worst = std::max(worst, dYW - (dYZ + dZW));
    }
    vb.add("attractor.semidist_triangle.max_violation", worst, 1e-12);
    std::vector<Field> Zbig = Z;
    Zbig.push_back(pts[0]);
    vb.add("attractor.semidist_monotone.max_violation",
           hausdorff_semidist(Y, Zbig) - hausdorff_semidist(Y, Z), 1e-15);
  }

  const auto [t_min, t_max] = config.path_window(20.0 + 2.0);
  const WienerPath omega = sample_path(s.seeds.front(), cfg.dt, t_min, t_max);
  const ProblemSpec spec = config.problem(0.5);
  const double M = calibrate_absorbing_radius(spec, cfg, &omega, snap_duration(10.0, cfg.dt));

  {  // pullback resolution shrinks as T doubles
    std::vector<double> res;
    for (double T : {5.0, 10.0, 20.0})
      res.push_back(pullback_attractor(spec, cfg, omega, snap_duration(T, cfg.dt), 4,
                                       config.dedup_tol, M)
                        .resolution);
    const double worst = std::max(res[1] - res[0], res[2] - res[1]);
    vb.add("attractor.resolution_trend.max_increase", worst, 1e-9, 0.5, omega.seed());
  }
  {  // invariance up to resolution: Phi_s(A(w)) tracks A(theta_s w)
    const double T = snap_duration(10.0, cfg.dt);
    const AttractorCloud A = pullback_attractor(spec, cfg, omega, T, 4, config.dedup_tol, M);
    double worst = -1e300;
    for (double sft : {1.0, 2.0}) {
      const double s_aligned = snap_duration(sft, cfg.dt);
      const WienerPath w_s = shift(omega, s_aligned);
      const AttractorCloud A_s =
          pullback_attractor(spec, cfg, w_s, T, 4, config.dedup_tol, M);
      OuProcess ou(omega, spec.lambda, spec.nonlin.p);
      std::vector<Field> pushed;
      pushed.reserve(A.points.size());
      for (const Field& p : A.points) pushed.push_back(cocycle(spec, cfg, s_aligned, ou, p));
      const double d = hausdorff_semidist(pushed, A_s.points);
      const double allowance = 3.0 * std::max(A.resolution, A_s.resolution);
      worst = std::max(worst, d - allowance);
    }
    vb.add("attractor.invariance_probe.max_excess", worst, 0.0, 0.5, omega.seed());
  }
  {  // linear random fixed point against the Duhamel series, and eps-linearity
    ProblemSpec lin = config.problem(0.5);
    lin.nonlin = Nonlinearity::none(g);
    const double T = snap_duration(20.0, cfg.dt);
    const Field A0_point = linear_poisson_solve(g, lin.lambda, lin.g);
    double worst_rel = 0.0;
    std::vector<double> ratios;
    for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
      const ProblemSpec leps = lin.with_epsilon(eps);
      const AttractorCloud cloud =
          pullback_attractor(leps, cfg, omega, T, 3, config.dedup_tol, M);
      const OuProcess ou(omega, leps.lambda, leps.nonlin.p);
      const Field oracle = duhamel_fixed_point(leps, cfg, ou, T);
      double cloud_err = 0.0;
      for (const Field& p : cloud.points)
        cloud_err = std::max(cloud_err, norm_l2(p - oracle) / std::max(norm_l2(oracle), 1e-30));
      worst_rel = std::max(worst_rel, cloud_err);
      double dist = 0.0;
      for (const Field& p : cloud.points) dist = std::max(dist, norm_l2(p - A0_point));
      ratios.push_back(dist / eps);
    }
    vb.add("attractor.linear_duhamel.max_rel_err", worst_rel, 1e-4, 0.5, omega.seed(), 20.0);
    const double mid = median(ratios);
    double spread = 0.0;
    for (double r : ratios) spread = std::max(spread, std::abs(r / mid - 1.0));
    vb.add("attractor.linear_eps_ratio.max_rel_spread", spread, 0.01, 0.5, omega.seed(), 20.0);
  }
}

void verify_estimates(VerifyBuilder& vb, const VerifyScale& s, int jobs) {
  const ExperimentConfig& config = s.config;
  const SolverConfig cfg = s.cfg;

  {  // cutoff profile values, derivative bound, and the sandwich property
    double dev = std::abs(cutoff_rho(0.5) - 0.0);
    dev = std::max(dev, std::abs(cutoff_rho(3.0) - 1.0));
    dev = std::max(dev, std::abs(cutoff_rho(1.5) - 0.5));
    vb.add("estimates.cutoff_values.max_dev", dev, 1e-15);
    double max_deriv = 0.0;
    for (int i = 0; i <= 4000; ++i) max_deriv = std::max(max_deriv, std::abs(cutoff_rho_deriv(0.001 * i)));
    vb.add("estimates.cutoff_deriv_bound.dev", std::abs(max_deriv - kCutoffDerivBound), 1e-9);

    const Field u = Field::from_function(s.grid, [](double x) { return std::exp(-0.2 * x * x) * (1.0 + 0.3 * x); });
    double worst = -1e300;
    for (double k : {s.grid.L / 6.0, s.grid.L / 4.0, s.grid.L / 3.0}) {
      double weighted = 0.0;
      for (int i = 0; i < u.size(); ++i) {
        const double x = u.grid().node(i);
        weighted += cutoff_rho(x * x / (k * k)) * u[i] * u[i];
      }
      weighted *= u.grid().hx;
      worst = std::max(worst, tail_mass(u, std::sqrt(2.0) * k) - weighted);
      worst = std::max(worst, weighted - tail_mass(u, k));
    }
    vb.add("estimates.cutoff_sandwich.max_violation", worst, 1e-12);
  }

  const double T = std::min(config.T_pullback, 10.0);
  // Far-field horizons stay past the transient so certificates are not
  // contaminated by the ensemble's own tails.
  const double T_far = snap_duration(std::max(config.T_pullback, 10.0), cfg.dt);
  const auto [t_min, t_max] = config.path_window(std::max(T_far, config.T_pullback));
  const double M = 2.0;  // fixed probe ball for the protocol ensembles
  const AbsorbingBall ball{M, 0.0, 0.0};
  const auto members = seed_ensemble(ball, s.grid, 5, 0xbadbeefull);
  const std::vector<double> eps_verify = {0.5, 0.25, 0.125};
  const std::vector<double> horizons = {snap_duration(0.5 * T, cfg.dt),
                                        snap_duration(0.75 * T, cfg.dt),
                                        snap_duration(T, cfg.dt)};

  struct ProtocolSample {
    double eps, horizon;
    std::uint64_t seed;
    std::size_t member;
    EnergyReport rep;
    double u_norm_sq = 0.0;
    double grad_v_sq = 0.0;
  };
  std::vector<ProtocolSample> samples;
  for (double eps : {0.0, 1.0, 0.5, 0.25, 0.125})
    for (std::uint64_t seed : s.seeds)
      for (std::size_t m = 0; m < members.size(); ++m)
        for (double horizon : horizons) samples.push_back({eps, horizon, seed, m, {}, 0.0, 0.0});

  parallel_for(samples.size(), jobs, [&](std::size_t i) {
    ProtocolSample& ps = samples[i];
    const WienerPath omega = sample_path(ps.seed, cfg.dt, t_min, t_max);
    const ProblemSpec spec = config.problem(ps.eps);
    ps.rep = energy_report(spec, cfg, omega, ps.horizon, members[ps.member]);
    const PullbackState st = pullback_state(spec, cfg, omega, ps.horizon, members[ps.member]);
    ps.u_norm_sq = norm_l2(st.u) * norm_l2(st.u);
    const double gv = norm_h1_semi(st.v);
    ps.grad_v_sq = gv * gv;
  });

  auto protocol_row = [&](const std::string& name, double slack, auto value_of, auto decay_of) {
    std::vector<BoundSample> fit0, fit1, rest;
    for (const ProtocolSample& ps : samples) {
      BoundSample b{ps.eps, ps.rep.r_hat, value_of(ps), decay_of(ps)};
      if (ps.eps == 0.0)
        fit0.push_back(b);
      else if (ps.eps == 1.0)
        fit1.push_back(b);
      else
        rest.push_back(b);
    }
    const FrozenBound fb = fit_freeze(fit0, fit1);
    double worst = -1e300;
    for (const BoundSample& b : rest) {
      const double scale = 1.0 + std::abs(b.decay_term + fb.c1 + b.epsilon * fb.c2 * b.r_hat);
      worst = std::max(worst, bound_excess(fb, b) / scale);
    }
    vb.add(name, worst, slack, 0.25, s.seeds.front(), T);
  };

  // The transformed-chart energies interpolate between the calibration
  // extremes only up to the nonlinear response's curvature; 2% covers it.
  // The absorbing bound itself (lemma52 row) is held to zero violations.
  const double interp_slack = 0.02;
  protocol_row("estimates.lemma51_vnorm.max_rel_excess", interp_slack,
               [](const ProtocolSample& p) { return p.rep.v_norm_sq; },
               [](const ProtocolSample& p) { return p.rep.decay_term; });
  protocol_row("estimates.lemma51_gradhist.max_rel_excess", interp_slack,
               [](const ProtocolSample& p) { return p.rep.grad_hist_integral; },
               [](const ProtocolSample& p) { return p.rep.decay_term; });
  protocol_row("estimates.lemma51_lphist.max_rel_excess", interp_slack,
               [](const ProtocolSample& p) { return p.rep.lp_hist_integral; },
               [](const ProtocolSample& p) { return p.rep.decay_term; });
  protocol_row("estimates.lemma52_unorm.max_rel_excess", 1e-9,
               [](const ProtocolSample& p) { return p.u_norm_sq; },
               [](const ProtocolSample&) { return 0.0; });
  protocol_row("estimates.lemma53_gradnorm.max_rel_excess", interp_slack,
               [](const ProtocolSample& p) { return p.grad_v_sq; },
               [](const ProtocolSample&) { return 0.0; });

  {  // Far-field eps-uniformity: the eps = 1 radius works for smaller eps.
    const double eta_tail = 1e-4;
    std::vector<double> R_grid;
    for (double R = 0.0; R <= s.grid.L + 1e-9; R += s.grid.L / 20.0)
      R_grid.push_back(std::min(R, s.grid.L));
    int violations = 0;
    const double T_tail = T_far;
    for (std::uint64_t seed : s.seeds) {
      const WienerPath omega = sample_path(seed, cfg.dt, t_min, t_max);
      const Field& u0 = members[1];
      // The uniform radius witness is calibrated at both eps extremes; the
      // eps = 1 minimum alone is not uniform pathwise (its far field can
      // interfere destructively with the limiting one at the threshold).
      const auto tails1 = tail_report(config.problem(1.0), cfg, omega, T_tail, u0, R_grid);
      const auto tails0 = tail_report(config.problem(0.0), cfg, omega, T_tail, u0, R_grid);
      std::size_t R_idx = R_grid.size() - 1;
      for (std::size_t i = 0; i < R_grid.size(); ++i)
        if (tails1[i] < eta_tail && tails0[i] < eta_tail) {
          R_idx = i;
          break;
        }
      for (double eps : eps_verify) {
        const auto tails = tail_report(config.problem(eps), cfg, omega, T_tail, u0, R_grid);
        if (!(tails[R_idx] < eta_tail)) ++violations;
      }
    }
    vb.add("estimates.lemma54_tail_uniformity.violations", violations, 0.0, 1.0,
           s.seeds.front(), T_tail);
  }
  {  // Union far-field certificate over pullback clouds at the config eta.
    std::vector<AttractorCloud> clouds;
    const WienerPath omega = sample_path(s.seeds.front(), cfg.dt, t_min, t_max);
    const double T_cloud = T_far;
    const double Mcal = calibrate_absorbing_radius(config.problem(1.0), cfg, &omega, T_cloud);
    for (double eps : {1.0, 0.5, 0.25})
      clouds.push_back(pullback_attractor(config.problem(eps), cfg, omega, T_cloud, 3,
                                          config.dedup_tol, Mcal));
    std::vector<const AttractorCloud*> ptrs;
    for (const AttractorCloud& c : clouds) ptrs.push_back(&c);
    const CoveringReport rep = union_precompactness_probe(ptrs, config.eta);
    vb.add("estimates.lemma54_union_tail.max_tail", rep.max_tail,
           (config.eta / 4.0) * (config.eta / 4.0), 1.0, s.seeds.front(), T);
  }

  {  // Solution-convergence bound: the eps-coefficient frozen on the first
     // seed (with headroom) covers the other seeds, and is stable under
     // halving dt and doubling the probe ensemble.
    const double T_conv = snap_duration(2.0, cfg.dt);
    const std::vector<double> eps_grid = {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
    // max-fit: the smallest coefficient making the bound hold on the grid
    auto fitted_coeff = [&](std::uint64_t seed, bool halve_dt, int n_members, bool mean_fit) {
      // dt halving must ride the same sample path: refine by Brownian bridge.
      WienerPath omega = sample_path(seed, cfg.dt, t_min, t_max);
      if (halve_dt) omega = omega.refine_half();
      const SolverConfig c2{omega.dt()};
      const double r_hat = OuProcess(omega, config.lambda, 4.0).r_hat();
      double coeff = 0.0;
      int count = 0;
      for (int m = 1; m <= n_members; ++m) {
        const Field& u0 = members[static_cast<std::size_t>(m % members.size())];
        const double u0sq = norm_l2(u0) * norm_l2(u0);
        for (double eps : eps_grid) {
          const auto curve = convergence_check(config.problem(eps), c2, omega, T_conv, u0, u0);
          const double ratio = curve.sup_err_sq / (eps * (r_hat + 2.0 * u0sq));
          if (mean_fit) {
            coeff += ratio;
            ++count;
          } else {
            coeff = std::max(coeff, ratio);
          }
        }
      }
      return mean_fit ? coeff / count : coeff;
    };
    const double C0 = fitted_coeff(s.seeds.front(), false, 2, false);
    double worst = -1e300;
    for (std::size_t i = 1; i < s.seeds.size(); ++i)
      worst = std::max(worst, fitted_coeff(s.seeds[i], false, 2, false) / (3.0 * C0) - 1.0);
    if (s.seeds.size() < 2) worst = 0.0;
    vb.add("estimates.lemma62_bound.max_excess", worst, 0.0, 0.5, s.seeds.front(), T_conv);
    // Stability under refinement uses the ensemble-averaged fit; a max over
    // a doubled member set is an extreme statistic and moves on its own.
    const double C_mean = fitted_coeff(s.seeds.front(), false, 2, true);
    const double C_fine = fitted_coeff(s.seeds.front(), true, 4, true);
    vb.add("estimates.lemma62_coeff_stability.rel_change", std::abs(C_fine / C_mean - 1.0), 0.2,
           0.5, s.seeds.front(), T_conv);
  }
}

void verify_harness(VerifyBuilder& vb, const VerifyScale& s) {
  const auto j1 = s.config.to_json();
  const ExperimentConfig back = ExperimentConfig::from_json(j1);
  const auto j2 = back.to_json();
  vb.add("harness.config_roundtrip.mismatch", j1.dump() == j2.dump() ? 0.0 : 1.0, 0.0);
}

}  // namespace

int verify_inventory_size() { return 41; }

VerifyReport run_verify(const ExperimentConfig& config, int jobs) {
  config.validate();
  VerifyReport report;
  VerifyBuilder vb(report);

  VerifyScale scale{config, config.solver(), config.grid(), std::min(config.T_pullback, 10.0),
                    sample_path(config.seeds.front(), config.dt, config.path_window(config.T_pullback).first,
                                config.path_window(config.T_pullback).second),
                    {}};
  scale.seeds.assign(config.seeds.begin(),
                     config.seeds.begin() + std::min<std::size_t>(config.seeds.size(), 3));

  verify_noise(vb, scale);
  verify_field(vb, scale);
  verify_spde(vb, scale);
  verify_attractor(vb, scale);
  verify_estimates(vb, scale, jobs);
  verify_harness(vb, scale);
  return report;
}

}  // namespace rdlab
