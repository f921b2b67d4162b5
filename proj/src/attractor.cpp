#include "rdlab/attractor.hpp"

#include <cmath>
#include <stdexcept>

#include "rdlab/rng.hpp"

namespace rdlab {

namespace {
constexpr std::uint64_t kEnsembleSalt = 0x5eed5a17ull;
constexpr std::uint64_t kCalibrationSeed = 0xca11b8ull;
constexpr double kRadiusFloor = 0.1;
constexpr int kLowModes = 8;
}  // namespace

std::vector<Field> seed_ensemble(const AbsorbingBall& ball, const Grid1D& grid, int count,
                                 std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("seed_ensemble: count must be >= 1");
  const double radius = ball.radius();
  std::vector<Field> out;
  out.reserve(static_cast<std::size_t>(count));
  out.emplace_back(grid);  // the zero field is always a member

  const int modes = std::min(kLowModes, grid.N);
  std::vector<Field> basis;
  basis.reserve(static_cast<std::size_t>(modes));
  for (int k = 1; k <= modes; ++k) basis.push_back(dirichlet_eigenvector(grid, k));

  std::uint64_t draw = 0;
  for (int m = 1; m < count; ++m) {
    Field u(grid);
    for (int k = 0; k < modes; ++k) {
      const double c = rng_gauss(seed, draw++);
      for (int i = 0; i < grid.N; ++i) u[i] += c * basis[static_cast<std::size_t>(k)][i];
    }
    const double n = norm_l2(u);
    const double fill = rng_unit(seed, mix64(draw++) | 1);  // in (0, 1]
    if (n > 0.0) u *= radius * fill / n;
    out.push_back(std::move(u));
  }
  return out;
}

double calibrate_absorbing_radius(const ProblemSpec& spec, const SolverConfig& cfg,
                                  const WienerPath* omega, double T) {
  AbsorbingBall probe{1.0, 0.0, 0.0};
  auto ensemble = seed_ensemble(probe, spec.grid, 5, kCalibrationSeed);
  double max_norm = 0.0;
  if (omega != nullptr) {
    const ProblemSpec cal = spec.with_epsilon(1.0);
    const PullbackContext ctx = make_pullback_context(cal, *omega, T);
    for (const Field& u0 : ensemble)
      max_norm = std::max(max_norm, norm_l2(pullback_evolve(cal, cfg, ctx, u0)));
  } else {
    const ProblemSpec cal = spec.with_epsilon(0.0);
    for (const Field& u0 : ensemble)
      max_norm = std::max(max_norm, norm_l2(deterministic_flow(cal, cfg, T, u0)));
  }
  return std::max(2.0 * max_norm, kRadiusFloor);
}

std::vector<Field> dedup_points(const std::vector<Field>& points, double tol) {
  std::vector<Field> kept;
  for (const Field& p : points) {
    bool merged = false;
    for (const Field& q : kept) {
      if (norm_l2(p - q) <= tol) {
        merged = true;
        break;
      }
    }
    if (!merged) kept.push_back(p);
  }
  return kept;
}

namespace {

AttractorCloud build_cloud(const ProblemSpec& spec, const SolverConfig& cfg,
                           const WienerPath* omega, double T, int ensemble_count,
                           double dedup_tol, double M, std::uint64_t ensemble_seed) {
  if (!(dedup_tol > 0.0)) throw std::invalid_argument("attractor: dedup_tol must be positive");
  if (M <= 0.0) M = calibrate_absorbing_radius(spec, cfg, omega, T);

  double r_hat = 0.0;
  if (omega != nullptr && spec.epsilon != 0.0)
    r_hat = OuProcess(*omega, spec.lambda, spec.nonlin.p).r_hat();
  const AbsorbingBall ball{M, spec.epsilon, r_hat};
  if (ensemble_seed == 0)
    ensemble_seed = omega != nullptr ? mix64(omega->seed() ^ kEnsembleSalt) : kEnsembleSalt;
  auto ensemble = seed_ensemble(ball, spec.grid, ensemble_count, ensemble_seed);

  const std::int64_t steps = steps_for(T, cfg.dt);
  const double T_half = static_cast<double>(steps / 2) * cfg.dt;

  std::vector<Field> image_full, image_half;
  image_full.reserve(ensemble.size());
  image_half.reserve(ensemble.size());
  if (spec.epsilon == 0.0 || omega == nullptr) {
    const ProblemSpec det = spec.with_epsilon(0.0);
    for (const Field& u0 : ensemble) {
      image_full.push_back(deterministic_flow(det, cfg, T, u0));
      image_half.push_back(deterministic_flow(det, cfg, T_half, u0));
    }
  } else {
    const PullbackContext ctx_full = make_pullback_context(spec, *omega, T);
    const PullbackContext ctx_half = make_pullback_context(spec, *omega, T_half);
    for (const Field& u0 : ensemble) {
      image_full.push_back(pullback_evolve(spec, cfg, ctx_full, u0));
      image_half.push_back(pullback_evolve(spec, cfg, ctx_half, u0));
    }
  }

  AttractorCloud cloud;
  cloud.points = dedup_points(image_full, dedup_tol);
  cloud.pullback_time = T;
  cloud.dedup_tol = dedup_tol;
  cloud.resolution = hausdorff_semidist(cloud.points, dedup_points(image_half, dedup_tol));
  return cloud;
}

}  // namespace

AttractorCloud pullback_attractor(const ProblemSpec& spec, const SolverConfig& cfg,
                                  const WienerPath& omega, double T, int ensemble_count,
                                  double dedup_tol, double M, std::uint64_t ensemble_seed) {
  return build_cloud(spec, cfg, &omega, T, ensemble_count, dedup_tol, M, ensemble_seed);
}

AttractorCloud global_attractor(const ProblemSpec& spec, const SolverConfig& cfg, double T,
                                int ensemble_count, double dedup_tol, double M,
                                std::uint64_t ensemble_seed) {
  return build_cloud(spec.with_epsilon(0.0), cfg, nullptr, T, ensemble_count, dedup_tol, M,
                     ensemble_seed);
}

double hausdorff_semidist(const std::vector<Field>& Y, const std::vector<Field>& Z) {
  if (Z.empty()) throw std::invalid_argument("hausdorff_semidist: Z must be nonempty");
  if (!Y.empty()) require_same_grid(Y.front(), Z.front(), "hausdorff_semidist");
  double worst = 0.0;
  for (const Field& y : Y) {
    double best = norm_l2(y - Z.front());
    for (std::size_t j = 1; j < Z.size(); ++j) {
      const double d = norm_l2(y - Z[j]);
      if (d < best) best = d;  // strict: ties keep the lowest index
    }
    if (best > worst) worst = best;
  }
  return worst;
}

double hausdorff_semidist(const AttractorCloud& Y, const AttractorCloud& Z) {
  return hausdorff_semidist(Y.points, Z.points);
}

CoveringReport union_precompactness_probe(const std::vector<const AttractorCloud*>& clouds,
                                          double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("union_precompactness_probe: eta must be positive");
  if (clouds.empty()) throw std::invalid_argument("union_precompactness_probe: no clouds");

  std::vector<const Field*> pooled;
  for (const AttractorCloud* c : clouds)
    for (const Field& p : c->points) pooled.push_back(&p);
  if (pooled.empty()) throw std::invalid_argument("union_precompactness_probe: no points");

  const Grid1D& grid = pooled.front()->grid();
  std::vector<const Field*> centers;
  for (const Field* p : pooled) {
    bool covered = false;
    for (const Field* c : centers) {
      if (norm_l2(*p - *c) <= eta) {
        covered = true;
        break;
      }
    }
    if (!covered) centers.push_back(p);
  }

  CoveringReport rep;
  rep.eta = eta;
  rep.pooled_points = static_cast<int>(pooled.size());
  rep.net_size = static_cast<int>(centers.size());
  rep.R = grid.L / 2.0;
  rep.max_tail = 0.0;
  for (const Field* p : pooled) rep.max_tail = std::max(rep.max_tail, tail_mass(*p, rep.R));
  rep.tail_ok = rep.max_tail <= (eta / 4.0) * (eta / 4.0);
  return rep;
}

}  // namespace rdlab
