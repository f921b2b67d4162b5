#pragma once

#include <cstdint>
#include <vector>

#include "rdlab/spde.hpp"

namespace rdlab {

/// Random absorbing ball K_eps(w) = { u : ||u|| <= M + eps M r_hat }.
struct AbsorbingBall {
  double M = 1.0;
  double epsilon = 0.0;
  double r_hat = 0.0;
  double radius() const { return M + epsilon * M * r_hat; }
};

/// Finite approximation of an attractor: deduplicated image cloud plus the
/// certificate that measures how unconverged the pullback still is
/// (distance between the T and T/2 images of the same ensemble).
struct AttractorCloud {
  std::vector<Field> points;
  double pullback_time = 0.0;
  double resolution = 0.0;
  double dedup_tol = 0.0;
};

/// count states inside the ball: the zero field plus low-mode random
/// combinations of the first 8 Dirichlet eigenvectors, rescaled into the
/// ball. Deterministic in seed.
std::vector<Field> seed_ensemble(const AbsorbingBall& ball, const Grid1D& grid, int count,
                                 std::uint64_t seed);

/// Deterministic absorbing-radius calibration: evolve a probe ensemble at
/// eps = 1 (eps = 0 when no path is supplied) over the pullback horizon and
/// return twice the largest observed ||u(0)||, floored away from zero.
double calibrate_absorbing_radius(const ProblemSpec& spec, const SolverConfig& cfg,
                                  const WienerPath* omega, double T);

/// Pullback attractor approximation: evolves the absorbing-ball ensemble by
/// Phi_eps(T, theta_{-T} w, .), deduplicates at dedup_tol, and records the
/// T-vs-T/2 resolution certificate. M <= 0 requests auto-calibration;
/// ensemble_seed == 0 derives the ensemble from the path seed.
AttractorCloud pullback_attractor(const ProblemSpec& spec, const SolverConfig& cfg,
                                  const WienerPath& omega, double T, int ensemble_count,
                                  double dedup_tol, double M = 0.0,
                                  std::uint64_t ensemble_seed = 0);

/// Global attractor of the eps = 0 flow (forward evolution equals pullback
/// for the autonomous system).
AttractorCloud global_attractor(const ProblemSpec& spec, const SolverConfig& cfg, double T,
                                int ensemble_count, double dedup_tol, double M = 0.0,
                                std::uint64_t ensemble_seed = 0);

/// Hausdorff semi-distance sup_{y in Y} inf_{z in Z} ||y - z||; asymmetric.
/// Ties resolve to the lowest index; empty Z is an error.
double hausdorff_semidist(const std::vector<Field>& Y, const std::vector<Field>& Z);
double hausdorff_semidist(const AttractorCloud& Y, const AttractorCloud& Z);

/// Greedy eta-net over the pooled points of several clouds plus the far-field
/// certificate: max tail mass beyond R = L/2 must stay below (eta/4)^2.
struct CoveringReport {
  double eta = 0.0;
  int pooled_points = 0;
  int net_size = 0;
  double R = 0.0;
  double max_tail = 0.0;
  bool tail_ok = false;
};
CoveringReport union_precompactness_probe(const std::vector<const AttractorCloud*>& clouds,
                                          double eta);

std::vector<Field> dedup_points(const std::vector<Field>& points, double tol);

}  // namespace rdlab
