#pragma once

#include <functional>
#include <stdexcept>

#include "rdlab/field.hpp"
#include "rdlab/noise.hpp"

namespace rdlab {

/// Raised when a step produces non-finite values or the explicit nonlinear
/// term exceeds its stability budget; carries a diagnostic message.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Built-in dissipative family f(x, s) = -a s^3 + b(x) s with growth
/// exponent p = 4 and compactly supported b. The structure envelopes
/// (alpha_i, beta, psi_i) are derived from (a, b), not user inputs:
///   f(x,s) s     <= -(a/2) s^4 + b^2/(2a)
///   df/ds        <= max b
///   |df/ds|      <= 3a s^2 + |b|
/// The degenerate a == 0, b == 0 member represents f == 0 (linear problems).
struct Nonlinearity {
  double a = 0.0;
  Field b;
  double p = 4.0;

  static Nonlinearity cubic(double a, Field b);
  static Nonlinearity none(const Grid1D& g);

  bool is_zero() const { return a == 0.0; }

  double alpha1() const { return 0.5 * a; }
  double alpha2() const { return a + 1.0 / 3.0; }
  double alpha3() const { return 3.0 * a; }
  double beta() const;
  double q() const { return p / (p - 1.0); }
  Field psi1() const;  // b^2 / (2a)
  Field psi2() const;  // (2/3) |b|^(3/2)
  Field psi3() const;  // |D_h b|, per-unit-s envelope of df/dx (reference only)
  Field psi4() const;  // |b|
};

/// Pointwise f(x, u).
Field f_eval(const Nonlinearity& nonlin, const Field& u);

/// Samples (x, s) on a rectangle and reports the worst signed violation of
/// each testable structure condition (negative or zero means it holds).
struct StructureCheck {
  double worst_f1 = 0.0;
  double worst_f3 = 0.0;
  double worst_fcond = 0.0;
  bool ok(double tol = 0.0) const {
    return worst_f1 <= tol && worst_f3 <= tol && worst_fcond <= tol;
  }
};
StructureCheck check_structure_conditions(const Nonlinearity& nonlin, double s_max, int s_samples);

struct ProblemSpec {
  double lambda = 1.0;
  double epsilon = 0.0;  // in [0, 1]; 0 selects the deterministic flow
  Field g;
  Field h;
  Nonlinearity nonlin;
  Grid1D grid;

  void validate() const;
  ProblemSpec with_epsilon(double eps) const;
};

struct SolverConfig {
  double dt = 1e-3;  // must equal the noise grid spacing
};

/// Semi-implicit step for the transformed equation: the stiff linear part
/// (lambda - Laplacian) is implicit, the nonlinearity and noise terms are
/// explicit at the step's left endpoint. The tridiagonal factorization is
/// precomputed once per (grid, lambda, dt).
class Stepper {
 public:
  Stepper(const ProblemSpec& spec, const SolverConfig& cfg);

  /// One step of v. z and z_lap may be null when epsilon == 0.
  Field step(const Field& v, const Field* z, const Field* z_lap) const;

  /// In-place raw-buffer variant used by the time loops.
  void step_inplace(std::vector<double>& v, const double* z, const double* z_lap) const;

  double dt() const { return dt_; }

 private:
  Grid1D grid_;
  double lambda_ = 0.0;
  double epsilon_ = 0.0;
  double dt_ = 0.0;
  double a_ = 0.0;
  std::vector<double> b_;
  std::vector<double> g_;
  // Thomas factorization of (I + dt(lambda - Lap_h)): constant tridiagonal.
  double off_ = 0.0;
  std::vector<double> cprime_;
  std::vector<double> inv_diag_;
  mutable std::vector<double> rhs_;
};

/// (I + dt(lambda - Lap_h)) v+ = v + dt [ f(x, v + eps z) + g + eps z_lap ]
Field step_v(const ProblemSpec& spec, const SolverConfig& cfg, const Field& v,
             const Field& z_now, const Field& z_lap_now);

/// Solution cocycle Phi_eps(t, w, u0) via the transform
/// u = v + eps z(theta_t w), v0 = u0 - eps z(w). For epsilon == 0 the noise
/// terms are skipped entirely and the result is the deterministic semigroup.
Field cocycle(const ProblemSpec& spec, const SolverConfig& cfg, double t,
              const WienerPath& omega, const Field& u0);

/// Shared-OU variant; use when several trajectories ride the same path.
Field cocycle(const ProblemSpec& spec, const SolverConfig& cfg, double t,
              const OuProcess& ou, const Field& u0);

/// Observer hook: called at every grid time including tau = 0 and tau = t
/// with the transformed state v and the reconstructed state u.
using TrajectoryObserver = std::function<void(double tau, const Field& v, const Field& u)>;

Field cocycle_traced(const ProblemSpec& spec, const SolverConfig& cfg, double t,
                     const OuProcess& ou, const Field& u0, const TrajectoryObserver& observe);

/// Evolve the transformed chart directly from lemma-style initial data v0
/// (no initial conjugation); the observer still sees u = v + eps z.
Field evolve_transformed_traced(const ProblemSpec& spec, const SolverConfig& cfg, double t,
                                const OuProcess& ou, const Field& v0,
                                const TrajectoryObserver& observe);

/// Phi with epsilon forced to 0; needs no sample path.
Field deterministic_flow(const ProblemSpec& spec, const SolverConfig& cfg, double t,
                         const Field& u0);
Field deterministic_flow_traced(const ProblemSpec& spec, const SolverConfig& cfg, double t,
                                const Field& u0, const TrajectoryObserver& observe);

/// Pullback evolution Phi_eps(T, theta_{-T} w, u0): initial data posed at
/// time -T, observed at time 0. The context carries the shifted path and its
/// OU so ensembles share one accumulation.
struct PullbackContext {
  WienerPath path;  // theta_{-T} w
  OuProcess ou;
  double T;
};
PullbackContext make_pullback_context(const ProblemSpec& spec, const WienerPath& omega, double T);
Field pullback_evolve(const ProblemSpec& spec, const SolverConfig& cfg,
                      const PullbackContext& ctx, const Field& u0);

std::int64_t steps_for(double t, double dt);

/// Nearest grid-aligned duration (for internally derived horizons).
double snap_duration(double t, double dt);

}  // namespace rdlab
