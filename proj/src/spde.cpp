#include "rdlab/spde.hpp"

#include <cmath>
#include <sstream>

namespace rdlab {

namespace {
// Abort threshold for the explicit nonlinear term: dt * 3a * max|u|^2 past
// this means the step left its accuracy/stability envelope.
constexpr double kStabilityBudget = 2.0;
}  // namespace

Nonlinearity Nonlinearity::cubic(double a, Field b) {
  if (!(a > 0.0)) throw std::invalid_argument("Nonlinearity::cubic: a must be positive");
  const Grid1D& g = b.grid();
  const double support = g.L / 4.0;
  for (int i = 0; i < g.N; ++i)
    if (b[i] != 0.0 && std::abs(g.node(i)) > support)
      throw std::invalid_argument("Nonlinearity::cubic: b must be supported inside |x| <= L/4");
  Nonlinearity n;
  n.a = a;
  n.b = std::move(b);
  n.p = 4.0;
  return n;
}

Nonlinearity Nonlinearity::none(const Grid1D& g) {
  Nonlinearity n;
  n.a = 0.0;
  n.b = Field(g);
  n.p = 4.0;
  return n;
}

double Nonlinearity::beta() const {
  double m = 0.0;
  for (int i = 0; i < b.size(); ++i) m = std::max(m, b[i]);
  return m;
}

Field Nonlinearity::psi1() const {
  if (is_zero()) return Field(b.grid());
  Field out(b.grid());
  for (int i = 0; i < b.size(); ++i) out[i] = b[i] * b[i] / (2.0 * a);
  return out;
}

Field Nonlinearity::psi2() const {
  Field out(b.grid());
  for (int i = 0; i < b.size(); ++i) out[i] = (2.0 / 3.0) * std::pow(std::abs(b[i]), 1.5);
  return out;
}

Field Nonlinearity::psi3() const {
  // Per-unit-s envelope of df/dx = b'(x) s, centered differences.
  const Grid1D& g = b.grid();
  Field out(g);
  for (int i = 0; i < g.N; ++i) {
    const double left = (i > 0) ? b[i - 1] : 0.0;
    const double right = (i + 1 < g.N) ? b[i + 1] : 0.0;
    out[i] = std::abs(right - left) / (2.0 * g.hx);
  }
  return out;
}

Field Nonlinearity::psi4() const {
  Field out(b.grid());
  for (int i = 0; i < b.size(); ++i) out[i] = std::abs(b[i]);
  return out;
}

Field f_eval(const Nonlinearity& nonlin, const Field& u) {
  require_same_grid(nonlin.b, u, "f_eval");
  Field out(u.grid());
  for (int i = 0; i < u.size(); ++i) out[i] = u[i] * (nonlin.b[i] - nonlin.a * u[i] * u[i]);
  return out;
}

StructureCheck check_structure_conditions(const Nonlinearity& nonlin, double s_max, int s_samples) {
  StructureCheck r;
  if (nonlin.is_zero()) return r;
  const double a = nonlin.a;
  const double beta = nonlin.beta();
  for (int i = 0; i < nonlin.b.size(); ++i) {
    const double bx = nonlin.b[i];
    for (int j = 0; j <= s_samples; ++j) {
      const double s = -s_max + 2.0 * s_max * j / s_samples;
      const double fs = -a * s * s * s + bx * s;
      const double dfds = -3.0 * a * s * s + bx;
      const double s2 = s * s;
      r.worst_f1 = std::max(r.worst_f1, fs * s - (-0.5 * a * s2 * s2 + bx * bx / (2.0 * a)));
      r.worst_f3 = std::max(r.worst_f3, dfds - beta);
      r.worst_fcond = std::max(r.worst_fcond, std::abs(dfds) - (3.0 * a * s2 + std::abs(bx)));
    }
  }
  return r;
}

void ProblemSpec::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("ProblemSpec: lambda must be positive");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("ProblemSpec: epsilon must lie in [0, 1]");
  if (!(g.grid() == grid) || !(h.grid() == grid) || !(nonlin.b.grid() == grid))
    throw std::invalid_argument("ProblemSpec: field grids do not match");
}

ProblemSpec ProblemSpec::with_epsilon(double eps) const {
  ProblemSpec s = *this;
  s.epsilon = eps;
  return s;
}

Stepper::Stepper(const ProblemSpec& spec, const SolverConfig& cfg) {
  spec.validate();
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be positive");
  grid_ = spec.grid;
  lambda_ = spec.lambda;
  epsilon_ = spec.epsilon;
  dt_ = cfg.dt;
  a_ = spec.nonlin.a;
  b_ = spec.nonlin.b.values();
  g_ = spec.g.values();

  const int n = grid_.N;
  const double c = dt_ / (grid_.hx * grid_.hx);
  const double diag = 1.0 + dt_ * lambda_ + 2.0 * c;
  off_ = -c;
  cprime_.resize(static_cast<std::size_t>(n));
  inv_diag_.resize(static_cast<std::size_t>(n));
  rhs_.resize(static_cast<std::size_t>(n));
  double denom = diag;
  for (int i = 0; i < n; ++i) {
    if (i > 0) denom = diag - off_ * cprime_[static_cast<std::size_t>(i - 1)];
    // Strictly diagonally dominant for lambda > 0, dt > 0; cannot be singular.
    inv_diag_[static_cast<std::size_t>(i)] = 1.0 / denom;
    cprime_[static_cast<std::size_t>(i)] = off_ / denom;
  }
}

void Stepper::step_inplace(std::vector<double>& v, const double* z, const double* z_lap) const {
  const int n = grid_.N;
  const bool noisy = epsilon_ != 0.0 && z != nullptr;
  double max_u2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double u = noisy ? v[k] + epsilon_ * z[k] : v[k];
    const double u2 = u * u;
    if (u2 > max_u2) max_u2 = u2;
    double rate = u * (b_[k] - a_ * u2) + g_[k];
    if (noisy && z_lap != nullptr) rate += epsilon_ * z_lap[k];
    rhs_[k] = v[k] + dt_ * rate;
  }
  if (a_ > 0.0 && dt_ * 3.0 * a_ * max_u2 > kStabilityBudget) {
    std::ostringstream msg;
    msg << "step_v: explicit nonlinear term out of budget (dt*3a*max|u|^2 = "
        << dt_ * 3.0 * a_ * max_u2 << " > " << kStabilityBudget
        << "); reduce dt or the state amplitude";
    throw SolverError(msg.str());
  }

  // Thomas solve with the cached factorization.
  double prev = rhs_[0] * inv_diag_[0];
  v[0] = prev;
  for (int i = 1; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    prev = (rhs_[k] - off_ * prev) * inv_diag_[k];
    v[k] = prev;
  }
  for (int i = n - 2; i >= 0; --i) {
    const std::size_t k = static_cast<std::size_t>(i);
    v[k] -= cprime_[k] * v[k + 1];
  }
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(v[static_cast<std::size_t>(i)])) {
      std::ostringstream msg;
      msg << "step_v: non-finite state after step (node " << i
          << "); the run is unstable at dt = " << dt_;
      throw SolverError(msg.str());
    }
  }
}

Field Stepper::step(const Field& v, const Field* z, const Field* z_lap) const {
  if (!(v.grid() == grid_)) throw std::invalid_argument("Stepper::step: grid mismatch");
  if (z != nullptr) require_same_grid(v, *z, "Stepper::step");
  if (z_lap != nullptr) require_same_grid(v, *z_lap, "Stepper::step");
  std::vector<double> buf = v.values();
  step_inplace(buf, z ? z->values().data() : nullptr, z_lap ? z_lap->values().data() : nullptr);
  return Field::from_values(grid_, std::move(buf));
}

Field step_v(const ProblemSpec& spec, const SolverConfig& cfg, const Field& v,
             const Field& z_now, const Field& z_lap_now) {
  Stepper stepper(spec, cfg);
  return stepper.step(v, &z_now, &z_lap_now);
}

std::int64_t steps_for(double t, double dt) {
  if (t < 0.0) throw std::invalid_argument("duration must be nonnegative");
  const auto n = static_cast<std::int64_t>(std::llround(t / dt));
  if (std::abs(t - static_cast<double>(n) * dt) > 1e-9 * std::max(1.0, t))
    throw std::invalid_argument("duration must be a multiple of dt");
  return n;
}

double snap_duration(double t, double dt) {
  if (t < 0.0) throw std::invalid_argument("duration must be nonnegative");
  return static_cast<double>(std::llround(t / dt)) * dt;
}

namespace {

Field run_loop(const ProblemSpec& spec, const SolverConfig& cfg, double t,
               const OuProcess* ou, const Field& u0, const TrajectoryObserver& observe,
               bool initial_is_v = false) {
  spec.validate();
  require_same_grid(u0, spec.g, "cocycle");
  const std::int64_t steps = steps_for(t, cfg.dt);
  const Stepper stepper(spec, cfg);
  const bool noisy = spec.epsilon != 0.0;

  std::int64_t origin = 0;
  std::vector<double> h_lap;
  if (noisy) {
    if (ou == nullptr) throw std::invalid_argument("cocycle: epsilon > 0 needs a noise path");
    const WienerPath& path = ou->path();
    if (std::abs(path.dt() - cfg.dt) > 1e-12 * cfg.dt)
      throw std::invalid_argument("cocycle: solver dt must match the noise grid");
    origin = path.origin_offset();
    if (origin + steps > path.node_count() - 1)
      throw std::invalid_argument("cocycle: OU window does not cover [0, t]");
    h_lap = laplacian(spec.h).values();
  }

  const int n = spec.grid.N;
  std::vector<double> v = u0.values();
  std::vector<double> z(noisy ? static_cast<std::size_t>(n) : 0);
  std::vector<double> z_lap(noisy ? static_cast<std::size_t>(n) : 0);
  const std::vector<double>& h = spec.h.values();

  auto fill_z = [&](std::int64_t node) {
    const double y = ou->y_node(node);
    for (int i = 0; i < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(i);
      z[k] = h[k] * y;
      z_lap[k] = h_lap[k] * y;
    }
  };

  if (noisy && !initial_is_v) {
    fill_z(origin);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] -= spec.epsilon * z[static_cast<std::size_t>(i)];
  }

  auto reconstruct = [&](std::int64_t node) {
    Field u = Field::from_values(spec.grid, v);
    if (noisy) {
      const double y = ou->y_node(node);
      for (int i = 0; i < n; ++i) u[i] += spec.epsilon * h[static_cast<std::size_t>(i)] * y;
    }
    return u;
  };

  // Phi(0, w, .) is the identity, bit for bit.
  if (steps == 0 && !initial_is_v) {
    if (observe) observe(0.0, Field::from_values(spec.grid, v), u0);
    return u0;
  }

  if (observe) observe(0.0, Field::from_values(spec.grid, v), reconstruct(origin));

  for (std::int64_t k = 0; k < steps; ++k) {
    if (noisy) fill_z(origin + k);
    stepper.step_inplace(v, noisy ? z.data() : nullptr, noisy ? z_lap.data() : nullptr);
    if (observe) {
      const double tau = static_cast<double>(k + 1) * cfg.dt;
      observe(tau, Field::from_values(spec.grid, v), reconstruct(origin + k + 1));
    }
  }
  return reconstruct(origin + steps);
}

}  // namespace

Field cocycle_traced(const ProblemSpec& spec, const SolverConfig& cfg, double t,
                     const OuProcess& ou, const Field& u0, const TrajectoryObserver& observe) {
  return run_loop(spec, cfg, t, &ou, u0, observe);
}

Field evolve_transformed_traced(const ProblemSpec& spec, const SolverConfig& cfg, double t,
                                const OuProcess& ou, const Field& v0,
                                const TrajectoryObserver& observe) {
  return run_loop(spec, cfg, t, &ou, v0, observe, /*initial_is_v=*/true);
}

Field cocycle(const ProblemSpec& spec, const SolverConfig& cfg, double t,
              const OuProcess& ou, const Field& u0) {
  return run_loop(spec, cfg, t, &ou, u0, {});
}

Field cocycle(const ProblemSpec& spec, const SolverConfig& cfg, double t,
              const WienerPath& omega, const Field& u0) {
  if (spec.epsilon == 0.0) return run_loop(spec, cfg, t, nullptr, u0, {});
  OuProcess ou(omega, spec.lambda, spec.nonlin.p);
  return run_loop(spec, cfg, t, &ou, u0, {});
}

Field deterministic_flow(const ProblemSpec& spec, const SolverConfig& cfg, double t,
                         const Field& u0) {
  return run_loop(spec.with_epsilon(0.0), cfg, t, nullptr, u0, {});
}

Field deterministic_flow_traced(const ProblemSpec& spec, const SolverConfig& cfg, double t,
                                const Field& u0, const TrajectoryObserver& observe) {
  return run_loop(spec.with_epsilon(0.0), cfg, t, nullptr, u0, observe);
}

PullbackContext make_pullback_context(const ProblemSpec& spec, const WienerPath& omega, double T) {
  steps_for(T, omega.dt());
  WienerPath shifted = omega.shifted(-T);
  OuProcess ou(shifted, spec.lambda, spec.nonlin.p);
  return PullbackContext{std::move(shifted), std::move(ou), T};
}

Field pullback_evolve(const ProblemSpec& spec, const SolverConfig& cfg,
                      const PullbackContext& ctx, const Field& u0) {
  return cocycle(spec, cfg, ctx.T, ctx.ou, u0);
}

}  // namespace rdlab
