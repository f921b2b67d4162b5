#include "rdlab/estimates.hpp"

#include <cmath>
#include <stdexcept>

namespace rdlab {

double cutoff_rho(double s) {
  if (s < 0.0) throw std::invalid_argument("cutoff_rho: s must be nonnegative");
  if (s <= 1.0) return 0.0;
  if (s >= 2.0) return 1.0;
  const double u = s - 1.0;
  return u * u * (3.0 - 2.0 * u);
}

double cutoff_rho_deriv(double s) {
  if (s < 0.0) throw std::invalid_argument("cutoff_rho_deriv: s must be nonnegative");
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double u = s - 1.0;
  return 6.0 * u * (1.0 - u);
}

EnergyReport energy_report(const ProblemSpec& spec, const SolverConfig& cfg,
                           const WienerPath& omega, double t, const Field& v0) {
  spec.validate();
  EnergyReport rep;
  rep.t = t;
  rep.epsilon = spec.epsilon;
  rep.r_hat = spec.epsilon != 0.0
                  ? OuProcess(omega, spec.lambda, spec.nonlin.p).r_hat()
                  : 0.0;

  const double lambda = spec.lambda;
  const double p = spec.nonlin.p;
  const double dt = cfg.dt;

  double prev_w_grad = 0.0, prev_w_lp = 0.0;
  bool first = true;
  double grad_acc = 0.0, lp_acc = 0.0;
  Field v_final(spec.grid);

  auto observe = [&](double /*tau*/, const Field& v, const Field& u) {
    const double grad = norm_h1_semi(v);
    const double lp = std::pow(norm_lp(u, p), p);
    const double w_grad = grad * grad;
    const double w_lp = lp;
    if (first) {
      rep.decay_term = std::exp(-lambda * t) * norm_l2(v) * norm_l2(v);
      first = false;
    } else {
      // Exponentially weighted trapezoid, e^{lambda(tau - t)} f(tau):
      // keep the running sums in end-weighted form to avoid re-exponentiating.
      const double fade = std::exp(-lambda * dt);
      grad_acc = fade * grad_acc + 0.5 * dt * (fade * prev_w_grad + w_grad);
      lp_acc = fade * lp_acc + 0.5 * dt * (fade * prev_w_lp + w_lp);
    }
    prev_w_grad = w_grad;
    prev_w_lp = w_lp;
    v_final = v;
  };

  if (spec.epsilon == 0.0) {
    deterministic_flow_traced(spec, cfg, t, v0, observe);
  } else {
    const PullbackContext ctx = make_pullback_context(spec, omega, t);
    evolve_transformed_traced(spec, cfg, t, ctx.ou, v0, observe);
  }
  rep.v_norm_sq = norm_l2(v_final) * norm_l2(v_final);
  rep.grad_hist_integral = grad_acc;
  rep.lp_hist_integral = lp_acc;
  return rep;
}

PullbackState pullback_state(const ProblemSpec& spec, const SolverConfig& cfg,
                             const WienerPath& omega, double t, const Field& u0) {
  if (spec.epsilon == 0.0) {
    Field u = deterministic_flow(spec, cfg, t, u0);
    return PullbackState{u, u};
  }
  const PullbackContext ctx = make_pullback_context(spec, omega, t);
  Field v_final(spec.grid);
  Field u = cocycle_traced(spec, cfg, t, ctx.ou, u0,
                           [&](double, const Field& v, const Field&) { v_final = v; });
  return PullbackState{std::move(u), std::move(v_final)};
}

std::vector<double> tail_report(const ProblemSpec& spec, const SolverConfig& cfg,
                                const WienerPath& omega, double t, const Field& u0,
                                const std::vector<double>& R_grid) {
  for (double R : R_grid)
    if (R < 0.0 || R > spec.grid.L)
      throw std::invalid_argument("tail_report: radius outside [0, L]");
  const PullbackState state = pullback_state(spec, cfg, omega, t, u0);
  std::vector<double> out;
  out.reserve(R_grid.size());
  for (double R : R_grid) out.push_back(tail_mass(state.u, R));
  return out;
}

ConvergenceCurve convergence_check(const ProblemSpec& spec_eps, const SolverConfig& cfg,
                                   const WienerPath& omega, double T, const Field& u0_eps,
                                   const Field& u0) {
  spec_eps.validate();
  const std::int64_t steps = steps_for(T, cfg.dt);

  ConvergenceCurve curve;
  curve.times.reserve(static_cast<std::size_t>(steps + 1));
  curve.err_sq.reserve(static_cast<std::size_t>(steps + 1));

  std::vector<Field> u_eps_states;
  u_eps_states.reserve(static_cast<std::size_t>(steps + 1));
  auto capture_eps = [&](double, const Field&, const Field& u) { u_eps_states.push_back(u); };
  if (spec_eps.epsilon == 0.0) {
    deterministic_flow_traced(spec_eps, cfg, T, u0_eps, capture_eps);
  } else {
    OuProcess ou(omega, spec_eps.lambda, spec_eps.nonlin.p);
    cocycle_traced(spec_eps, cfg, T, ou, u0_eps, capture_eps);
  }

  std::size_t idx = 0;
  deterministic_flow_traced(spec_eps, cfg, T, u0,
                            [&](double tau, const Field&, const Field& u_det) {
                              const double d = norm_l2(u_eps_states[idx] - u_det);
                              curve.times.push_back(tau);
                              curve.err_sq.push_back(d * d);
                              ++idx;
                            });

  curve.sup_err_sq = 0.0;
  for (double e : curve.err_sq) curve.sup_err_sq = std::max(curve.sup_err_sq, e);
  return curve;
}

FrozenBound fit_freeze(const std::vector<BoundSample>& eps0_samples,
                       const std::vector<BoundSample>& eps1_samples) {
  if (eps0_samples.empty() || eps1_samples.empty())
    throw std::invalid_argument("fit_freeze: need samples at both epsilon extremes");
  FrozenBound fb;
  for (const BoundSample& s : eps0_samples)
    fb.c1 = std::max(fb.c1, s.value - s.decay_term);
  for (const BoundSample& s : eps1_samples) {
    if (!(s.r_hat > 0.0)) throw std::invalid_argument("fit_freeze: eps = 1 sample needs r_hat > 0");
    fb.c2 = std::max(fb.c2, (s.value - s.decay_term - fb.c1) / s.r_hat);
  }
  fb.c2 = std::max(fb.c2, 0.0);
  return fb;
}

double bound_excess(const FrozenBound& fb, const BoundSample& s) {
  const double bound = s.decay_term + fb.c1 + s.epsilon * fb.c2 * s.r_hat;
  return s.value - bound;
}

}  // namespace rdlab
