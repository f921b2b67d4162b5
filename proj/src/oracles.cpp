#include "rdlab/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace rdlab {

std::vector<double> sine_coefficients(const Field& f) {
  const Grid1D& g = f.grid();
  const double scale = g.hx / std::sqrt(g.L);
  std::vector<double> c(static_cast<std::size_t>(g.N), 0.0);
  for (int k = 1; k <= g.N; ++k) {
    double s = 0.0;
    for (int i = 0; i < g.N; ++i)
      s += f[i] * std::sin(k * M_PI * static_cast<double>(i + 1) / (g.N + 1));
    c[static_cast<std::size_t>(k - 1)] = scale * s;
  }
  return c;
}

Field field_from_sine(const Grid1D& g, const std::vector<double>& coeffs) {
  if (static_cast<int>(coeffs.size()) != g.N)
    throw std::invalid_argument("field_from_sine: coefficient count mismatch");
  const double scale = 1.0 / std::sqrt(g.L);
  Field f(g);
  for (int i = 0; i < g.N; ++i) {
    double s = 0.0;
    for (int k = 1; k <= g.N; ++k)
      s += coeffs[static_cast<std::size_t>(k - 1)] *
           std::sin(k * M_PI * static_cast<double>(i + 1) / (g.N + 1));
    f[i] = scale * s;
  }
  return f;
}

namespace {

double simpson_rule(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_rule(fa, flm, fm, m - a);
  const double right = simpson_rule(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = simpson_rule(fa, fm, fb, b - a);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

double ou_defining_integral(const WienerPath& path, double lambda, double t, double tol) {
  if (!(lambda > 0.0)) throw std::invalid_argument("ou_defining_integral: lambda must be positive");
  const double w_t = path.value(t);
  const auto integrand = [&](double tau) { return std::exp(lambda * tau) * (path.value(tau + t) - w_t); };
  const double lower = path.t_min() - t;  // truncation at the window's left end
  if (lower >= 0.0) return 0.0;

  // The integrand kinks where tau + t crosses a path node, i.e. every dt
  // starting from the lower limit; subdivide there so each adaptive call
  // sees a smooth integrand.
  const double dt = path.dt();
  double total = 0.0;
  double a = lower;
  const auto segments = static_cast<std::int64_t>(std::ceil(-lower / dt - 1e-12));
  const double seg_tol = tol / static_cast<double>(segments + 1);
  while (a < 0.0) {
    const double b = std::min(0.0, a + dt);
    total += adaptive_simpson(integrand, a, b, seg_tol);
    a = b;
  }
  return -lambda * total;
}

Field linear_poisson_solve(const Grid1D& g, double lambda, const Field& rhs) {
  if (!(lambda > 0.0)) throw std::invalid_argument("linear_poisson_solve: lambda must be positive");
  std::vector<double> c = sine_coefficients(rhs);
  for (int k = 1; k <= g.N; ++k)
    c[static_cast<std::size_t>(k - 1)] /= lambda - dirichlet_eigenvalue(g, k);
  return field_from_sine(g, c);
}

Field duhamel_fixed_point(const ProblemSpec& spec, const SolverConfig& cfg, const OuProcess& ou,
                          double T) {
  if (!spec.nonlin.is_zero())
    throw std::invalid_argument("duhamel_fixed_point: only defined for the linear problem");
  const Grid1D& g = spec.grid;
  const double dt = cfg.dt;
  const std::int64_t K = steps_for(T, dt);
  const std::int64_t origin = ou.path().origin_offset();
  if (origin < K) throw std::invalid_argument("duhamel_fixed_point: path window misses [-T, 0]");

  const std::vector<double> g_hat = sine_coefficients(spec.g);
  const std::vector<double> h_hat = sine_coefficients(spec.h);
  const double y0 = ou.y_node(origin);

  std::vector<double> c(static_cast<std::size_t>(g.N), 0.0);
  for (int k = 1; k <= g.N; ++k) {
    const double mu = dirichlet_eigenvalue(g, k);  // negative
    const double sig = 1.0 / (1.0 + dt * (spec.lambda - mu));
    // sum_{j=1..K} sig^j y(-j dt)
    double acc = 0.0;
    double pw = 1.0;
    for (std::int64_t j = 1; j <= K; ++j) {
      pw *= sig;
      if (pw == 0.0) break;
      acc += pw * ou.y_node(origin - j);
    }
    const std::size_t idx = static_cast<std::size_t>(k - 1);
    c[idx] = g_hat[idx] / (spec.lambda - mu) +
             spec.epsilon * h_hat[idx] * (dt * mu * acc + y0);
  }
  return field_from_sine(g, c);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need matching samples, at least two");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("loglog_slope: samples must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace rdlab
