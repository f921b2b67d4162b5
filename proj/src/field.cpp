#include "rdlab/field.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rdlab {

Grid1D Grid1D::make(double L, int N) {
  if (!(L > 0.0)) throw std::invalid_argument("Grid1D: L must be positive");
  if (N < 3) throw std::invalid_argument("Grid1D: need at least 3 interior nodes");
  Grid1D g;
  g.L = L;
  g.N = N;
  g.hx = 2.0 * L / (N + 1);
  return g;
}

Field::Field(const Grid1D& g) : grid_(g), v_(static_cast<std::size_t>(g.N), 0.0) {}

Field Field::from_values(const Grid1D& g, std::vector<double> values) {
  if (static_cast<int>(values.size()) != g.N)
    throw std::invalid_argument("Field: value count does not match grid");
  for (double x : values)
    if (!std::isfinite(x)) throw std::invalid_argument("Field: non-finite entry");
  Field f(g);
  f.v_ = std::move(values);
  return f;
}

Field Field::from_function(const Grid1D& g, const std::function<double(double)>& fn) {
  Field f(g);
  for (int i = 0; i < g.N; ++i) {
    const double y = fn(g.node(i));
    if (!std::isfinite(y)) throw std::invalid_argument("Field: non-finite entry");
    f.v_[static_cast<std::size_t>(i)] = y;
  }
  return f;
}

void require_same_grid(const Field& a, const Field& b, const char* what) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o, "Field::operator+=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o, "Field::operator-=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

Field laplacian(const Field& f) {
  const Grid1D& g = f.grid();
  Field out(g);
  const double inv_h2 = 1.0 / (g.hx * g.hx);
  const int n = g.N;
  for (int i = 0; i < n; ++i) {
    const double left = (i > 0) ? f[i - 1] : 0.0;
    const double right = (i + 1 < n) ? f[i + 1] : 0.0;
    out[i] = (left - 2.0 * f[i] + right) * inv_h2;
  }
  return out;
}

double inner(const Field& a, const Field& b) {
  require_same_grid(a, b, "inner");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return a.grid().hx * s;
}

double norm_l2(const Field& f) {
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += f[i] * f[i];
  return std::sqrt(f.grid().hx * s);
}

double norm_lp(const Field& f, double p) {
  if (p < 1.0) throw std::invalid_argument("norm_lp: p must be >= 1");
  if (p == 2.0) return norm_l2(f);
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p);
  return std::pow(f.grid().hx * s, 1.0 / p);
}

double norm_h1_semi(const Field& f) {
  const Grid1D& g = f.grid();
  const int n = g.N;
  double s = 0.0;
  double prev = 0.0;  // ghost zero at -L
  for (int i = 0; i < n; ++i) {
    const double d = f[i] - prev;
    s += d * d;
    prev = f[i];
  }
  s += prev * prev;  // jump to the ghost zero at +L
  return std::sqrt(s / g.hx);
}

double tail_mass(const Field& f, double R) {
  const Grid1D& g = f.grid();
  if (R < 0.0 || R > g.L) throw std::invalid_argument("tail_mass: R outside [0, L]");
  double s = 0.0;
  for (int i = 0; i < g.N; ++i)
    if (std::abs(g.node(i)) >= R) s += f[i] * f[i];
  return g.hx * s;
}

Field dirichlet_eigenvector(const Grid1D& g, int k) {
  if (k < 1 || k > g.N) throw std::invalid_argument("dirichlet_eigenvector: k outside [1, N]");
  Field v(g);
  for (int i = 0; i < g.N; ++i)
    v[i] = std::sin(k * M_PI * static_cast<double>(i + 1) / (g.N + 1));
  return v;
}

double dirichlet_eigenvalue(const Grid1D& g, int k) {
  if (k < 1 || k > g.N) throw std::invalid_argument("dirichlet_eigenvalue: k outside [1, N]");
  return -2.0 / (g.hx * g.hx) * (1.0 - std::cos(k * M_PI / (g.N + 1)));
}

void write_field_csv(const Field& f, std::ostream& out) {
  out << "x,value\n";
  char buf[64];
  for (int i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", f.grid().node(i), f[i]);
    out << buf;
  }
}

}  // namespace rdlab
