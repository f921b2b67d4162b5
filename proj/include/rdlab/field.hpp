#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

namespace rdlab {

/// Uniform grid on [-L, L] with homogeneous Dirichlet boundary.
/// Only the N interior nodes are stored; the boundary values at +-L are
/// identically zero and enter the difference operators as ghost zeros.
struct Grid1D {
  double L = 1.0;  // half-width
  int N = 3;       // interior node count
  double hx = 0.5; // spacing, 2L/(N+1)

  static Grid1D make(double L, int N);

  // x_i for storage index i in [0, N): x = -L + (i+1) hx
  double node(int i) const { return -L + (i + 1) * hx; }

  friend bool operator==(const Grid1D& a, const Grid1D& b) {
    return a.L == b.L && a.N == b.N;
  }
};

/// Grid function on the interior nodes of a Grid1D. Value semantics; all
/// operations are pure and grid-checked. Construction rejects NaN/Inf.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid1D& g);
  static Field from_values(const Grid1D& g, std::vector<double> values);
  static Field from_function(const Grid1D& g, const std::function<double(double)>& f);

  const Grid1D& grid() const { return grid_; }
  int size() const { return grid_.N; }
  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return v_; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

 private:
  Grid1D grid_;
  std::vector<double> v_;
};

/// Second difference with zero Dirichlet ghost values.
Field laplacian(const Field& f);

/// hx-weighted inner product (discrete L2 pairing).
double inner(const Field& a, const Field& b);

/// sqrt(hx * sum f_i^2)
double norm_l2(const Field& f);

/// (hx * sum |f_i|^p)^(1/p); p == 2 delegates to norm_l2 exactly.
double norm_lp(const Field& f, double p);

/// Discrete Dirichlet gradient norm: includes the boundary jumps.
double norm_h1_semi(const Field& f);

/// hx * sum over nodes with |x_i| >= R of f_i^2, for 0 <= R <= L.
double tail_mass(const Field& f, double R);

/// Eigenvector sin(k pi (x+L) / (2L)) of the discrete Dirichlet Laplacian,
/// 1 <= k <= N, and its (negative) eigenvalue.
Field dirichlet_eigenvector(const Grid1D& g, int k);
double dirichlet_eigenvalue(const Grid1D& g, int k);

/// CSV snapshot, columns: x,value
void write_field_csv(const Field& f, std::ostream& out);

void require_same_grid(const Field& a, const Field& b, const char* what);

}  // namespace rdlab
