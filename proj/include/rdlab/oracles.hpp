#pragma once

#include <functional>
#include <vector>

#include "rdlab/noise.hpp"
#include "rdlab/spde.hpp"

namespace rdlab {

/// Coefficients of f against the orthonormal discrete sine basis
/// e_k = sin(k pi (x+L)/(2L)) / sqrt(L), k = 1..N.
std::vector<double> sine_coefficients(const Field& f);
Field field_from_sine(const Grid1D& g, const std::vector<double>& coeffs);

/// Recursive adaptive Simpson quadrature.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

/// Defining-integral evaluation of the stationary OU value at time t,
///   -lambda * Int_{t_min - t}^{0} e^{lambda tau} (theta_t w)(tau) d tau,
/// by adaptive quadrature per path segment. Independent of the recursion.
double ou_defining_integral(const WienerPath& path, double lambda, double t, double tol = 1e-10);

/// Spectral solve of (lambda - Lap_h) u = g; independent of the time stepper.
Field linear_poisson_solve(const Grid1D& g, double lambda, const Field& rhs);

/// Random fixed point of the linear (f == 0) semi-implicit scheme, observed
/// at time 0 after pullback from -T: the discrete Duhamel series summed mode
/// by mode in the sine basis along the given path's OU samples.
Field duhamel_fixed_point(const ProblemSpec& spec, const SolverConfig& cfg, const OuProcess& ou,
                          double T);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rdlab
