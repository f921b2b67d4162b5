#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "rdlab/field.hpp"

namespace rdlab {

/// Two-sided scalar Wiener sample path, anchored so W(0) = 0 exactly.
///
/// Nodes live on a uniform dt grid over [t_min, t_max] with t_min < 0 < t_max
/// and are piecewise-linearly interpolated in between. The node array is
/// shared between a path and all of its shifts: a shift moves the origin
/// index instead of rewriting values, so the shift group law holds exactly,
/// node for node, and shifted paths see bitwise-identical increments.
///
/// Gaussian increments are a pure function of (seed, absolute segment
/// index), so regenerating a path with the same arguments reproduces the
/// identical sequence, and windows sampled in any order agree on overlap.
class WienerPath {
 public:
  static WienerPath sample(std::uint64_t seed, double dt, double t_min, double t_max);

  /// Test injection: explicit node values on [t_min, t_min + (n-1) dt].
  /// The node at t = 0 must exist and be exactly zero.
  static WienerPath from_nodes(std::vector<double> values, double dt, double t_min);

  /// Synthetic path w(tau) = slope * tau (exercises shift/OU closed forms).
  static WienerPath linear(double slope, double dt, double t_min, double t_max);

  double dt() const { return dt_; }
  double t_min() const { return static_cast<double>(lo_ - origin_) * dt_; }
  double t_max() const { return static_cast<double>(hi_ - origin_) * dt_; }
  std::int64_t node_count() const { return hi_ - lo_ + 1; }
  std::int64_t origin_offset() const { return origin_ - lo_; }
  std::uint64_t seed() const { return seed_; }

  double node_time(std::int64_t k) const { return static_cast<double>(lo_ + k - origin_) * dt_; }
  double node(std::int64_t k) const { return (*raw_)[idx(lo_ + k)] - (*raw_)[idx(origin_)]; }

  /// Increment over segment [t_k, t_{k+1}]; identical across shifted views.
  double increment(std::int64_t k) const { return (*raw_)[idx(lo_ + k + 1)] - (*raw_)[idx(lo_ + k)]; }

  /// Piecewise-linear evaluation; out-of-window queries are errors.
  double value(double t) const;

  /// theta_s: (shifted)(tau) = w(tau + s) - w(s). s must be grid-aligned and
  /// the translated window must still straddle 0.
  WienerPath shifted(double s) const;

  /// Brownian-bridge refinement to dt/2: existing nodes are kept bit-for-bit,
  /// midpoints are conditioned draws. Used for dt-robustness studies that
  /// must ride the same sample path.
  WienerPath refine_half() const;

 private:
  WienerPath() = default;
  std::size_t idx(std::int64_t raw_index) const;

  std::shared_ptr<const std::vector<double>> raw_;
  std::int64_t lo_ = 0;      // raw index of the leftmost node of this view
  std::int64_t hi_ = 0;      // raw index of the rightmost node
  std::int64_t origin_ = 0;  // raw index of this view's t = 0
  double dt_ = 0.0;
  std::uint64_t seed_ = 0;
};

WienerPath sample_path(std::uint64_t seed, double dt, double t_min, double t_max);
WienerPath shift(const WienerPath& path, double s);

/// Stationary Ornstein-Uhlenbeck evaluation y(theta_t w) for dy + lambda y dt = dW,
/// computed on the path grid by the exact one-step recursion for piecewise-linear
/// paths, seeded with the defining integral truncated at the window's left end.
///
/// The dropped mass of the defining integral is bounded by
/// exp(lambda * t_min) * sup|w|; construction rejects windows whose relative
/// truncation factor exp(lambda * t_min) exceeds max_truncation_factor.
class OuProcess {
 public:
  OuProcess(WienerPath path, double lambda, double p, double max_truncation_factor = 1e-6);

  double lambda() const { return lambda_; }
  double p() const { return p_; }
  const WienerPath& path() const { return path_; }

  double y_node(std::int64_t k) const { return y_[static_cast<std::size_t>(k)]; }
  /// Exact per-segment evaluation between nodes.
  double y_at(double t) const;

  /// Smallest constant with |y(theta_t w)|^2 + |y(theta_t w)|^p
  /// <= exp((lambda/2)|t|) * r_hat at every grid node; tight by construction.
  double r_hat() const { return r_hat_; }

  double truncation_factor() const { return truncation_factor_; }
  double truncation_bound() const { return truncation_bound_; }

 private:
  WienerPath path_;
  double lambda_ = 0.0;
  double p_ = 2.0;
  std::vector<double> y_;
  double r_hat_ = 0.0;
  double truncation_factor_ = 0.0;
  double truncation_bound_ = 0.0;
};

OuProcess ou_from_path(const WienerPath& path, double lambda, double p);

/// z(theta_t w) = h * y(theta_t w)
Field z_field(const OuProcess& ou, const Field& h, double t);

/// CSV audit trace, columns: t,W,y
void write_ou_csv(const OuProcess& ou, std::ostream& out);

}  // namespace rdlab
