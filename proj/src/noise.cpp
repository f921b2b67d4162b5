#include "rdlab/noise.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "rdlab/rng.hpp"

namespace rdlab {

namespace {

constexpr std::int64_t kMaxNodes = 200'000'000;

// Absolute segment j (from j*dt to (j+1)*dt, j possibly negative) to a
// non-negative draw index.
std::uint64_t zigzag(std::int64_t j) {
  return j >= 0 ? 2ull * static_cast<std::uint64_t>(j)
                : 2ull * static_cast<std::uint64_t>(-j - 1) + 1ull;
}

std::int64_t aligned_count(double span, double dt, const char* what) {
  const double q = span / dt;
  const auto n = static_cast<std::int64_t>(std::llround(q));
  if (n < 1) throw std::invalid_argument(std::string(what) + ": window must straddle 0");
  return n;
}

}  // namespace

std::size_t WienerPath::idx(std::int64_t raw_index) const {
  return static_cast<std::size_t>(raw_index);
}

WienerPath WienerPath::sample(std::uint64_t seed, double dt, double t_min, double t_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("WienerPath: dt must be positive");
  if (!(t_min < 0.0 && 0.0 < t_max))
    throw std::invalid_argument("WienerPath: window must satisfy t_min < 0 < t_max");
  const std::int64_t n_neg = aligned_count(-t_min, dt, "WienerPath");
  const std::int64_t n_pos = aligned_count(t_max, dt, "WienerPath");
  if (n_neg + n_pos + 1 > kMaxNodes)
    throw std::invalid_argument("WienerPath: node count exceeds memory budget");

  auto raw = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n_neg + n_pos + 1));
  const std::int64_t origin = n_neg;
  const double root_dt = std::sqrt(dt);
  (*raw)[static_cast<std::size_t>(origin)] = 0.0;
  // Cumulative sums outward from the origin so each segment carries exactly
  // its own Gaussian draw and the anchor W(0) = 0 is exact.
  for (std::int64_t j = 0; j < n_pos; ++j)
    (*raw)[static_cast<std::size_t>(origin + j + 1)] =
        (*raw)[static_cast<std::size_t>(origin + j)] + root_dt * rng_gauss(seed, zigzag(j));
  for (std::int64_t j = -1; j >= -n_neg; --j)
    (*raw)[static_cast<std::size_t>(origin + j)] =
        (*raw)[static_cast<std::size_t>(origin + j + 1)] - root_dt * rng_gauss(seed, zigzag(j));

  WienerPath p;
  p.raw_ = std::move(raw);
  p.lo_ = 0;
  p.hi_ = n_neg + n_pos;
  p.origin_ = origin;
  p.dt_ = dt;
  p.seed_ = seed;
  return p;
}

WienerPath WienerPath::from_nodes(std::vector<double> values, double dt, double t_min) {
  if (!(dt > 0.0)) throw std::invalid_argument("WienerPath: dt must be positive");
  if (values.size() < 3) throw std::invalid_argument("WienerPath: need at least 3 nodes");
  const std::int64_t origin = static_cast<std::int64_t>(std::llround(-t_min / dt));
  if (std::abs(-t_min - static_cast<double>(origin) * dt) > 1e-9 * dt)
    throw std::invalid_argument("WienerPath: t_min is not grid-aligned");
  if (origin <= 0 || origin >= static_cast<std::int64_t>(values.size()) - 1)
    throw std::invalid_argument("WienerPath: window must straddle 0");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("WienerPath: non-finite node");
  if (values[static_cast<std::size_t>(origin)] != 0.0)
    throw std::invalid_argument("WienerPath: node at t = 0 must be exactly zero");

  WienerPath p;
  p.hi_ = static_cast<std::int64_t>(values.size()) - 1;
  p.raw_ = std::make_shared<std::vector<double>>(std::move(values));
  p.lo_ = 0;
  p.origin_ = origin;
  p.dt_ = dt;
  p.seed_ = 0;
  return p;
}

WienerPath WienerPath::linear(double slope, double dt, double t_min, double t_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("WienerPath: dt must be positive");
  if (!(t_min < 0.0 && 0.0 < t_max))
    throw std::invalid_argument("WienerPath: window must satisfy t_min < 0 < t_max");
  const std::int64_t n_neg = aligned_count(-t_min, dt, "WienerPath");
  const std::int64_t n_pos = aligned_count(t_max, dt, "WienerPath");
  std::vector<double> values(static_cast<std::size_t>(n_neg + n_pos + 1));
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(values.size()); ++k)
    values[static_cast<std::size_t>(k)] = slope * static_cast<double>(k - n_neg) * dt;
  return from_nodes(std::move(values), dt, -static_cast<double>(n_neg) * dt);
}

double WienerPath::value(double t) const {
  const double pos = t / dt_ + static_cast<double>(origin_ - lo_);
  const double n_last = static_cast<double>(hi_ - lo_);
  if (pos < -1e-9 || pos > n_last + 1e-9)
    throw std::out_of_range("WienerPath: query outside [t_min, t_max]");
  std::int64_t k = static_cast<std::int64_t>(std::floor(pos));
  if (k < 0) k = 0;
  if (k >= hi_ - lo_) k = hi_ - lo_ - 1;
  const double frac = pos - static_cast<double>(k);
  return node(k) + frac * increment(k);
}

WienerPath WienerPath::shifted(double s) const {
  const double q = s / dt_;
  const auto j = static_cast<std::int64_t>(std::llround(q));
  if (std::abs(q - static_cast<double>(j)) > 1e-6)
    throw std::invalid_argument("WienerPath::shifted: s is not grid-aligned");
  const std::int64_t new_origin = origin_ + j;
  if (new_origin <= lo_ || new_origin >= hi_)
    throw std::invalid_argument("WienerPath::shifted: shift moves the window off the sampled range");
  WienerPath p(*this);
  p.origin_ = new_origin;
  return p;
}

WienerPath WienerPath::refine_half() const {
  const std::int64_t n = static_cast<std::int64_t>(raw_->size());
  auto fine = std::make_shared<std::vector<double>>(static_cast<std::size_t>(2 * n - 1));
  const double half_sd = 0.5 * std::sqrt(dt_);  // bridge midpoint stddev sqrt(dt/4)
  const std::uint64_t bridge_seed = mix64(seed_ ^ 0xb81d6eull);
  for (std::int64_t k = 0; k < n; ++k) (*fine)[static_cast<std::size_t>(2 * k)] = (*raw_)[static_cast<std::size_t>(k)];
  for (std::int64_t k = 0; k + 1 < n; ++k) {
    const double mean = 0.5 * ((*raw_)[static_cast<std::size_t>(k)] + (*raw_)[static_cast<std::size_t>(k + 1)]);
    (*fine)[static_cast<std::size_t>(2 * k + 1)] = mean + half_sd * rng_gauss(bridge_seed, static_cast<std::uint64_t>(k));
  }
  WienerPath p;
  p.raw_ = std::move(fine);
  p.lo_ = 2 * lo_;
  p.hi_ = 2 * hi_;
  p.origin_ = 2 * origin_;
  p.dt_ = 0.5 * dt_;
  p.seed_ = seed_;
  return p;
}

WienerPath sample_path(std::uint64_t seed, double dt, double t_min, double t_max) {
  return WienerPath::sample(seed, dt, t_min, t_max);
}

WienerPath shift(const WienerPath& path, double s) { return path.shifted(s); }

OuProcess::OuProcess(WienerPath path, double lambda, double p, double max_truncation_factor)
    : path_(std::move(path)), lambda_(lambda), p_(p) {
  if (!(lambda > 0.0)) throw std::invalid_argument("OuProcess: lambda must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("OuProcess: p must be >= 1");

  const std::int64_t n = path_.node_count();
  double sup_w = 0.0;
  for (std::int64_t k = 0; k < n; ++k) sup_w = std::max(sup_w, std::abs(path_.node(k)));
  truncation_factor_ = std::exp(lambda_ * path_.t_min());
  truncation_bound_ = truncation_factor_ * sup_w;
  if (truncation_factor_ > max_truncation_factor)
    throw std::invalid_argument(
        "OuProcess: window too short for the requested left-truncation tolerance");

  // Exact recursion for piecewise-linear paths:
  //   y_{k+1} = e^{-lambda dt} y_k + (W_{k+1} - W_k) (1 - e^{-lambda dt}) / (lambda dt),
  // started from the (empty) truncated defining integral at the left end.
  const double dt = path_.dt();
  const double alpha = std::exp(-lambda_ * dt);
  const double gain = (1.0 - alpha) / (lambda_ * dt);
  y_.resize(static_cast<std::size_t>(n));
  y_[0] = 0.0;
  for (std::int64_t k = 0; k + 1 < n; ++k)
    y_[static_cast<std::size_t>(k + 1)] = alpha * y_[static_cast<std::size_t>(k)] + gain * path_.increment(k);

  r_hat_ = 0.0;
  for (std::int64_t k = 0; k < n; ++k) {
    const double a = std::abs(y_[static_cast<std::size_t>(k)]);
    const double weight = std::exp(-0.5 * lambda_ * std::abs(path_.node_time(k)));
    const double candidate = (a * a + std::pow(a, p_)) * weight;
    if (candidate > r_hat_) r_hat_ = candidate;
  }
}

double OuProcess::y_at(double t) const {
  const double pos = (t - path_.t_min()) / path_.dt();
  const double n_last = static_cast<double>(path_.node_count() - 1);
  if (pos < -1e-9 || pos > n_last + 1e-9)
    throw std::out_of_range("OuProcess: query outside the path window");
  std::int64_t k = static_cast<std::int64_t>(std::floor(pos));
  if (k < 0) k = 0;
  if (k > path_.node_count() - 1) k = path_.node_count() - 1;
  const double frac = pos - static_cast<double>(k);
  if (frac <= 1e-12 || k == path_.node_count() - 1) return y_[static_cast<std::size_t>(k)];
  // Exact continuation over the partial segment (the path is linear there).
  const double tau = frac * path_.dt();
  const double decay = std::exp(-lambda_ * tau);
  const double slope = path_.increment(k) / path_.dt();
  return decay * y_[static_cast<std::size_t>(k)] + slope * (1.0 - decay) / lambda_;
}

OuProcess ou_from_path(const WienerPath& path, double lambda, double p) {
  return OuProcess(path, lambda, p);
}

Field z_field(const OuProcess& ou, const Field& h, double t) {
  return h * ou.y_at(t);
}

void write_ou_csv(const OuProcess& ou, std::ostream& out) {
  out << "t,W,y\n";
  char buf[96];
  const WienerPath& p = ou.path();
  for (std::int64_t k = 0; k < p.node_count(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.node_time(k), p.node(k), ou.y_node(k));
    out << buf;
  }
}

}  // namespace rdlab
