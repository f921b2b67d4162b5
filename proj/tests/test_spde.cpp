#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rdlab/oracles.hpp"
#include "rdlab/profiles.hpp"
#include "rdlab/rng.hpp"
#include "rdlab/spde.hpp"

using namespace rdlab;

TEST_SUITE_BEGIN("spde");

namespace {

// small lab problem shared by the suite
struct Lab {
  Grid1D grid = Grid1D::make(6.0, 47);
  double lambda = 1.0;
  SolverConfig cfg{0.01};

  ProblemSpec cubic(double eps) const {
    ProblemSpec s;
    s.lambda = lambda;
    s.epsilon = eps;
    s.grid = grid;
    s.g = gaussian_profile(grid, 0.4, 0.5);
    s.h = gaussian_profile(grid, 0.5, 0.8);
    s.nonlin = Nonlinearity::cubic(1.0, bump_profile(grid, 0.5, grid.L / 4.0));
    return s;
  }
  ProblemSpec linear(double eps) const {
    ProblemSpec s = cubic(eps);
    s.nonlin = Nonlinearity::none(grid);
    return s;
  }
  WienerPath path(std::uint64_t seed, double horizon = 4.0) const {
    return sample_path(seed, cfg.dt, -(horizon + 45.0), horizon + 1.0);
  }
  Field u0() const {
    return Field::from_function(grid, [&](double x) {
      return 0.5 * std::exp(-x * x) + 0.2 * std::sin(M_PI * x / grid.L);
    });
  }
};

}  // namespace

TEST_CASE("f_eval: zero input, pointwise arithmetic, odd symmetry") {
  const Lab lab;
  const Nonlinearity plain = Nonlinearity::cubic(1.0, Field(lab.grid));
  CHECK(norm_l2(f_eval(plain, Field(lab.grid))) == 0.0);

  Field u(lab.grid);
  u[5] = 2.0;
  const Field fu = f_eval(plain, u);
  CHECK(fu[5] == doctest::Approx(-8.0));
  CHECK(fu[6] == 0.0);

  const Nonlinearity withb = lab.cubic(0.0).nonlin;
  Field w(lab.grid);
  for (int i = 0; i < w.size(); ++i) w[i] = rng_gauss(3, static_cast<std::uint64_t>(i));
  const Field a = f_eval(withb, w);
  const Field b = f_eval(withb, -1.0 * w);
  for (int i = 0; i < w.size(); ++i) CHECK(b[i] == doctest::Approx(-a[i]).epsilon(1e-14));
}

TEST_CASE("built-in family satisfies its structure envelopes pointwise") {
  const Lab lab;
  const StructureCheck chk = check_structure_conditions(lab.cubic(0.0).nonlin, 6.0, 500);
  CHECK(chk.worst_f1 <= 1e-12);
  CHECK(chk.worst_f3 <= 1e-12);
  CHECK(chk.worst_fcond <= 1e-12);
  CHECK(chk.ok(1e-12));
}

TEST_CASE("derived envelope fields have the advertised shapes") {
  const Lab lab;
  const Nonlinearity n = lab.cubic(0.0).nonlin;
  CHECK(n.alpha1() == doctest::Approx(0.5));
  CHECK(n.alpha3() == doctest::Approx(3.0));
  CHECK(n.beta() == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(n.q() == doctest::Approx(4.0 / 3.0));
  const Field p1 = n.psi1();
  const Field p4 = n.psi4();
  for (int i = 0; i < lab.grid.N; ++i) {
    CHECK(p1[i] == doctest::Approx(n.b[i] * n.b[i] / 2.0));
    CHECK(p4[i] == doctest::Approx(std::abs(n.b[i])));
  }
}

TEST_CASE("step_v damps eigenmodes by the exact tridiagonal factor") {
  const Lab lab;
  ProblemSpec lin = lab.linear(0.0);
  lin.g = Field(lab.grid);
  for (int k : {1, 4, 11}) {
    const Field v = dirichlet_eigenvector(lab.grid, k);
    const double factor = 1.0 / (1.0 + lab.cfg.dt * (lab.lambda - dirichlet_eigenvalue(lab.grid, k)));
    const Field vp = step_v(lin, lab.cfg, v, Field(lab.grid), Field(lab.grid));
    const Field resid = vp - factor * v;
    CHECK(norm_l2(resid) <= 1e-13 * norm_l2(v));
  }
  // 0 is a fixed point of the homogeneous problem
  ProblemSpec hom = lab.cubic(0.0);
  hom.g = Field(lab.grid);
  hom.nonlin = Nonlinearity::cubic(1.0, Field(lab.grid));
  const Field z = step_v(hom, lab.cfg, Field(lab.grid), Field(lab.grid), Field(lab.grid));
  CHECK(norm_l2(z) == 0.0);
}

TEST_CASE("heat check: first order in dt against analytic eigenmode decay") {
  const Lab lab;
  ProblemSpec lin = lab.linear(0.0);
  lin.g = Field(lab.grid);
  const int mode = 3;
  const Field v0 = dirichlet_eigenvector(lab.grid, mode);
  const double beta = lab.lambda - dirichlet_eigenvalue(lab.grid, mode);
  const double T = 1.6;
  std::vector<double> errs;
  for (double dt : {0.04, 0.02, 0.01}) {
    const Field uT = deterministic_flow(lin, SolverConfig{dt}, T, v0);
    errs.push_back(norm_l2(uT - std::exp(-beta * T) * v0));
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double order = std::log2(errs[i] / errs[i + 1]);
    CHECK(order >= 0.9);
    CHECK(order <= 1.1);
  }
}

TEST_CASE("cocycle at t = 0 is the identity, exactly") {
  const Lab lab;
  const WienerPath w = lab.path(21);
  const Field u0 = lab.u0();
  const Field out = cocycle(lab.cubic(0.5), lab.cfg, 0.0, w, u0);
  for (int i = 0; i < u0.size(); ++i) CHECK(out[i] == u0[i]);
}

TEST_CASE("epsilon = 0 ignores the sample path bit for bit") {
  const Lab lab;
  const Field u0 = lab.u0();
  const Field a = cocycle(lab.cubic(0.0), lab.cfg, 2.0, lab.path(1), u0);
  const Field b = cocycle(lab.cubic(0.0), lab.cfg, 2.0, lab.path(2), u0);
  const Field c = deterministic_flow(lab.cubic(0.7), lab.cfg, 2.0, u0);
  for (int i = 0; i < u0.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i] == c[i]);
  }
}

TEST_CASE("cocycle law holds to 1e-10 on grid-aligned splits") {
  const Lab lab;
  const Field u0 = lab.u0();
  int counter = 0;
  for (double eps : {0.0, 0.5, 1.0}) {
    const ProblemSpec spec = lab.cubic(eps);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      const WienerPath w = lab.path(seed);
      for (int rep = 0; rep < 5; ++rep) {
        const std::int64_t steps = steps_for(2.0, lab.cfg.dt);
        const std::int64_t cut =
            1 + static_cast<std::int64_t>(rng_word(99, static_cast<std::uint64_t>(counter++)) %
                                          static_cast<std::uint64_t>(steps - 1));
        const double s = static_cast<double>(cut) * lab.cfg.dt;
        const double t = 2.0 - s;
        const Field direct = cocycle(spec, lab.cfg, 2.0, w, u0);
        const Field mid = cocycle(spec, lab.cfg, s, w, u0);
        const Field composed = cocycle(spec, lab.cfg, t, shift(w, s), mid);
        CHECK(norm_l2(direct - composed) <= 1e-10);
      }
    }
  }
}

TEST_CASE("linear flow contracts onto the spectral fixed point") {
  const Lab lab;
  const ProblemSpec lin = lab.linear(0.0);
  const Field ustar = linear_poisson_solve(lab.grid, lab.lambda, lin.g);
  const Field u0 = lab.u0();
  const double T = 12.0;
  const Field uT = deterministic_flow(lin, lab.cfg, T, u0);
  CHECK(norm_l2(uT - ustar) <= std::exp(-lab.lambda * T) * norm_l2(u0 - ustar) + 1e-12);
}

TEST_CASE("pure cubic dissipation never grows the norm") {
  const Lab lab;
  ProblemSpec pure = lab.cubic(0.0);
  pure.g = Field(lab.grid);
  pure.nonlin = Nonlinearity::cubic(1.0, Field(lab.grid));
  double prev = norm_l2(lab.u0());
  deterministic_flow_traced(pure, lab.cfg, 3.0, lab.u0(),
                            [&](double, const Field&, const Field& u) {
                              const double n = norm_l2(u);
                              CHECK(n <= prev * (1.0 + 1e-13));
                              prev = n;
                            });
  // and the decay is at least e^{-lambda t} since f u <= 0
  const Field uT = deterministic_flow(pure, lab.cfg, 3.0, lab.u0());
  CHECK(norm_l2(uT) <= std::exp(-lab.lambda * 3.0) * norm_l2(lab.u0()) * (1.0 + 1e-6));
}

TEST_CASE("continuity in initial data with a stable exponential rate") {
  const Lab lab;
  const ProblemSpec spec = lab.cubic(0.0);
  const Field u0 = lab.u0();
  const double T = 2.0;
  auto rate = [&](double delta_scale) {
    Field delta(lab.grid);
    for (int i = 0; i < delta.size(); ++i)
      delta[i] = delta_scale * rng_gauss(77, static_cast<std::uint64_t>(i));
    const Field a = deterministic_flow(spec, lab.cfg, T, u0);
    const Field b = deterministic_flow(spec, lab.cfg, T, u0 + delta);
    return std::log(norm_l2(a - b) / norm_l2(delta)) / T;
  };
  const double c1 = rate(1e-3);
  const double c2 = rate(5e-4);
  CHECK(std::isfinite(c1));
  CHECK(std::abs(c1 - c2) <= 0.05 * std::max({std::abs(c1), std::abs(c2), 1.0}));
}

TEST_CASE("instability and misuse surface as errors") {
  const Lab lab;
  ProblemSpec spec = lab.cubic(0.0);
  // explicit cubic term way past its budget
  Field big = constant_profile(lab.grid, 50.0);
  CHECK_THROWS_AS(step_v(spec, SolverConfig{0.5}, big, Field(lab.grid), Field(lab.grid)),
                  SolverError);

  // solver dt must match the noise grid
  const WienerPath w = lab.path(5);
  CHECK_THROWS_AS(cocycle(lab.cubic(0.5), SolverConfig{0.02}, 1.0, w, lab.u0()),
                  std::invalid_argument);

  // OU window exhausted
  CHECK_THROWS_AS(cocycle(lab.cubic(0.5), lab.cfg, 50.0, w, lab.u0()), std::invalid_argument);

  // duration must sit on the time grid
  CHECK_THROWS_AS(cocycle(lab.cubic(0.5), lab.cfg, 0.015, w, lab.u0()), std::invalid_argument);
}

TEST_CASE("pullback evolve composes shift and cocycle") {
  const Lab lab;
  const ProblemSpec spec = lab.cubic(0.5);
  const WienerPath w = lab.path(9, 6.0);
  const double T = 3.0;
  const PullbackContext ctx = make_pullback_context(spec, w, T);
  const Field direct = cocycle(spec, lab.cfg, T, shift(w, -T), lab.u0());
  const Field via_ctx = pullback_evolve(spec, lab.cfg, ctx, lab.u0());
  CHECK(norm_l2(direct - via_ctx) == 0.0);
}

TEST_SUITE_END();
