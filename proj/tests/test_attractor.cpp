#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rdlab/attractor.hpp"
#include "rdlab/oracles.hpp"
#include "rdlab/profiles.hpp"

using namespace rdlab;

TEST_SUITE_BEGIN("attractor");

namespace {

struct Lab {
  Grid1D grid = Grid1D::make(6.0, 47);
  double lambda = 1.0;
  SolverConfig cfg{0.01};

  ProblemSpec linear(double eps, bool with_g = true) const {
    ProblemSpec s;
    s.lambda = lambda;
    s.epsilon = eps;
    s.grid = grid;
    s.g = with_g ? gaussian_profile(grid, 0.4, 0.5) : Field(grid);
    s.h = gaussian_profile(grid, 0.5, 0.8);
    s.nonlin = Nonlinearity::none(grid);
    return s;
  }
  ProblemSpec cubic(double eps) const {
    ProblemSpec s = linear(eps);
    s.nonlin = Nonlinearity::cubic(1.0, bump_profile(grid, 0.5, grid.L / 4.0));
    return s;
  }
  WienerPath path(std::uint64_t seed, double T = 12.0) const {
    return sample_path(seed, cfg.dt, -(T + 45.0), 3.0);
  }
};

}  // namespace

TEST_CASE("seed_ensemble: forced zero member, ball contract, determinism") {
  const Lab lab;
  const AbsorbingBall ball{1.5, 0.5, 2.0};
  CHECK(ball.radius() == doctest::Approx(1.5 + 0.5 * 1.5 * 2.0));

  const auto single = seed_ensemble(ball, lab.grid, 1, 42);
  REQUIRE(single.size() == 1);
  CHECK(norm_l2(single[0]) == 0.0);

  const auto ens = seed_ensemble(ball, lab.grid, 7, 42);
  REQUIRE(ens.size() == 7);
  CHECK(norm_l2(ens[0]) == 0.0);
  for (const Field& u : ens) CHECK(norm_l2(u) <= ball.radius() * (1.0 + 1e-12));

  const auto again = seed_ensemble(ball, lab.grid, 7, 42);
  for (std::size_t m = 0; m < ens.size(); ++m)
    for (int i = 0; i < lab.grid.N; ++i) CHECK(again[m][i] == ens[m][i]);

  CHECK_THROWS_AS(seed_ensemble(ball, lab.grid, 0, 1), std::invalid_argument);
}

TEST_CASE("absorbing ball radius is non-decreasing in epsilon") {
  for (double r_hat : {0.0, 0.5, 4.0}) {
    double prev = 0.0;
    for (double eps : {0.0, 0.25, 0.5, 1.0}) {
      const AbsorbingBall ball{2.0, eps, r_hat};
      CHECK(ball.radius() >= prev);
      CHECK(ball.radius() >= ball.M);
      prev = ball.radius();
    }
  }
}

TEST_CASE("hausdorff semidistance: axioms and hand values") {
  const Lab lab;
  Field a(lab.grid), b(lab.grid);
  a[3] = 1.0;
  b[10] = -2.0;
  const double dab = norm_l2(a - b);

  CHECK(hausdorff_semidist({a, b}, {a, b}) == 0.0);
  CHECK(hausdorff_semidist({a}, {b}) == doctest::Approx(dab));
  CHECK(hausdorff_semidist({b}, {a}) == doctest::Approx(dab));
  CHECK(hausdorff_semidist({a, b}, {a}) == doctest::Approx(dab));
  CHECK(hausdorff_semidist({a}, {a, b}) == 0.0);
  CHECK_THROWS_AS(hausdorff_semidist({a}, std::vector<Field>{}), std::invalid_argument);

  // triangle inequality and monotonicity under enlargement
  const auto pts = seed_ensemble(AbsorbingBall{1.0, 0.0, 0.0}, lab.grid, 5, 7);
  const std::vector<Field> Y(pts.begin(), pts.begin() + 3);
  const std::vector<Field> Z(pts.begin() + 1, pts.begin() + 4);
  const std::vector<Field> W(pts.begin() + 2, pts.end());
  CHECK(hausdorff_semidist(Y, W) <=
        hausdorff_semidist(Y, Z) + hausdorff_semidist(Z, W) + 1e-12);
  std::vector<Field> Zbig = Z;
  Zbig.push_back(pts[0]);
  CHECK(hausdorff_semidist(Y, Zbig) <= hausdorff_semidist(Y, Z) + 1e-15);
}

TEST_CASE("global attractor of the homogeneous linear problem is {0}") {
  const Lab lab;
  const AttractorCloud cloud =
      global_attractor(lab.linear(0.0, /*with_g=*/false), lab.cfg, 12.0, 4, 1e-6);
  REQUIRE(cloud.points.size() == 1);
  CHECK(norm_l2(cloud.points[0]) <= 1e-5);
}

TEST_CASE("global attractor of the forced linear problem is the direct solve") {
  const Lab lab;
  const ProblemSpec lin = lab.linear(0.0);
  const AttractorCloud cloud = global_attractor(lin, lab.cfg, 14.0, 4, 1e-6);
  REQUIRE(cloud.points.size() == 1);
  const Field ustar = linear_poisson_solve(lab.grid, lab.lambda, lin.g);
  CHECK(norm_l2(cloud.points[0] - ustar) <= 1e-5);
  CHECK(cloud.resolution <= std::exp(-lab.lambda * 7.0) * 4.0 * 2.0);
}

TEST_CASE("global attractor of the undriven cubic problem is {0}") {
  const Lab lab;
  ProblemSpec pure = lab.cubic(0.0);
  pure.g = Field(lab.grid);
  pure.nonlin = Nonlinearity::cubic(1.0, Field(lab.grid));
  const AttractorCloud cloud = global_attractor(pure, lab.cfg, 14.0, 4, 1e-6);
  REQUIRE(cloud.points.size() == 1);
  CHECK(norm_l2(cloud.points[0]) <= 1e-5);
}

TEST_CASE("linear pullback cloud collapses onto the random fixed point") {
  const Lab lab;
  const double T = 16.0;  // contraction must dip below the dedup tolerance
  const WienerPath omega = lab.path(3, T);

  SUBCASE("eps = 0 reduces to the deterministic point") {
    const ProblemSpec lin = lab.linear(0.0);
    const AttractorCloud cloud = pullback_attractor(lin, lab.cfg, omega, T, 4, 1e-6, 2.0);
    REQUIRE(cloud.points.size() == 1);
    const Field ustar = linear_poisson_solve(lab.grid, lab.lambda, lin.g);
    CHECK(norm_l2(cloud.points[0] - ustar) <= 1e-4);
    CHECK(cloud.resolution <= std::exp(-lab.lambda * T / 2.0) * 2.0 * (2.0 + 1.0));
  }

  SUBCASE("eps > 0 matches the Duhamel series oracle") {
    for (double eps : {0.25, 1.0}) {
      const ProblemSpec lin = lab.linear(eps);
      const AttractorCloud cloud = pullback_attractor(lin, lab.cfg, omega, T, 4, 1e-6, 2.0);
      REQUIRE(cloud.points.size() == 1);
      const OuProcess ou(omega, lin.lambda, lin.nonlin.p);
      const Field oracle = duhamel_fixed_point(lin, lab.cfg, ou, T);
      CHECK(norm_l2(cloud.points[0] - oracle) / norm_l2(oracle) <= 1e-4);
    }
  }
}

TEST_CASE("eps = 0 pullback equals the global attractor point for point") {
  const Lab lab;
  const WienerPath omega = lab.path(5);
  const AttractorCloud pulled = pullback_attractor(lab.cubic(0.0), lab.cfg, omega, 12.0, 4,
                                                   1e-6, 2.0, /*ensemble_seed=*/99);
  const AttractorCloud global =
      global_attractor(lab.cubic(0.0), lab.cfg, 12.0, 4, 1e-6, 2.0, /*ensemble_seed=*/99);
  REQUIRE(pulled.points.size() == global.points.size());
  for (std::size_t i = 0; i < global.points.size(); ++i)
    CHECK(norm_l2(pulled.points[i] - global.points[i]) <= 1e-8);
}

TEST_CASE("dedup keeps clouds pairwise separated") {
  const Lab lab;
  Field a(lab.grid), b(lab.grid), c(lab.grid);
  a[0] = 1.0;
  b[0] = 1.0 + 1e-9;  // merges with a
  c[0] = 2.0;
  const auto kept = dedup_points({a, b, c}, 1e-6);
  REQUIRE(kept.size() == 2);
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = i + 1; j < kept.size(); ++j)
      CHECK(norm_l2(kept[i] - kept[j]) > 1e-6);
}

TEST_CASE("precompactness probe: net sizes and the far-field certificate") {
  const Lab lab;
  AttractorCloud single;
  Field pt(lab.grid);
  pt[lab.grid.N / 2] = 0.3;
  single.points = {pt};

  CHECK(union_precompactness_probe({&single}, 0.1).net_size == 1);

  // a second cloud within eta/2 merges into one net ball
  AttractorCloud near_clone;
  Field pt2 = pt;
  pt2[lab.grid.N / 2] += 0.04 / std::sqrt(lab.grid.hx);  // L2 distance 0.04
  near_clone.points = {pt2};
  const CoveringReport rep = union_precompactness_probe({&single, &near_clone}, 0.1);
  CHECK(rep.net_size == 1);
  CHECK(rep.pooled_points == 2);

  // center-supported points pass the far-field certificate
  CHECK(rep.R == doctest::Approx(lab.grid.L / 2.0));
  CHECK(rep.max_tail == 0.0);
  CHECK(rep.tail_ok);

  CHECK_THROWS_AS(union_precompactness_probe({&single}, 0.0), std::invalid_argument);
}

TEST_SUITE_END();
