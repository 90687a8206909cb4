#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gmopt/couplings.hpp"
#include "gmopt/pass.hpp"

using gmopt::ConcaveFn;
using gmopt::DiscreteDistribution;
using gmopt::GroundPoint;
using gmopt::MarginalFamily;
using gmopt::Partition;
using gmopt::PathPlan;

namespace {

DiscreteDistribution uniform_on(const std::vector<double>& atoms) {
  return DiscreteDistribution(atoms,
                              std::vector<double>(atoms.size(), 1.0 / atoms.size()));
}

double mass_at(const PathPlan& plan, const GroundPoint& z) {
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (plan.points()[i] == z) return plan.masses()[i];
  }
  return 0.0;
}

/// The toy family mu_t = uniform{0, t} listed on every dyadic time of the
/// given depth (weakly continuous in t, so refinement is meaningful).
MarginalFamily ramp_family(int depth) {
  std::vector<double> times;
  std::vector<DiscreteDistribution> marginals;
  const std::size_t pieces = std::size_t{1} << depth;
  const double step = 1.0 / static_cast<double>(pieces);
  for (std::size_t k = 1; k <= pieces; ++k) {
    const double t = static_cast<double>(k) * step;
    times.push_back(t);
    marginals.push_back(uniform_on({0.0, t}));
  }
  return MarginalFamily(times, marginals, 1.0);
}

}  // namespace

TEST_CASE("dyadic partitions are the binary grids") {
  Partition p0 = gmopt::dyadic_partitions(2.0, 0);
  CHECK(p0.points() == std::vector<double>{0.0, 2.0});
  Partition p1 = gmopt::dyadic_partitions(1.0, 1);
  CHECK(p1.points() == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(gmopt::dyadic_partitions(1.0, 2).size() == 5);
  CHECK_THROWS_AS(gmopt::dyadic_partitions(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gmopt::dyadic_partitions(1.0, -1), std::invalid_argument);
}

TEST_CASE("dyadic partitions nest exactly across depths") {
  Partition coarse = gmopt::dyadic_partitions(0.7, 2);
  Partition fine = gmopt::dyadic_partitions(0.7, 5);
  for (double t : coarse.points()) {
    CHECK(std::find(fine.points().begin(), fine.points().end(), t) !=
          fine.points().end());
  }
}

TEST_CASE("partitions validate their points") {
  CHECK_THROWS_AS(Partition({0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Partition({0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Partition({0.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("riemann sums use the right-endpoint rule") {
  Partition part({0.0, 0.5, 1.0});
  CHECK(gmopt::riemann_sum({1.0, 1.0}, part) == doctest::Approx(1.0));
  CHECK(gmopt::riemann_sum({0.0, 1.0}, part) == doctest::Approx(0.5));
  CHECK(gmopt::riemann_sum({0.0, 0.0}, part) == 0.0);
  CHECK_THROWS_AS(gmopt::riemann_sum({1.0}, part), std::domain_error);
}

TEST_CASE("h-weighted riemann sums apply h per sample") {
  auto h = ConcaveFn::neg_square();
  CHECK(gmopt::riemann_sum_h({2.0}, Partition({0.0, 1.0}), h) ==
        doctest::Approx(-4.0));
  CHECK(gmopt::riemann_sum_h({0.0, 0.0}, Partition({0.0, 0.5, 1.0}), h) == 0.0);
  CHECK(gmopt::riemann_sum_h({0.0, 1.0}, Partition({0.0, 0.5, 1.0}), h) ==
        doctest::Approx(-0.5));
}

TEST_CASE("phi_n is the running maximum over refinements") {
  std::vector<Partition> chain{gmopt::dyadic_partitions(1.0, 0),
                               gmopt::dyadic_partitions(1.0, 1),
                               gmopt::dyadic_partitions(1.0, 2)};
  SUBCASE("constant paths have constant sums") {
    CHECK(gmopt::phi_n({3.0, 3.0, 3.0, 3.0}, chain) == doctest::Approx(3.0));
  }
  SUBCASE("decreasing paths have refinement-increasing sums") {
    // f(t) = 1 - t: s_k = 1/2 - 2^{-k-1}, so the finest sum wins.
    std::vector<double> path{0.75, 0.5, 0.25, 0.0};
    CHECK(gmopt::phi_n(path, chain) == doctest::Approx(0.5 - 0.125));
    CHECK(gmopt::phi_n(path, {chain[2]}) == doctest::Approx(0.5 - 0.125));
  }
  SUBCASE("increasing paths are dominated by the coarsest sum") {
    // f(t) = t: s_k = 1/2 + 2^{-k-1}, maximized at the coarsest grid.
    std::vector<double> path{0.25, 0.5, 0.75, 1.0};
    CHECK(gmopt::phi_n(path, chain) == doctest::Approx(1.0));
  }
  SUBCASE("non-nested chains are rejected") {
    std::vector<Partition> bad{Partition({0.0, 0.3, 1.0}),
                               gmopt::dyadic_partitions(1.0, 1)};
    CHECK_THROWS_AS(gmopt::phi_n({1.0, 2.0}, bad), std::invalid_argument);
  }
}

TEST_CASE("phi_n is nonincreasing in the chain start") {
  std::mt19937_64 rng(20250101);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  std::vector<Partition> chain;
  for (int n = 0; n <= 4; ++n) chain.push_back(gmopt::dyadic_partitions(1.0, n));
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> path(16);
    for (double& v : path) v = value(rng);
    double previous = 0.0;
    for (std::size_t start = 0; start < chain.size(); ++start) {
      std::vector<Partition> tail(chain.begin() + static_cast<long>(start),
                                  chain.end());
      const double phi = gmopt::phi_n(path, tail);
      if (start > 0) CHECK(phi <= previous + 1e-12);
      previous = phi;
    }
  }
}

TEST_CASE("the quantile path plan follows the listed quantile functions") {
  SUBCASE("a single time degenerates to the one-marginal coupling") {
    MarginalFamily fam({1.0}, {uniform_on({0.0, 3.0})}, 1.0);
    PathPlan plan = gmopt::continuum_quantile_plan(fam, Partition({0.0, 1.0}));
    REQUIRE(plan.size() == 2);
    CHECK(mass_at(plan, {0.0}) == doctest::Approx(0.5));
    CHECK(mass_at(plan, {3.0}) == doctest::Approx(0.5));
  }
  SUBCASE("identical marginals ride the diagonal") {
    auto mu = uniform_on({-1.0, 2.0});
    MarginalFamily fam({0.5, 1.0}, {mu, mu}, 1.0);
    PathPlan plan = gmopt::continuum_quantile_plan(fam, Partition({0.0, 0.5, 1.0}));
    for (const GroundPoint& z : plan.points()) CHECK(z[0] == z[1]);
  }
  SUBCASE("the ramp family pairs low with low and high with high") {
    MarginalFamily fam({0.5, 1.0},
                       {uniform_on({0.0, 0.5}), uniform_on({0.0, 1.0})}, 1.0);
    PathPlan plan =
        gmopt::continuum_quantile_plan(fam, Partition({0.0, 0.5, 1.0}), 2);
    REQUIRE(plan.size() == 2);
    CHECK(mass_at(plan, {0.0, 0.0}) == doctest::Approx(0.5));
    CHECK(mass_at(plan, {0.5, 1.0}) == doctest::Approx(0.5));
  }
  SUBCASE("a missing marginal is refused") {
    MarginalFamily fam({1.0}, {uniform_on({0.0, 1.0})}, 1.0);
    CHECK_THROWS_AS(
        gmopt::continuum_quantile_plan(fam, Partition({0.0, 0.5, 1.0})),
        std::invalid_argument);
  }
}

TEST_CASE("pass cost is the mass-weighted h of the path integrals") {
  Partition part({0.0, 0.5, 1.0});
  auto h = ConcaveFn::neg_square();
  SUBCASE("the zero plan costs nothing") {
    PathPlan zero({{0.0, 0.0}}, {1.0});
    CHECK(gmopt::pass_cost(zero, part, h) == 0.0);
  }
  SUBCASE("the ramp plan realizes the closed form") {
    PathPlan plan({{0.0, 0.0}, {0.5, 1.0}}, {0.5, 0.5});
    // Sums are 0 and 3/4; cost = -(3/4)^2 / 2 = -9/32.
    CHECK(gmopt::pass_cost(plan, part, h) == doctest::Approx(-9.0 / 32));
  }
  SUBCASE("a single atom reduces to h of its sum") {
    PathPlan one({{2.0, 2.0}}, {1.0});
    CHECK(gmopt::pass_cost(one, part, h) == doctest::Approx(-4.0));
  }
  SUBCASE("dimension mismatches are refused") {
    PathPlan bad({{1.0}}, {1.0});
    CHECK_THROWS_AS(gmopt::pass_cost(bad, part, h), std::domain_error);
  }
}

TEST_CASE("marginal fidelity holds at every partition time") {
  MarginalFamily fam = ramp_family(3);
  Partition part = gmopt::dyadic_partitions(1.0, 3);
  PathPlan plan = gmopt::continuum_quantile_plan(fam, part);
  for (std::size_t i = 0; i < part.steps(); ++i) {
    auto got = plan.marginal(i).distribution;
    const auto& want = fam.at(part.points()[i + 1]);
    REQUIRE(got.size() == want.size());
    for (std::size_t a = 0; a < got.size(); ++a) {
      CHECK(got.atoms()[a] == want.atoms()[a]);
      CHECK(got.weights()[a] == doctest::Approx(want.weights()[a]).epsilon(1e-12));
    }
  }
}

TEST_CASE("refinement of the ramp family converges with shrinking gaps") {
  MarginalFamily fam = ramp_family(5);
  auto h = ConcaveFn::neg_square();
  std::vector<double> costs;
  for (int n = 0; n <= 5; ++n) {
    Partition part = gmopt::dyadic_partitions(1.0, n);
    costs.push_back(gmopt::pass_cost(gmopt::continuum_quantile_plan(fam, part),
                                     part, h));
    // Closed form: the upper quantile path is f(t) = t with Riemann sum
    // 1/2 + 2^{-n-1}; the lower path is 0.
    const double upper = 0.5 + std::ldexp(1.0, -n - 1);
    CHECK(costs.back() == doctest::Approx(-0.5 * upper * upper).epsilon(1e-12));
  }
  for (std::size_t n = 2; n < costs.size(); ++n) {
    CHECK(std::abs(costs[n] - costs[n - 1]) <=
          std::abs(costs[n - 1] - costs[n - 2]) + 1e-12);
  }
}

TEST_CASE("the time-grid LP confirms the quantile plan") {
  SUBCASE("two times, two atoms each") {
    MarginalFamily fam({0.5, 1.0},
                       {uniform_on({0.0, 1.0}), uniform_on({0.0, 2.0})}, 1.0);
    auto report = gmopt::compare_with_lp(fam, Partition({0.0, 0.5, 1.0}),
                                         ConcaveFn::neg_square());
    CHECK(report.gap <= 1e-8);
    CHECK(report.rectangles_equal);
    // Permutation oracle: the only other coupling costs -5/8 > -9/8.
    CHECK(report.lp_objective == doctest::Approx(-9.0 / 8).epsilon(1e-9));
  }
  SUBCASE("identical marginals yield the diagonal") {
    auto mu = uniform_on({0.0, 1.0});
    MarginalFamily fam({0.5, 1.0}, {mu, mu}, 1.0);
    auto report = gmopt::compare_with_lp(fam, Partition({0.0, 0.5, 1.0}),
                                         ConcaveFn::neg_square());
    CHECK(report.gap <= 1e-10);
    CHECK(report.rectangles_equal);
    for (const GroundPoint& z : report.lp_plan.points()) CHECK(z[0] == z[1]);
  }
  SUBCASE("affine h ties every coupling") {
    MarginalFamily fam({0.5, 1.0},
                       {uniform_on({0.0, 1.0}), uniform_on({0.0, 2.0})}, 1.0);
    auto h = ConcaveFn::affine(2.0, -1.0);
    auto report = gmopt::compare_with_lp(fam, Partition({0.0, 0.5, 1.0}), h);
    // Linearity: every coupling costs 2*(mean_1/2 + mean_2/2) - 1.
    const double tied = 2.0 * (0.25 + 0.5) - 1.0;
    CHECK(report.lp_objective == doctest::Approx(tied).epsilon(1e-9));
    CHECK(report.quantile_cost == doctest::Approx(tied).epsilon(1e-9));
    CHECK(report.gap <= 1e-9);
  }
}

TEST_CASE("grid-level optimality holds on random families") {
  std::mt19937_64 rng(20250102);
  std::uniform_int_distribution<int> natoms(2, 3);
  std::uniform_int_distribution<int> depth_dist(1, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const int depth = depth_dist(rng);
    Partition part = gmopt::dyadic_partitions(1.0, depth);
    std::vector<double> times(part.points().begin() + 1, part.points().end());
    std::vector<DiscreteDistribution> marginals;
    std::uniform_int_distribution<int> atom(0, 6);
    std::uniform_int_distribution<int> raw(1, 9);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const int m = natoms(rng);
      std::vector<double> atoms;
      std::vector<double> weights;
      double total = 0.0;
      for (int a = 0; a < m; ++a) {
        atoms.push_back(atom(rng) + 0.5 * a);
        weights.push_back(raw(rng));
        total += weights.back();
      }
      for (double& w : weights) w /= total;
      marginals.emplace_back(atoms, weights);
    }
    MarginalFamily fam(times, marginals, 1.0);
    auto report = gmopt::compare_with_lp(fam, part, ConcaveFn::neg_square());
    CHECK(report.gap <= 1e-8);
    CHECK(report.rectangles_equal);
  }
}

TEST_CASE("the LP budget refuses oversized product grids") {
  // 16 steps with 2-atom marginals need 2^16 > 10^4 variables.
  MarginalFamily fam = ramp_family(4);
  std::vector<double> points(17);
  for (int k = 0; k <= 16; ++k) points[static_cast<std::size_t>(k)] = k / 16.0;
  CHECK_THROWS_AS(
      gmopt::compare_with_lp(MarginalFamily(fam.times(), fam.marginals(), 1.0),
                             Partition(points), ConcaveFn::neg_square()),
      std::invalid_argument);
}
