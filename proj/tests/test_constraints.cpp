#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "gmopt/constraints.hpp"
#include "gmopt/measures.hpp"

using gmopt::ConstraintFamily;
using gmopt::DiscreteDistribution;
using gmopt::DiscreteMeasure;
using gmopt::GroundPoint;
using gmopt::TestFunction;

namespace {

std::vector<GroundPoint> product_grid_2d(const std::vector<double>& xs,
                                         const std::vector<double>& ys) {
  std::vector<GroundPoint> grid;
  for (double x : xs)
    for (double y : ys) grid.push_back({x, y});
  return grid;
}

DiscreteMeasure random_measure_on(const std::vector<GroundPoint>& grid,
                                  std::mt19937_64& rng, double total) {
  std::uniform_real_distribution<double> raw(0.0, 1.0);
  std::vector<double> masses(grid.size());
  double sum = 0.0;
  for (double& m : masses) {
    m = raw(rng);
    sum += m;
  }
  for (double& m : masses) m *= total / sum;
  return DiscreteMeasure(grid, masses);
}

}  // namespace

TEST_CASE("multi_marginal_family on a single point mass is identically zero") {
  auto family = gmopt::multi_marginal_family({DiscreteDistribution::point_mass(0.0)},
                                             {{0.0}});
  REQUIRE(family.size() == 1);
  CHECK(family.functions()[0].value({0.0}) == 0.0);
}

TEST_CASE("multi_marginal_family enumerates axes times atoms") {
  DiscreteDistribution half({0.0, 1.0}, {0.5, 0.5});
  auto grid = product_grid_2d({0.0, 1.0}, {0.0, 1.0});
  auto family = gmopt::multi_marginal_family({half, half}, grid);
  REQUIRE(family.size() == 4);
  for (const auto& f : family.functions()) {
    CHECK(f.kind() == TestFunction::Kind::MarginalIndicator);
    CHECK(f.center() == doctest::Approx(0.5));
  }

  DiscreteDistribution three({0.0, 1.0, 2.0}, {0.2, 0.3, 0.5});
  DiscreteDistribution two({0.0, 1.0}, {0.4, 0.6});
  std::vector<GroundPoint> grid32;
  for (double x : three.atoms())
    for (double y : two.atoms()) grid32.push_back({x, y});
  CHECK(gmopt::multi_marginal_family({three, two}, grid32).size() == 5);
}

TEST_CASE("multi_marginal_family rejects off-support grids") {
  DiscreteDistribution half({0.0, 1.0}, {0.5, 0.5});
  CHECK_THROWS_AS(gmopt::multi_marginal_family({half, half}, {{0.0, 2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(gmopt::multi_marginal_family({half}, {{0.0, 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("martingale_family enumerates levels and prefixes") {
  auto one = gmopt::martingale_family({{0.0, -1.0}, {0.0, 1.0}});
  REQUIRE(one.size() == 1);
  const auto& f = one.functions()[0];
  CHECK(f.kind() == TestFunction::Kind::MartingaleIncrement);
  CHECK(f.value({0.0, -1.0}) == -1.0);
  CHECK(f.value({0.0, 1.0}) == 1.0);

  auto two = gmopt::martingale_family({{0.0, 0.0}, {1.0, 2.0}});
  CHECK(two.size() == 2);

  auto five = gmopt::martingale_family({{0.0, 0.0, 0.0}, {0.0, 1.0, 1.0}, {1.0, 2.0, 0.0}});
  CHECK(five.size() == 5);

  CHECK_THROWS_AS(gmopt::martingale_family({{0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(gmopt::martingale_family({}), std::invalid_argument);
}

TEST_CASE("merge concatenates families and carries the growth table") {
  auto a = gmopt::multi_marginal_family({DiscreteDistribution::point_mass(0.0),
                                         DiscreteDistribution::point_mass(1.0)},
                                        {{0.0, 1.0}});
  auto b = gmopt::martingale_family({{0.0, 1.0}, {0.0, 0.0}});
  auto merged = gmopt::merge(a, b);
  CHECK(merged.size() == a.size() + b.size());
  CHECK_FALSE(merged.has_growth_table());

  ConstraintFamily with_table({}, {{{0.0, 1.0}, 2.0}});
  CHECK(gmopt::merge(a, with_table).has_growth_table());
  CHECK_THROWS_AS(gmopt::merge(with_table, with_table), std::invalid_argument);
}

TEST_CASE("evaluate_moment matches the worked examples") {
  auto f = TestFunction::marginal_indicator(0, 0.0, 0.5);
  DiscreteMeasure empty({}, {});
  CHECK(gmopt::evaluate_moment(f, empty) == 0.0);

  DiscreteMeasure unit({{0.0, 7.0}}, {1.0});
  CHECK(gmopt::evaluate_moment(f, unit) == doctest::Approx(0.5));

  auto inc = TestFunction::martingale_increment(1, {0.0});
  DiscreteMeasure split({{0.0, -1.0}, {0.0, 1.0}}, {0.5, 0.5});
  CHECK(gmopt::evaluate_moment(inc, split) == doctest::Approx(0.0));
}

TEST_CASE("tabulated functions are rejected off their table") {
  auto f = TestFunction::tabulated({{{0.0}, 1.0}}, 0.0);
  CHECK(f.value({0.0}) == 1.0);
  CHECK_THROWS_AS(f.value({1.0}), std::out_of_range);
}

TEST_CASE("evaluate_moment is linear in the measure") {
  std::mt19937_64 rng(20240910);
  auto grid = product_grid_2d({0.0, 1.0, 2.0}, {-1.0, 0.5, 3.0});
  std::uniform_real_distribution<double> coef(0.1, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto m1 = random_measure_on(grid, rng, 1.0);
    auto m2 = random_measure_on(grid, rng, 1.0);
    const double a = coef(rng);
    const double b = coef(rng);
    std::vector<GroundPoint> pts = m1.points();
    std::vector<double> ms;
    for (double m : m1.masses()) ms.push_back(a * m);
    for (std::size_t i = 0; i < m2.size(); ++i) {
      pts.push_back(m2.points()[i]);
      ms.push_back(b * m2.masses()[i]);
    }
    DiscreteMeasure combo(pts, ms);

    std::vector<TestFunction> fns = {
        TestFunction::marginal_indicator(0, 1.0, 0.3),
        TestFunction::martingale_increment(1, {0.0}),
        TestFunction::expression(gmopt::Expression::parse("x1*x2-1"), 0.25),
    };
    for (const auto& f : fns) {
      const double lhs = gmopt::evaluate_moment(f, combo);
      const double rhs =
          a * gmopt::evaluate_moment(f, m1) + b * gmopt::evaluate_moment(f, m2);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("marginal family separates measures of equal mass") {
  // Two equal-mass measures agree on every family function iff their
  // axis projections agree atom-by-atom. Equal mass must be assumed:
  // scaling a feasible measure preserves all images (checked below).
  std::mt19937_64 rng(20240911);
  DiscreteDistribution mx({0.0, 1.0, 2.0}, {0.2, 0.3, 0.5});
  DiscreteDistribution my({-1.0, 0.0, 1.0}, {0.25, 0.25, 0.5});
  auto grid = product_grid_2d(mx.atoms(), my.atoms());
  auto family = gmopt::multi_marginal_family({mx, my}, grid);

  auto projections_equal = [&](const DiscreteMeasure& a, const DiscreteMeasure& b) {
    for (std::size_t axis = 0; axis < 2; ++axis) {
      std::map<double, double> pa, pb;
      for (std::size_t i = 0; i < a.size(); ++i) pa[a.points()[i][axis]] += a.masses()[i];
      for (std::size_t i = 0; i < b.size(); ++i) pb[b.points()[i][axis]] += b.masses()[i];
      for (const auto& [atom, mass] : pa) {
        if (std::abs(mass - pb[atom]) > 1e-9) return false;
      }
      for (const auto& [atom, mass] : pb) {
        if (std::abs(mass - pa[atom]) > 1e-9) return false;
      }
    }
    return true;
  };
  auto images_equal = [&](const DiscreteMeasure& a, const DiscreteMeasure& b) {
    for (const auto& f : family.functions()) {
      if (std::abs(gmopt::evaluate_moment(f, a) - gmopt::evaluate_moment(f, b)) > 1e-9) {
        return false;
      }
    }
    return true;
  };

  int agreements = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto a = random_measure_on(grid, rng, 1.0);
    auto b = random_measure_on(grid, rng, 1.0);
    CHECK(images_equal(a, b) == projections_equal(a, b));
    // Same measure with axis-preserving mass shuffle: swap mass between two
    // points sharing no coordinates, then fix projections by the opposite
    // swap on the complementary pair (a 2x2 rectangle rotation).
    if (trial % 2 == 0) {
      std::vector<double> masses(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) masses[i] = a.masses()[i];
      // Rectangle on atoms (0,1) x (0,1): indices in row-major 3x3 layout.
      const double eps = 0.05;
      masses[0] += eps;
      masses[4] += eps;
      masses[1] -= eps > masses[1] ? 0.0 : eps;
      masses[3] -= eps > masses[3] ? 0.0 : eps;
      if (masses[1] >= 0.0 && masses[3] >= 0.0 &&
          std::abs((masses[0] + masses[1] + masses[3] + masses[4]) -
                   (a.masses()[0] + a.masses()[1] + a.masses()[3] + a.masses()[4])) < 1e-12) {
        DiscreteMeasure rotated(grid, masses);
        CHECK(images_equal(a, rotated));
        CHECK(projections_equal(a, rotated));
        ++agreements;
      }
    }
  }
  CHECK(agreements > 0);

  // Scaling counterexample: a marginal-feasible measure and its double have
  // identical images but different total mass, so the competitor definition
  // carries equal mass as a separate requirement.
  std::vector<double> product_masses;
  for (double wx : mx.weights())
    for (double wy : my.weights()) product_masses.push_back(wx * wy);
  DiscreteMeasure feasible(grid, product_masses);
  std::vector<double> doubled = product_masses;
  for (double& m : doubled) m *= 2.0;
  DiscreteMeasure scaled(grid, doubled);
  CHECK(images_equal(feasible, scaled));
  CHECK_FALSE(std::abs(feasible.total_mass() - scaled.total_mass()) < 1e-9);
}

TEST_CASE("martingale family images encode the discrete martingale property") {
  std::mt19937_64 rng(20240912);
  std::vector<GroundPoint> grid;
  for (double x : {0.0, 1.0})
    for (double y : {-1.0, 0.0, 2.0})
      for (double z : {-2.0, 0.0, 1.0}) grid.push_back({x, y, z});
  auto family = gmopt::martingale_family(grid);

  for (int trial = 0; trial < 40; ++trial) {
    auto a = random_measure_on(grid, rng, 1.0);
    auto b = random_measure_on(grid, rng, 1.0);

    bool images_agree = true;
    for (const auto& f : family.functions()) {
      if (std::abs(gmopt::evaluate_moment(f, a) - gmopt::evaluate_moment(f, b)) > 1e-9) {
        images_agree = false;
        break;
      }
    }

    // Independent check: group the signed measure a-b by prefix at each
    // level and sum increments directly.
    bool martingale_property = true;
    std::map<GroundPoint, double> signed_mass;
    for (std::size_t i = 0; i < a.size(); ++i) signed_mass[a.points()[i]] += a.masses()[i];
    for (std::size_t i = 0; i < b.size(); ++i) signed_mass[b.points()[i]] -= b.masses()[i];
    for (std::size_t level = 1; level <= 2; ++level) {
      std::map<std::vector<double>, double> sums;
      for (const auto& [z, m] : signed_mass) {
        std::vector<double> prefix(z.begin(), z.begin() + static_cast<long>(level));
        sums[prefix] += m * (z[level] - z[level - 1]);
      }
      for (const auto& [prefix, s] : sums) {
        if (std::abs(s) > 1e-9) martingale_property = false;
      }
    }
    CHECK(images_agree == martingale_property);
  }
}

TEST_CASE("validate_growth_bound computes tight constants and flags zeros") {
  std::vector<GroundPoint> grid = {{0.0}, {1.0}, {2.0}};
  auto f3 = TestFunction::tabulated({{{0.0}, 3.0}, {{1.0}, -1.0}, {{2.0}, 0.0}}, 0.0);
  auto f0 = TestFunction::tabulated({{{0.0}, 0.0}, {{1.0}, 0.0}, {{2.0}, 0.0}}, 0.0);
  ConstraintFamily default_g({f3, f0});
  auto report = gmopt::validate_growth_bound(default_g, grid);
  REQUIRE(report.entries.size() == 2);
  CHECK(report.ok);
  CHECK(report.entries[0].bound == doctest::Approx(3.0));
  CHECK(report.entries[1].bound == 0.0);

  std::map<GroundPoint, double> g{{{0.0}, 0.0}, {{1.0}, 1.0}, {{2.0}, 1.0}};
  auto f1 = TestFunction::tabulated({{{0.0}, 1.0}, {{1.0}, 0.0}, {{2.0}, 0.0}}, 0.0);
  ConstraintFamily zero_g({f1, f0}, g);
  auto flagged = gmopt::validate_growth_bound(zero_g, grid);
  CHECK_FALSE(flagged.ok);
  CHECK_FALSE(flagged.entries[0].defined);
  CHECK(flagged.entries[1].defined);
}
