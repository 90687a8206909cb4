#include "gmopt/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace gmopt {

std::vector<Level> stratified_levels(std::size_t m) {
  if (m == 0) throw std::invalid_argument("stratified levels need m >= 1");
  std::vector<Level> levels(m);
  for (std::size_t k = 1; k <= m; ++k) {
    levels[k - 1].u = (2.0 * static_cast<double>(k) - 1.0) / (2.0 * static_cast<double>(m));
    levels[k - 1].weight = 1.0 / static_cast<double>(m);
  }
  return levels;
}

std::vector<Level> breakpoint_levels(const std::vector<DiscreteDistribution>& marginals) {
  if (marginals.empty()) {
    throw std::invalid_argument("breakpoint levels need at least one marginal");
  }
  std::vector<double> cuts{0.0};
  for (const DiscreteDistribution& mu : marginals) {
    for (double c : mu.cumulative()) cuts.push_back(std::min(c, 1.0));
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> distinct;
  for (double c : cuts) {
    if (distinct.empty() || c - distinct.back() > 1e-12) distinct.push_back(c);
  }
  distinct.back() = 1.0;  // each marginal's last cumulative is 1 up to round-off

  std::vector<Level> levels(distinct.size() - 1);
  for (std::size_t j = 0; j + 1 < distinct.size(); ++j) {
    levels[j].u = 0.5 * (distinct[j] + distinct[j + 1]);
    levels[j].weight = distinct[j + 1] - distinct[j];
  }
  return levels;
}

TransportPlan quantile_coupling(const QuantilePlanSpec& spec) {
  if (spec.marginals.empty()) {
    throw std::invalid_argument("quantile coupling needs at least one marginal");
  }
  std::vector<Level> levels =
      spec.levels.empty() ? breakpoint_levels(spec.marginals) : spec.levels;
  double total = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!(levels[k].u > 0.0 && levels[k].u < 1.0)) {
      throw std::invalid_argument("levels must lie strictly inside (0, 1)");
    }
    if (k > 0 && !(levels[k].u > levels[k - 1].u)) {
      throw std::invalid_argument("levels must be strictly increasing");
    }
    if (!(levels[k].weight > 0.0)) {
      throw std::invalid_argument("level weights must be positive");
    }
    total += levels[k].weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("level weights must sum to 1");
  }

  std::vector<GroundPoint> points;
  std::vector<double> masses;
  points.reserve(levels.size());
  masses.reserve(levels.size());
  for (const Level& level : levels) {
    GroundPoint z(spec.marginals.size());
    for (std::size_t i = 0; i < spec.marginals.size(); ++i) {
      z[i] = spec.marginals[i].quantile(level.u);
    }
    points.push_back(std::move(z));
    masses.push_back(level.weight);
  }
  return TransportPlan(points, masses);
}

bool is_monotone_set(const std::vector<GroundPoint>& points) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].size() != points[0].size()) return false;
  }
  std::vector<GroundPoint> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  // Lexicographic order: a comparable adjacent pair is ordered low-to-high,
  // and componentwise order is transitive along the chain.
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    for (std::size_t k = 0; k < sorted[i].size(); ++k) {
      if (sorted[i - 1][k] > sorted[i][k]) return false;
    }
  }
  return true;
}

double rectangle_mass(const TransportPlan& plan, const GroundPoint& a) {
  if (plan.size() > 0 && a.size() != plan.dimension()) {
    throw std::invalid_argument("rectangle corner dimension mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const GroundPoint& z = plan.points()[i];
    bool inside = true;
    for (std::size_t k = 0; k < z.size(); ++k) {
      if (z[k] > a[k]) {
        inside = false;
        break;
      }
    }
    if (inside) total += plan.masses()[i];
  }
  return total;
}

bool plans_equal_on_rectangles(const TransportPlan& p1, const TransportPlan& p2,
                               double tol) {
  if (p1.size() == 0 && p2.size() == 0) return true;
  if (p1.size() > 0 && p2.size() > 0 && p1.dimension() != p2.dimension()) {
    throw std::invalid_argument("plans must share a dimension");
  }
  const std::size_t dim = p1.size() > 0 ? p1.dimension() : p2.dimension();
  std::vector<std::set<double>> axis_values(dim);
  for (const TransportPlan* plan : {&p1, &p2}) {
    for (const GroundPoint& z : plan->points()) {
      for (std::size_t k = 0; k < dim; ++k) axis_values[k].insert(z[k]);
    }
  }
  std::vector<std::vector<double>> lists(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    lists[k].assign(axis_values[k].begin(), axis_values[k].end());
  }
  std::vector<std::size_t> odo(dim, 0);
  GroundPoint corner(dim);
  while (true) {
    for (std::size_t k = 0; k < dim; ++k) corner[k] = lists[k][odo[k]];
    if (std::abs(rectangle_mass(p1, corner) - rectangle_mass(p2, corner)) > tol) {
      return false;
    }
    std::size_t k = dim;
    while (k > 0) {
      --k;
      if (++odo[k] < lists[k].size()) break;
      odo[k] = 0;
      if (k == 0) return true;
    }
  }
}

}  // namespace gmopt
