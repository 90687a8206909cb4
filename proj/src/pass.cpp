#include "gmopt/pass.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gmopt/constraints.hpp"
#include "gmopt/couplings.hpp"

namespace gmopt {

MarginalFamily::MarginalFamily(std::vector<double> times,
                               std::vector<DiscreteDistribution> marginals,
                               double horizon)
    : times_(std::move(times)), marginals_(std::move(marginals)), horizon_(horizon) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw std::invalid_argument("marginal family needs a positive finite horizon");
  }
  if (times_.empty() || times_.size() != marginals_.size()) {
    throw std::invalid_argument("marginal family needs one marginal per time");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!(times_[i] >= 0.0 && times_[i] <= horizon_)) {
      throw std::invalid_argument("times must lie in [0, horizon]");
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw std::invalid_argument("times must be strictly increasing");
    }
  }
}

const DiscreteDistribution& MarginalFamily::at(double t) const {
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] == t) return marginals_[i];
  }
  std::ostringstream msg;
  msg << "no marginal listed at time " << t;
  throw std::invalid_argument(msg.str());
}

Partition::Partition(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("a partition needs at least two points");
  }
  if (points_.front() != 0.0) {
    throw std::invalid_argument("a partition starts at 0");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1]) || !std::isfinite(points_[i])) {
      throw std::invalid_argument("partition points must increase strictly");
    }
  }
}

Partition dyadic_partitions(double horizon, int n) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("dyadic partitions need a positive horizon");
  }
  if (n < 0) {
    throw std::invalid_argument("dyadic partitions need depth n >= 0");
  }
  const std::size_t pieces = std::size_t{1} << n;
  // Multiplying the halved step keeps nested depths bitwise identical.
  const double step = horizon / static_cast<double>(pieces);
  std::vector<double> points(pieces + 1);
  for (std::size_t k = 0; k <= pieces; ++k) points[k] = static_cast<double>(k) * step;
  points[pieces] = horizon;
  return Partition(points);
}

double riemann_sum(const std::vector<double>& path, const Partition& part) {
  if (path.size() != part.steps()) {
    throw std::domain_error("path length must match the partition's step count");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    total += path[i] * (part.points()[i + 1] - part.points()[i]);
  }
  return total;
}

double riemann_sum_h(const std::vector<double>& path, const Partition& part,
                     const ConcaveFn& h) {
  if (path.size() != part.steps()) {
    throw std::domain_error("path length must match the partition's step count");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    total += h(path[i]) * (part.points()[i + 1] - part.points()[i]);
  }
  return total;
}

double phi_n(const std::vector<double>& path, const std::vector<Partition>& partitions) {
  if (partitions.empty()) {
    throw std::invalid_argument("phi_n needs at least one partition");
  }
  const Partition& finest = partitions.back();
  if (path.size() != finest.steps()) {
    throw std::domain_error("path length must match the finest partition");
  }
  double best = 0.0;
  bool first = true;
  for (const Partition& part : partitions) {
    std::vector<double> restricted(part.steps());
    for (std::size_t i = 1; i < part.size(); ++i) {
      const double t = part.points()[i];
      auto it = std::find(finest.points().begin() + 1, finest.points().end(), t);
      if (it == finest.points().end()) {
        throw std::invalid_argument("partitions must be nested in the finest one");
      }
      restricted[i - 1] =
          path[static_cast<std::size_t>(it - finest.points().begin()) - 1];
    }
    const double s = riemann_sum(restricted, part);
    if (first || s > best) best = s;
    first = false;
  }
  return best;
}

PathPlan continuum_quantile_plan(const MarginalFamily& family, const Partition& part,
                                 std::size_t levels) {
  std::vector<DiscreteDistribution> marginals;
  marginals.reserve(part.steps());
  for (std::size_t i = 1; i < part.size(); ++i) {
    marginals.push_back(family.at(part.points()[i]));
  }
  QuantilePlanSpec spec{std::move(marginals),
                        levels == 0 ? std::vector<Level>{} : stratified_levels(levels)};
  return quantile_coupling(spec);
}

double pass_cost(const PathPlan& plan, const Partition& part, const ConcaveFn& h) {
  if (plan.size() > 0 && plan.dimension() != part.steps()) {
    throw std::domain_error("plan atoms must sample the partition's steps");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    total += plan.masses()[i] * h(riemann_sum(plan.points()[i], part));
  }
  return total;
}

CompareReport compare_with_lp(const MarginalFamily& family, const Partition& part,
                              const ConcaveFn& h, const LpTols& tols) {
  std::vector<DiscreteDistribution> marginals;
  std::vector<double> increments;
  std::size_t grid_size = 1;
  for (std::size_t i = 1; i < part.size(); ++i) {
    marginals.push_back(family.at(part.points()[i]));
    increments.push_back(part.points()[i] - part.points()[i - 1]);
    grid_size *= marginals.back().size();
    if (grid_size > 10000) {
      throw std::invalid_argument(
          "product grid exceeds the 10^4-variable dense LP budget; use a "
          "coarser partition");
    }
  }
  auto grid = product_grid(marginals);
  auto cost = CostSpec::concave_of_sum(h, increments);
  auto constraint_family = multi_marginal_family(marginals, grid);
  Solution solution = solve_gmp(build_instance(grid, cost, constraint_family), tols);
  if (solution.status != LpStatus::Optimal) {
    throw std::runtime_error("time-grid LP did not reach an optimum: " +
                             solution.diagnostic);
  }

  CompareReport report;
  report.lp_plan = solution.plan;
  report.quantile_plan = continuum_quantile_plan(family, part);
  report.lp_objective = solution.objective;
  report.quantile_cost = pass_cost(report.quantile_plan, part, h);
  report.gap = std::abs(report.lp_objective - report.quantile_cost);
  report.rectangles_equal =
      plans_equal_on_rectangles(report.lp_plan, report.quantile_plan, 1e-8);
  return report;
}

}  // namespace gmopt
