#pragma once

#include <cstddef>
#include <vector>

#include "gmopt/gmp.hpp"
#include "gmopt/lp.hpp"
#include "gmopt/measures.hpp"

namespace gmopt {

/// Prescribed one-dimensional marginals at finitely many times in [0, T].
/// No interpolation happens between listed times: a query at an unlisted
/// time is an error, weak continuity in t being a modeling assumption of
/// the caller.
class MarginalFamily {
 public:
  /// Throws std::invalid_argument when times are not strictly increasing
  /// inside [0, horizon], the counts disagree, or the horizon is not
  /// positive.
  MarginalFamily(std::vector<double> times, std::vector<DiscreteDistribution> marginals,
                 double horizon);

  const std::vector<double>& times() const { return times_; }
  const std::vector<DiscreteDistribution>& marginals() const { return marginals_; }
  double horizon() const { return horizon_; }

  /// The marginal listed at exactly time t.
  /// Throws std::invalid_argument when t is not listed.
  const DiscreteDistribution& at(double t) const;

 private:
  std::vector<double> times_;
  std::vector<DiscreteDistribution> marginals_;
  double horizon_ = 0.0;
};

/// A finite partition 0 = t_0 < t_1 < ... < t_N = T of a time interval.
class Partition {
 public:
  /// Throws std::invalid_argument unless points start at 0, increase
  /// strictly, and contain at least two entries.
  explicit Partition(std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  /// Number of increments/samples: N, one per point after t_0.
  std::size_t steps() const { return points_.size() - 1; }
  double horizon() const { return points_.back(); }

 private:
  std::vector<double> points_;
};

/// A transport plan whose atoms are path samples (f_{t_1}, ..., f_{t_N}) on
/// a partition, t_0 excluded by the right-endpoint rule.
using PathPlan = TransportPlan;

/// The dyadic partition {k*T/2^n : k = 0..2^n}; nested across depths.
/// Throws std::invalid_argument when T <= 0 or n < 0.
Partition dyadic_partitions(double horizon, int n);

/// Right-endpoint Riemann sum: sum of path_i * (t_i - t_{i-1}) with path
/// indexed by t_1..t_N. Throws std::domain_error on a length mismatch.
double riemann_sum(const std::vector<double>& path, const Partition& part);

/// The h-weighted sum: sum of h(path_i) * (t_i - t_{i-1}).
/// Throws std::domain_error on a length mismatch or h off its domain.
double riemann_sum_h(const std::vector<double>& path, const Partition& part,
                     const ConcaveFn& h);

/// max over k of riemann_sum(path restricted to partitions[k]) for the given
/// coarsening chain: the finite-horizon surrogate of sup_{k >= n} s_k(f).
/// The path lives on partitions.back(), the finest; every coarser partition
/// must be a subset of its points.
/// Throws std::invalid_argument on an empty chain or non-nested partitions,
/// std::domain_error on a path length mismatch.
double phi_n(const std::vector<double>& path, const std::vector<Partition>& partitions);

/// The quantile path plan: atoms (q_{t_1}(u), ..., q_{t_N}(u)) over the
/// levels, where q_t is the quantile function listed at time t. levels = 0
/// selects the breakpoint policy (exact marginals); levels = m > 0 selects
/// the m stratified midpoints.
/// Throws std::invalid_argument when a partition time after t_0 has no
/// listed marginal.
PathPlan continuum_quantile_plan(const MarginalFamily& family, const Partition& part,
                                 std::size_t levels = 0);

/// Expected h of the path integral: sum over atoms of
/// mass * h(riemann_sum(path, part)).
/// Throws std::domain_error when the plan's dimension is not part.steps().
double pass_cost(const PathPlan& plan, const Partition& part, const ConcaveFn& h);

/// Side-by-side solve of the time-grid instance: LP optimum of the
/// multi-marginal problem with cost h(sum of increment-weighted samples)
/// against the quantile path plan.
struct CompareReport {
  double lp_objective = 0.0;
  double quantile_cost = 0.0;
  double gap = 0.0;  // |lp_objective - quantile_cost|
  bool rectangles_equal = false;
  PathPlan lp_plan;
  PathPlan quantile_plan;
};

/// Builds the product-grid instance for the partition's times, solves it,
/// and compares against continuum_quantile_plan (breakpoint levels,
/// rectangle tolerance 1e-8).
/// Throws std::invalid_argument when the product grid exceeds 10^4
/// variables (the dense-LP budget; coarsen the partition), and
/// std::runtime_error when the LP fails.
CompareReport compare_with_lp(const MarginalFamily& family, const Partition& part,
                              const ConcaveFn& h, const LpTols& tols = {});

}  // namespace gmopt
