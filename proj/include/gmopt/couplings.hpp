#pragma once

#include <vector>

#include "gmopt/measures.hpp"

namespace gmopt {

/// One evaluation level of the uniform parameter: the coupling places weight
/// at (q_1(u), ..., q_n(u)).
struct Level {
  double u = 0.0;       // in (0, 1)
  double weight = 0.0;  // positive; all weights sum to 1
};

/// Marginals plus the levels discretizing the uniform parameter. Empty
/// levels select the default: the cumulative-breakpoint midpoints of the
/// marginals, exact for arbitrary discrete marginals.
struct QuantilePlanSpec {
  std::vector<DiscreteDistribution> marginals;
  std::vector<Level> levels;
};

/// Stratified uniform levels u_k = (2k-1)/(2m) with weight 1/m each. Exact
/// for marginals uniform on m atoms; residual marginal error is bounded by
/// max-weight/(2m) otherwise.
/// Throws std::invalid_argument when m = 0.
std::vector<Level> stratified_levels(std::size_t m);

/// Union of the marginals' cumulative breakpoints, returned as the midpoint
/// of each consecutive gap weighted by the gap length. Every quantile
/// function is constant between breakpoints, so the resulting coupling has
/// exact marginals. Breakpoints closer than 1e-12 merge.
/// Throws std::invalid_argument on an empty marginal sequence.
std::vector<Level> breakpoint_levels(const std::vector<DiscreteDistribution>& marginals);

/// The quantile (comonotone) coupling: sum of weight * point mass at
/// (q_1(u), ..., q_n(u)) over the requested levels, atoms merged. Empty levels
/// default to breakpoint_levels(marginals).
/// Throws std::invalid_argument on an invalid request (no marginals,
/// levels not strictly increasing inside (0,1), weights not positive or not
/// summing to 1 within 1e-9).
TransportPlan quantile_coupling(const QuantilePlanSpec& spec);

/// True iff every pair of points is componentwise comparable (a totally
/// ordered set under <=). Points of differing dimensions are never
/// comparable. Sorts once and checks adjacent pairs.
bool is_monotone_set(const std::vector<GroundPoint>& points);

/// Mass of the lower-left rectangle: total mass of atoms z with z_i <= a_i
/// for every axis i.
/// Throws std::invalid_argument when a's dimension disagrees with the plan.
double rectangle_mass(const TransportPlan& plan, const GroundPoint& a);

/// True iff the two plans put equal mass (within tol) on every lower-left
/// rectangle whose corner is built from the per-axis union of both supports.
/// On finite supports this is equality as measures.
/// Throws std::invalid_argument when the plans' dimensions disagree.
bool plans_equal_on_rectangles(const TransportPlan& p1, const TransportPlan& p2,
                               double tol = 1e-9);

}  // namespace gmopt
