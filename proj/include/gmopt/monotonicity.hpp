#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gmopt/constraints.hpp"
#include "gmopt/gmp.hpp"
#include "gmopt/measures.hpp"

namespace gmopt {

/// A competitor search: does some measure on candidate_points with alpha's
/// total mass and alpha's moments cost strictly less than alpha?
struct CompetitorQuery {
  DiscreteMeasure alpha;
  std::vector<GroundPoint> candidate_points;
  CostSpec cost;
  ConstraintFamily family;
  double improvement_tol = 1e-9;
  LpTols lp_tols{};
};

/// Minimizes ∫ c dα' over measures α' ≥ 0 on the candidate grid subject to
/// α'(E) = α(E) and ∫ f dα' = ∫ f dα for every family function. Returns the
/// optimizer iff it improves on ∫ c dα by more than
/// improvement_tol · (1 + |∫ c dα|), otherwise nothing.
/// Throws std::invalid_argument when candidates miss part of alpha's
/// support and std::runtime_error when the LP misbehaves (alpha itself is
/// always feasible).
std::optional<DiscreteMeasure> find_better_competitor(const CompetitorQuery& q);

struct Verdict {
  enum class Status { Certified, Violated };
  Status status = Status::Certified;
  /// Improvement carried by the witness: cost(alpha) - cost(competitor), or
  /// original minus rerouted total along the cycle. 0 when Certified.
  double margin = 0.0;
  std::optional<DiscreteMeasure> witness_alpha;       // offending sub-measure
  std::optional<DiscreteMeasure> witness_competitor;  // its cheaper competitor
  std::vector<std::size_t> witness_cycle;  // pair indices, reassignment order
  int trials = 0;                          // competitor searches run
  bool exhaustive = false;                 // all subsets up to the budget seen
};

struct FinitelyMinimalOptions {
  std::size_t atom_budget = 4;  // k: sub-measures on at most k support atoms
  int trials = 200;             // random trials when not exhaustive
  std::uint64_t seed = 1;
  double improvement_tol = 1e-9;
  /// Widen each axis's candidate values from the sub-measure's own
  /// projections to the full plan's projections.
  bool extend_candidates_with_plan = false;
  /// Enumerate every subset when their count stays within this limit.
  std::size_t exhaustive_limit = 10000;
  LpTols lp_tols{};
};

/// Tests finite minimality on the plan's support:
/// sub-measures concentrated on at most atom_budget support atoms (masses
/// inherited from the plan) are searched for c-better competitors on the
/// Cartesian product of their per-axis support projections. Certified iff
/// no search finds one.
/// Throws std::invalid_argument when atom_budget < 2 or the plan is empty.
Verdict is_finitely_minimal(const TransportPlan& plan, const CostSpec& cost,
                            const ConstraintFamily& family,
                            const FinitelyMinimalOptions& options = {});

/// c-cyclical monotonicity of support pairs (x_i, y_i) via negative-cycle
/// detection on the directed graph with weights
/// w(p -> q) = c(x_p, y_q) - c(x_p, y_p) (Bellman-Ford, virtual source).
/// Certified iff no cycle lowers the rerouted total by more than slack.
/// Throws std::domain_error off dimension 2, std::invalid_argument on
/// duplicate pairs.
Verdict check_cyclical_monotone(const std::vector<GroundPoint>& pairs,
                                const CostSpec& cost, double slack = 1e-10);

/// The coordinate-block swap: f' = componentwise max(f,g) on the subset, f
/// elsewhere; g' = componentwise min on the subset, g elsewhere. Preserves
/// the per-axis multiset of values.
/// Throws std::invalid_argument on dimension mismatch or bad indices.
std::pair<GroundPoint, GroundPoint> monotone_swap(const GroundPoint& f,
                                                  const GroundPoint& g,
                                                  const std::vector<std::size_t>& subset);

/// Cartesian product of the per-axis distinct support values of alpha: the
/// default candidate grid, sufficient for marginal-type families whose
/// competitors can only recouple those values.
std::vector<GroundPoint> default_candidate_grid(const DiscreteMeasure& alpha);

}  // namespace gmopt
