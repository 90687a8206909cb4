#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gmopt/constraints.hpp"
#include "gmopt/expression.hpp"
#include "gmopt/lp.hpp"
#include "gmopt/measures.hpp"

namespace gmopt {

/// Built-in one-dimensional concave profiles h for ConcaveOfSum costs:
///   neg_square:    h(s) = -s^2
///   neg_abs_p(p):  h(s) = -|s|^(1+p), p in (0,1); the exponent offset by 1
///                  lands in the strictly concave range
///   log_shift(k):  h(s) = log(s + k), defined for s > -k
///   affine(a, b):  h(s) = a*s + b, concave but not strictly; the
///                  degenerate boundary case where optimizers can tie
class ConcaveFn {
 public:
  enum class Kind { NegSquare, NegAbsP, LogShift, Affine };

  static ConcaveFn neg_square();
  static ConcaveFn neg_abs_p(double p);
  static ConcaveFn log_shift(double kappa);
  static ConcaveFn affine(double slope, double intercept);

  /// h(s). Throws std::domain_error off the domain (log_shift at s <= -kappa).
  double operator()(double s) const;

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  double kappa() const { return kappa_; }
  double slope() const { return slope_; }
  double intercept() const { return intercept_; }
  bool strictly_concave() const { return kind_ != Kind::Affine; }

 private:
  ConcaveFn() = default;
  Kind kind_ = Kind::NegSquare;
  double p_ = 0.0;
  double kappa_ = 0.0;
  double slope_ = 0.0;
  double intercept_ = 0.0;
};

/// Cost function on the grid. ConcaveOfSum(h, weights)(z) = h(Σ weights_i z_i).
class CostSpec {
 public:
  enum class Kind { Tabulated, Expression, ConcaveOfSum };

  static CostSpec tabulated(std::map<GroundPoint, double> table);
  static CostSpec expression(gmopt::Expression expr);
  static CostSpec concave_of_sum(ConcaveFn h, std::vector<double> weights);

  /// c(z). Throws std::out_of_range off a table, std::domain_error on
  /// dimension mismatches and non-finite values.
  double value(const GroundPoint& z) const;

  Kind kind() const { return kind_; }
  const std::map<GroundPoint, double>& table() const { return table_; }
  const gmopt::Expression& expr() const { return *expr_; }
  const ConcaveFn& h() const { return h_; }
  const std::vector<double>& weights() const { return weights_; }

  /// True when the cost is h(Σ Δ_i z_i) with strictly concave h; the
  /// uniqueness claims for comonotone optimizers require this.
  bool strictly_concave_of_sum() const {
    return kind_ == Kind::ConcaveOfSum && h_.strictly_concave();
  }

 private:
  CostSpec() = default;
  Kind kind_ = Kind::Tabulated;
  std::map<GroundPoint, double> table_;
  std::shared_ptr<const gmopt::Expression> expr_;
  ConcaveFn h_ = ConcaveFn::neg_square();
  std::vector<double> weights_;
};

/// A validated discrete moment problem: minimize ∫ c dP over probability
/// measures P on the grid with ∫ f dP = 0 for every family function.
struct GmpInstance {
  std::vector<GroundPoint> grid;
  CostSpec cost;
  ConstraintFamily family;
};

/// Validates totality of cost and family on a nonempty grid of distinct
/// equal-dimension points. Throws std::invalid_argument on violations.
GmpInstance build_instance(std::vector<GroundPoint> grid, CostSpec cost,
                           ConstraintFamily family);

/// The induced LP: one column per grid point, one row per family function
/// (right-hand side 0; centers live inside the functions), and a final
/// total-mass row Σ x = 1.
LinearProgram assemble_lp(const GmpInstance& instance);

struct Solution {
  LpStatus status = LpStatus::Optimal;
  TransportPlan plan;       // probability plan, valid when Optimal
  double objective = 0.0;   // ∫ c dP at the plan
  LpResult lp_result;       // certificate carrier (duals, Farkas, basis)
  LinearProgram lp;         // the solved LP, kept for certification
  double max_residual = 0.0;  // max_f |∫ f dP| over the family
  std::string diagnostic;   // infeasibility explanation, empty otherwise
};

/// Solves the instance. Unbounded cannot occur on the compact feasible set
/// and is escalated as std::runtime_error. Infeasible solutions carry the
/// Farkas row and, when the family encodes marginals of consecutive axes
/// plus martingale increments, a convex-order diagnostic.
Solution solve_gmp(const GmpInstance& instance, const LpTols& tols = {});

struct LexSolution {
  Solution final;               // the last stage's optimizer
  std::vector<double> values;   // objective per stage
  std::vector<LexStage> stages; // audit trail for certification
};

/// Minimizes the instance cost, then each refinement cost over the previous
/// optimizers (each stage pinned by one equality row). Selects, e.g., the
/// comonotone optimizer when the primary cost is degenerate.
LexSolution solve_gmp_lexicographic(const GmpInstance& instance,
                                    const std::vector<CostSpec>& refinement_costs,
                                    const LpTols& tols = {});

/// Cartesian product of the marginal supports, lexicographic order; the
/// default grid for transport-type families.
std::vector<GroundPoint> product_grid(const std::vector<DiscreteDistribution>& marginals);

}  // namespace gmopt
