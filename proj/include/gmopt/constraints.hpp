#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <vector>

#include "gmopt/expression.hpp"
#include "gmopt/measures.hpp"

namespace gmopt {

/// One test function f of a constraint family, stored together with its
/// centering constant so the constraint uniformly reads ∫ f dP = 0.
/// value(z) = raw(z) - center, where raw depends on the kind:
///   MarginalIndicator:   raw(z) = 1{z_axis = atom}
///   MartingaleIncrement: raw(z) = (z_{l+1} - z_l) * 1{(z_1..z_l) = prefix},
///                        level l is 1-based, prefix has length l
///   Tabulated:           raw(z) = table[z], total on the declared grid
///   Expression:          raw(z) = expr(z)
class TestFunction {
 public:
  enum class Kind { MarginalIndicator, MartingaleIncrement, Tabulated, Expression };

  static TestFunction marginal_indicator(std::size_t axis, double atom, double center);
  static TestFunction martingale_increment(std::size_t level, std::vector<double> prefix);
  static TestFunction tabulated(std::map<GroundPoint, double> table, double center);
  static TestFunction expression(gmopt::Expression expr, double center);

  Kind kind() const { return kind_; }
  double center() const { return center_; }
  std::size_t axis() const { return axis_; }
  double atom() const { return atom_; }
  std::size_t level() const { return level_; }
  const std::vector<double>& prefix() const { return prefix_; }
  const std::map<GroundPoint, double>& table() const { return table_; }
  const gmopt::Expression& expr() const { return *expr_; }

  /// f(z) including the centering constant. Throws std::out_of_range when a
  /// tabulated function is evaluated off its table, std::domain_error when a
  /// martingale increment or expression reads past z's dimension.
  double value(const GroundPoint& z) const;

 private:
  TestFunction() = default;

  Kind kind_ = Kind::Tabulated;
  double center_ = 0.0;
  std::size_t axis_ = 0;
  double atom_ = 0.0;
  std::size_t level_ = 0;
  std::vector<double> prefix_;
  std::map<GroundPoint, double> table_;
  std::shared_ptr<const gmopt::Expression> expr_;
};

/// A finite generating set of test functions plus a growth bound g. The
/// default g ≡ 1 bounds every function on a finite grid; a tabulated g must
/// cover every point it is queried at.
class ConstraintFamily {
 public:
  ConstraintFamily() = default;
  explicit ConstraintFamily(std::vector<TestFunction> functions);
  ConstraintFamily(std::vector<TestFunction> functions,
                   std::map<GroundPoint, double> growth_bound);

  const std::vector<TestFunction>& functions() const { return functions_; }
  std::size_t size() const { return functions_.size(); }

  bool has_growth_table() const { return has_growth_table_; }
  const std::map<GroundPoint, double>& growth_table() const { return growth_table_; }

  /// g(z): 1 without a table, otherwise the tabulated value.
  /// Throws std::out_of_range when a table is present but misses z.
  double growth_bound(const GroundPoint& z) const;

 private:
  std::vector<TestFunction> functions_;
  std::map<GroundPoint, double> growth_table_;
  bool has_growth_table_ = false;
};

/// Concatenation of two families. The growth table, when present, must come
/// from at most one side; two tables throw std::invalid_argument.
ConstraintFamily merge(const ConstraintFamily& a, const ConstraintFamily& b);

/// Marginal-constraint family on a product grid: for each axis i and each
/// atom a of marginals[i], the function 1{z_i = a} - marginals[i]({a}).
/// Functions are ordered axis-major, atoms ascending.
/// Throws std::invalid_argument when the grid dimension disagrees with the
/// number of marginals or a grid coordinate lies outside its marginal's
/// support.
ConstraintFamily multi_marginal_family(const std::vector<DiscreteDistribution>& marginals,
                                       const std::vector<GroundPoint>& grid);

/// Martingale-increment family: for each level l in 1..n-1 and each distinct
/// prefix (z_1..z_l) occurring in the grid, (z_{l+1} - z_l) * 1{prefix}.
/// Levels ascending, prefixes in lexicographic order.
/// Throws std::invalid_argument when the grid dimension is below 2.
ConstraintFamily martingale_family(const std::vector<GroundPoint>& grid);

/// ∫ f dm = Σ_i mass_i * f(point_i), centering included. 0 on the empty
/// measure.
double evaluate_moment(const TestFunction& f, const DiscreteMeasure& m);

struct GrowthBoundEntry {
  std::size_t function_index;
  double bound;  // a_f = max over grid of |f(z)| / g(z); 0/0 contributes 0
  bool defined;  // false iff some grid point has g(z) = 0 and f(z) != 0
};

struct GrowthBoundReport {
  std::vector<GrowthBoundEntry> entries;
  bool ok;  // every entry defined
};

/// Validates |f| ≤ a_f · g on the grid for every family function and
/// reports the tightest constants a_f.
GrowthBoundReport validate_growth_bound(const ConstraintFamily& family,
                                        const std::vector<GroundPoint>& grid);

}  // namespace gmopt
