#pragma once

#include <cstddef>
#include <vector>

namespace gmopt {

/// A point of the ground space: a vector in R^n, or a path sampled on a
/// finite time grid. Dimension must be consistent within one instance.
using GroundPoint = std::vector<double>;

/// Atoms closer than this are merged at construction time, so point and
/// atom comparisons elsewhere can be exact.
inline constexpr double kMergeTol = 1e-12;

/// Tolerance for "weights sum to one" checks.
inline constexpr double kMassTol = 1e-12;

/// A one-dimensional probability law on finitely many real atoms.
///
/// Invariants established at construction: atoms strictly increasing
/// (ties within kMergeTol merged, weights summed), weights nonnegative,
/// total weight 1 within kMassTol. Zero-weight atoms are pruned.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<double> atoms, std::vector<double> weights);

  static DiscreteDistribution point_mass(double atom);

  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }

  double mean() const;

  /// Weight carried by `atom`, 0 when `atom` is not in the support.
  double weight_at(double atom) const;

  /// Right-continuous CDF: total weight of atoms <= y.
  double cdf(double y) const;

  /// Left-continuous generalized inverse of the CDF,
  /// quantile(u) = inf{y : CDF(y) >= u}. At a cumulative breakpoint the
  /// lower atom is returned. Requires 0 < u < 1.
  double quantile(double u) const;

  /// Cumulative weights, same length as atoms(); last entry is ~1.
  const std::vector<double>& cumulative() const { return cumulative_; }

  bool operator==(const DiscreteDistribution& other) const = default;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

/// Checks mu <=_c nu (convex order) on discrete supports: means equal
/// within tol and the potentials U_rho(k) = sum_i w_i |x_i - k| satisfy
/// U_mu <= U_nu + tol at every atom of nu and at both means. U_nu is
/// piecewise linear with kinks only at its atoms and U_mu is convex, so
/// these check points decide the comparison on all of R.
bool convex_order(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                  double tol);

/// A nonnegative finitely-supported measure on points of equal dimension.
///
/// Construction merges coinciding points (masses summed), prunes zero-mass
/// atoms, sorts points lexicographically, and rejects negative masses and
/// mixed dimensions. A probability-normalized DiscreteMeasure is used as a
/// transport plan.
class DiscreteMeasure {
 public:
  /// The empty measure (zero mass, dimension 0).
  DiscreteMeasure() = default;

  DiscreteMeasure(std::vector<GroundPoint> points, std::vector<double> masses);

  const std::vector<GroundPoint>& points() const { return points_; }
  const std::vector<double>& masses() const { return masses_; }
  std::size_t size() const { return points_.size(); }

  /// Dimension of the underlying space; 0 for the empty measure.
  std::size_t dimension() const;

  double total_mass() const;

  struct Marginal {
    DiscreteDistribution distribution;  // normalized pushforward
    double total_mass;                  // mass before normalization
  };

  /// Pushforward of the normalized measure under the coordinate
  /// projection onto `axis`. Throws on zero total mass or a bad axis.
  Marginal marginal(std::size_t axis) const;

  bool operator==(const DiscreteMeasure& other) const = default;

 private:
  std::vector<GroundPoint> points_;
  std::vector<double> masses_;
};

/// A DiscreteMeasure of total mass ~1.
using TransportPlan = DiscreteMeasure;

}  // namespace gmopt
